#include "doctest.h"

#include "neardup/diff.hpp"
#include "neardup/token.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <stdexcept>
#include <random>
#include <string>
#include <vector>

using namespace neardup;

namespace {

TokenStream toks(const std::string& s) { return tokenize(s); }

std::vector<std::string> change_texts(const Change& c) {
    std::vector<std::string> out;
    for (const auto& t : c.tokens) out.push_back(t.text);
    return out;
}

} // namespace

TEST_CASE("diff of a one-token change keeps the shared prefix and suffix") {
    auto a = toks("Lorem 2022-04-05 ipsum");
    auto b = toks("Lorem 2022-04-06 ipsum");
    auto script = token_diff(a, b);

    REQUIRE(script.changes.size() == 4);
    CHECK(script.changes[0].op == ChangeOp::Equal);
    CHECK(change_texts(script.changes[0]) == std::vector<std::string>{"Lorem", " "});
    CHECK(script.changes[1].op == ChangeOp::Delete);
    CHECK(change_texts(script.changes[1]) == std::vector<std::string>{"2022-04-05"});
    CHECK(script.changes[2].op == ChangeOp::Insert);
    CHECK(change_texts(script.changes[2]) == std::vector<std::string>{"2022-04-06"});
    CHECK(script.changes[3].op == ChangeOp::Equal);
    CHECK(change_texts(script.changes[3]) == std::vector<std::string>{" ", "ipsum"});

    CHECK(edit_cost(script) == 2);
    CHECK_FALSE(script.budget_exhausted);
    CHECK(is_canonical(script));
    CHECK(reconstruct_old(script) == a);
    CHECK(reconstruct_new(script) == b);
}

TEST_CASE("diff of identical streams is a single equal span") {
    auto a = toks("same old text");
    auto script = token_diff(a, a);
    REQUIRE(script.changes.size() == 1);
    CHECK(script.changes[0].op == ChangeOp::Equal);
    CHECK(edit_cost(script) == 0);
    CHECK(is_canonical(script));
}

TEST_CASE("diff against an empty stream is a pure insert or delete") {
    auto b = toks("fresh page");
    auto ins = token_diff({}, b);
    REQUIRE(ins.changes.size() == 1);
    CHECK(ins.changes[0].op == ChangeOp::Insert);
    CHECK(edit_cost(ins) == b.size());

    auto del = token_diff(b, {});
    REQUIRE(del.changes.size() == 1);
    CHECK(del.changes[0].op == ChangeOp::Delete);

    auto empty = token_diff({}, {});
    CHECK(empty.changes.empty());
    CHECK(edit_cost(empty) == 0);
}

TEST_CASE("diff cost matches the dynamic-programming oracle on random pairs") {
    std::mt19937_64 rng(7);
    std::vector<std::string> vocab = {"a", "b", "c", "dd", "e1", " "};
    for (int round = 0; round < 300; ++round) {
        TokenStream a, b;
        size_t na = rng() % 24, nb = rng() % 24;
        for (size_t i = 0; i < na; ++i)
            a.push_back({vocab[rng() % vocab.size()], TokenKind::Word});
        for (size_t i = 0; i < nb; ++i)
            b.push_back({vocab[rng() % vocab.size()], TokenKind::Word});
        auto script = token_diff(a, b);
        CHECK(edit_cost(script) == oracle::edit_distance(a, b));
        CHECK(reconstruct_old(script) == a);
        CHECK(reconstruct_new(script) == b);
        CHECK(is_canonical(script));
    }
}

TEST_CASE("exhausted budget still reconstructs both sides") {
    // Large unrelated random streams push the search across the deadline.
    std::mt19937_64 rng(99);
    TokenStream a, b;
    for (int i = 0; i < 30000; ++i) {
        a.push_back({std::to_string(rng() % 100000), TokenKind::Word});
        b.push_back({std::to_string(rng() % 100000 + 200000), TokenKind::Word});
    }
    auto script = token_diff(a, b, std::chrono::milliseconds(1));
    CHECK(script.budget_exhausted);
    CHECK(reconstruct_old(script) == a);
    CHECK(reconstruct_new(script) == b);
    // No token is shared, so every valid script deletes all of a and
    // inserts all of b.
    CHECK(edit_cost(script) == a.size() + b.size());
}

TEST_CASE("non-positive budgets are rejected") {
    auto a = toks("x");
    CHECK_THROWS_AS((token_diff(a, a, std::chrono::milliseconds(0))), std::invalid_argument);
    CHECK_THROWS_AS((token_diff(a, a, std::chrono::milliseconds(-5))), std::invalid_argument);
}

TEST_CASE("tokens diff by text, not by kind") {
    TokenStream a = {{"42", TokenKind::Word}};
    TokenStream b = {{"42", TokenKind::DecimalNumber}};
    auto script = token_diff(a, b);
    REQUIRE(script.changes.size() == 1);
    CHECK(script.changes[0].op == ChangeOp::Equal);
}
