#include "doctest.h"

#include "neardup/align.hpp"
#include "neardup/diff.hpp"
#include "neardup/token.hpp"

#include <random>
#include <string>
#include <vector>

using namespace neardup;

namespace {

std::vector<AlignedScript> scripts_for(const std::vector<std::string>& versions) {
    std::vector<AlignedScript> scripts;
    for (size_t i = 0; i + 1 < versions.size(); ++i) {
        auto s = token_diff(tokenize(versions[i]), tokenize(versions[i + 1]));
        s.old_id = static_cast<int>(i);
        s.new_id = static_cast<int>(i + 1);
        scripts.push_back(std::move(s));
    }
    return scripts;
}

std::string pseudo_text(const AlignedScript& s) {
    std::string out;
    for (const auto& c : s.changes)
        if (c.pseudo && c.op == ChangeOp::Delete) out += detokenize(c.tokens);
    return out;
}

// Real (non-pseudo) changes only, for pass-through comparisons.
std::vector<Change> real_changes(const AlignedScript& s) {
    std::vector<Change> out;
    for (const auto& c : s.changes)
        if (!c.pseudo && c.op != ChangeOp::Equal) out.push_back(c);
    return out;
}

// Aligns a whole history the way the pipeline does: group, then align each
// group on its own.
std::vector<AlignedScript> align_history(const std::vector<AlignedScript>& scripts,
                                         int chunk) {
    std::vector<AlignedScript> out;
    for (auto [b, e] : chunk_bounds(scripts.size(), chunk)) {
        std::vector<AlignedScript> group(scripts.begin() + static_cast<long>(b),
                                         scripts.begin() + static_cast<long>(e));
        auto aligned = align_chunk(std::move(group), AlignmentConfig{chunk});
        for (auto& s : aligned) out.push_back(std::move(s));
    }
    return out;
}

} // namespace

TEST_CASE("alignment propagates differences across a three-version history") {
    // v1 -> v2 changes the date, v2 -> v3 changes the price. After aligning
    // both scripts together, each script also carries the other change as a
    // pseudo difference over identical text.
    std::vector<std::string> versions = {
        "Lorem 2022-04-05 ipsum 1.0 BTC",
        "Lorem 2022-04-06 ipsum 1.0 BTC",
        "Lorem 2022-04-06 ipsum 1.5 BTC",
    };
    auto scripts = scripts_for(versions);
    REQUIRE(scripts.size() == 2);
    CHECK(pseudo_difference_count(scripts[0]) == 0);
    CHECK(pseudo_difference_count(scripts[1]) == 0);

    auto aligned = align_chunk(scripts, AlignmentConfig{2});
    REQUIRE(aligned.size() == 2);

    CHECK(pseudo_difference_count(aligned[0]) == 1);
    CHECK(pseudo_text(aligned[0]) == "1.0");
    CHECK(pseudo_difference_count(aligned[1]) == 1);
    CHECK(pseudo_text(aligned[1]) == "2022-04-06");

    // Real differences pass through untouched.
    CHECK(real_changes(aligned[0]) == real_changes(scripts[0]));
    CHECK(real_changes(aligned[1]) == real_changes(scripts[1]));

    // Both sides of every script still reconstruct exactly.
    for (size_t i = 0; i < aligned.size(); ++i) {
        CHECK(reconstruct_old(aligned[i]) == tokenize(versions[i]));
        CHECK(reconstruct_new(aligned[i]) == tokenize(versions[i + 1]));
    }

    // Pseudo pairs carry identical text on both sides.
    for (const auto& s : aligned) {
        for (size_t i = 0; i < s.changes.size(); ++i) {
            if (!s.changes[i].pseudo) continue;
            REQUIRE(s.changes[i].op == ChangeOp::Delete);
            REQUIRE(i + 1 < s.changes.size());
            REQUIRE(s.changes[i + 1].op == ChangeOp::Insert);
            CHECK(s.changes[i + 1].pseudo);
            CHECK(s.changes[i].tokens == s.changes[i + 1].tokens);
            ++i;
        }
    }
}

TEST_CASE("chunk size zero passes scripts through untouched") {
    auto scripts = scripts_for({"a 1 b", "a 2 b", "a 2 c"});
    auto aligned = align_chunk(scripts, AlignmentConfig{0});
    REQUIRE(aligned.size() == scripts.size());
    for (size_t i = 0; i < scripts.size(); ++i) {
        CHECK(aligned[i].changes == scripts[i].changes);
        CHECK(pseudo_difference_count(aligned[i]) == 0);
    }
}

TEST_CASE("chunk bounds split the script sequence into consecutive groups") {
    using Bounds = std::vector<std::pair<size_t, size_t>>;
    CHECK(chunk_bounds(7, 2) == Bounds{{0, 2}, {2, 4}, {4, 6}, {6, 7}});
    CHECK(chunk_bounds(5, 0) == Bounds{{0, 5}});
    CHECK(chunk_bounds(5, 10) == Bounds{{0, 5}});
    CHECK(chunk_bounds(0, 3) == Bounds{});
}

TEST_CASE("chunk size one is rejected") {
    auto scripts = scripts_for({"a", "b"});
    CHECK_THROWS_AS((align_chunk(scripts, AlignmentConfig{1})), std::invalid_argument);
    CHECK_THROWS_AS((align_chunk(scripts, AlignmentConfig{-3})), std::invalid_argument);
}

TEST_CASE("broken version chains are reported with script ids") {
    auto s1 = token_diff(tokenize("a b"), tokenize("a c"));
    s1.old_id = 0;
    s1.new_id = 1;
    auto s2 = token_diff(tokenize("totally different"), tokenize("other"));
    s2.old_id = 1;
    s2.new_id = 2;
    try {
        align_chunk({s1, s2}, AlignmentConfig{2});
        FAIL("expected ChainMismatchError");
    } catch (const ChainMismatchError& e) {
        // Both ids name the junction version: the new side of the first
        // script and the old side of the second both claim to be version 1
        // yet disagree about its content.
        CHECK(e.old_id == 1);
        CHECK(e.new_id == 1);
    }
}

TEST_CASE("alignment is conservative and idempotent on random histories") {
    std::mt19937_64 rng(2022);
    std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta",
                                      "10",    "11",   "2.5",  "x"};
    for (int round = 0; round < 120; ++round) {
        // Build a short history by point-editing a token vector.
        size_t len = 4 + rng() % 8;
        std::vector<std::string> words;
        for (size_t i = 0; i < len; ++i) words.push_back(vocab[rng() % vocab.size()]);
        std::vector<std::string> versions;
        size_t nver = 3 + rng() % 4;
        for (size_t v = 0; v < nver; ++v) {
            size_t edits = 1 + rng() % 2;
            for (size_t e = 0; e < edits; ++e)
                words[rng() % words.size()] = vocab[rng() % vocab.size()];
            std::string joined;
            for (size_t i = 0; i < words.size(); ++i) {
                if (i) joined += ' ';
                joined += words[i];
            }
            versions.push_back(joined);
        }
        auto scripts = scripts_for(versions);
        for (int chunk : {2, 3, 10}) {
            auto aligned = align_history(scripts, chunk);
            REQUIRE(aligned.size() == scripts.size());
            for (size_t i = 0; i < aligned.size(); ++i) {
                // Content conservation.
                CHECK(reconstruct_old(aligned[i]) == tokenize(versions[i]));
                CHECK(reconstruct_new(aligned[i]) == tokenize(versions[i + 1]));
                // Split-only: real differences are exactly the original ones.
                CHECK(real_changes(aligned[i]) == real_changes(scripts[i]));
                CHECK(edit_cost(aligned[i]) == edit_cost(scripts[i]));
            }
            // Idempotence.
            auto again = align_history(aligned, chunk);
            REQUIRE(again.size() == aligned.size());
            for (size_t i = 0; i < aligned.size(); ++i)
                CHECK(again[i].changes == aligned[i].changes);
        }
    }
}
