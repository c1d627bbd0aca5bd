#include "doctest.h"

#include "neardup/diff.hpp"
#include "neardup/similarity.hpp"
#include "neardup/token.hpp"

#include <cmath>
#include <stdexcept>
#include <random>
#include <string>
#include <vector>

using namespace neardup;

TEST_CASE("shingles are contiguous windows over content tokens") {
    auto toks = tokenize("one two three four");
    auto s2 = shingle(toks, 2);
    // Content tokens: one, two, three, four -> 3 bigrams.
    CHECK(s2.k == 2);
    CHECK(s2.grams.size() == 3);

    // Raw mode keeps whitespace tokens.
    auto raw = shingle(toks, 2, /*content_only=*/false);
    CHECK(raw.grams.size() == 6);
}

TEST_CASE("short streams produce the whole-stream shingle") {
    auto toks = tokenize("word");
    auto s = shingle(toks, 5);
    CHECK(s.grams.size() == 1);
    // An empty stream's whole-stream shingle is the empty gram, so two empty
    // pages still compare as identical.
    auto empty = shingle({}, 3);
    CHECK(empty.grams.size() == 1);
}

TEST_CASE("shingle rejects non-positive k") {
    CHECK_THROWS_AS((shingle(tokenize("a b"), 0)), std::invalid_argument);
    CHECK_THROWS_AS((shingle(tokenize("a b"), -1)), std::invalid_argument);
}

TEST_CASE("jaccard similarity on known sets") {
    auto a = shingle(tokenize("alpha beta gamma delta"), 2);
    auto b = shingle(tokenize("alpha beta gamma epsilon"), 2);
    // Bigrams: {ab, bg, gd} vs {ab, bg, ge}: intersection 2, union 4.
    CHECK(jaccard(a, b) == doctest::Approx(0.5));
    CHECK(jaccard(a, a) == doctest::Approx(1.0));

    auto empty1 = shingle({}, 2);
    auto empty2 = shingle({}, 2);
    CHECK(jaccard(empty1, empty2) == doctest::Approx(1.0));
    CHECK(jaccard(a, empty1) == doctest::Approx(0.0));

    auto k3 = shingle(tokenize("alpha beta gamma delta"), 3);
    CHECK_THROWS_AS((jaccard(a, k3)), std::invalid_argument);
}

TEST_CASE("diff similarity counts changed tokens against total size") {
    // 5 tokens a side, one substituted: 1 - (1+1)/(5+5) = 0.8.
    auto script = token_diff(tokenize("Lorem 2022-04-05 ipsum"),
                             tokenize("Lorem 2022-04-06 ipsum"));
    CHECK(diff_similarity(script) == doctest::Approx(0.8));

    auto same = token_diff(tokenize("x y"), tokenize("x y"));
    CHECK(diff_similarity(same) == doctest::Approx(1.0));

    auto disjoint = token_diff(tokenize("aa"), tokenize("bb"));
    CHECK(diff_similarity(disjoint) == doctest::Approx(0.0));

    auto both_empty = token_diff({}, {});
    CHECK(diff_similarity(both_empty) == doctest::Approx(1.0));
}

TEST_CASE("pseudo differences do not lower diff similarity") {
    auto script = token_diff(tokenize("a b c"), tokenize("a b c"));
    // Manually mark the middle as a pseudo difference the way alignment does.
    EditScript split;
    split.changes.push_back({ChangeOp::Equal, tokenize("a "), false});
    split.changes.push_back({ChangeOp::Delete, tokenize("b"), true});
    split.changes.push_back({ChangeOp::Insert, tokenize("b"), true});
    split.changes.push_back({ChangeOp::Equal, tokenize(" c"), false});
    CHECK(diff_similarity(script) == doctest::Approx(1.0));
    CHECK(diff_similarity(split) == doctest::Approx(1.0));
}

TEST_CASE("minhash approximates jaccard and is deterministic") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
        std::string text_a, text_b;
        for (int i = 0; i < 60; ++i) {
            int w = static_cast<int>(rng() % 40);
            text_a += "w" + std::to_string(w) + " ";
            // Skewed overlap: reuse most words, replace some.
            int v = (rng() % 100 < 70) ? w : static_cast<int>(rng() % 40 + 100);
            text_b += "w" + std::to_string(v) + " ";
        }
        auto a = shingle(tokenize(text_a), 3);
        auto b = shingle(tokenize(text_b), 3);
        double exact = jaccard(a, b);
        double est = minhash_estimate(a, b, 256, 17);
        CHECK(std::abs(est - exact) < 0.2);  // loose per-pair bound
        CHECK(minhash_estimate(a, b, 256, 17) == doctest::Approx(est));
    }

    auto a = shingle(tokenize("p q r s t u"), 2);
    CHECK(minhash_estimate(a, a, 64, 3) == doctest::Approx(1.0));
}

TEST_CASE("pearson correlation matches the closed-form value") {
    std::vector<double> xs = {0.0, 1.0, 2.0};
    std::vector<double> ys = {0.0, 2.0, 3.0};
    // cov = 1.5, sd_x = 1, sd_y = sqrt(7/3): r = 1.5/sqrt(7/3) ~ 0.981981.
    CHECK(pearson(xs, ys) == doctest::Approx(0.981981).epsilon(0.001));

    std::vector<double> inv = {3.0, 2.0, 1.0};
    CHECK(pearson(xs, inv) == doctest::Approx(-1.0));
}

TEST_CASE("pearson rejects degenerate inputs") {
    std::vector<double> two = {1.0, 2.0};
    std::vector<double> also_two = {3.0, 4.0};
    CHECK_THROWS_AS((pearson(two, also_two)), std::invalid_argument);

    std::vector<double> xs = {1.0, 2.0, 3.0};
    std::vector<double> flat = {5.0, 5.0, 5.0};
    CHECK_THROWS_AS((pearson(xs, flat)), std::invalid_argument);

    std::vector<double> longer = {1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS((pearson(xs, longer)), std::invalid_argument);
}
