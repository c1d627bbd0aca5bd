#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>

#include "neardup/diff.hpp"
#include "neardup/token.hpp"

namespace neardup {

struct ShingleSet {
  int k = 0;
  std::unordered_set<std::string> grams;
};

// Contiguous k-token windows. By default only content tokens (words,
// numbers, dates) participate and whitespace/punctuation is dropped;
// pass content_only = false to shingle the raw stream. Streams shorter
// than k yield the single whole-stream shingle.
ShingleSet shingle(const TokenStream& tokens, int k, bool content_only = true);

// Exact |A∩B| / |A∪B|; 1.0 when both sets are empty. Throws
// std::invalid_argument on mismatched k.
double jaccard(const ShingleSet& a, const ShingleSet& b);

// MinHash estimate of the Jaccard similarity using num_hashes independent
// seeded 64-bit hash functions. Deterministic for a given seed.
double minhash_estimate(const ShingleSet& a, const ShingleSet& b,
                        int num_hashes, uint64_t seed);

// 1 - (deleted + inserted) / (|old| + |new|), counted in tokens over
// non-pseudo changes; 1.0 for two empty streams.
double diff_similarity(const EditScript& script);

// Sample Pearson correlation. Throws std::invalid_argument when sizes
// mismatch, n < 3, or either side has zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace neardup
