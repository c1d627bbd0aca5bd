#pragma once

// Independent reference implementations used to check the library. Each one
// is written from the textbook definition, not from the production code, so
// agreement is meaningful: a dynamic-programming edit distance, a
// normal-equations least-squares solver, and encoders for both bitcoin
// address families (the library only decodes).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "neardup/token.hpp"

namespace oracle {

// Insert/delete-only edit distance (no substitutions), O(n*m) DP.
size_t edit_distance(const neardup::TokenStream& a, const neardup::TokenStream& b);

struct Ols {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
};

// Solves the 2x2 normal equations directly via Cramer's rule.
Ols ols_fit(std::span<const double> xs, std::span<const double> ys);

// base58check: version byte + payload, double-sha256 checksum, big-integer
// base58 rendering with leading zeros as '1'.
std::string base58check_encode(uint8_t version,
                               const std::vector<uint8_t>& payload);

// Segwit address for the bc hrp; picks the bech32 constant for witness
// version 0 and the bech32m constant otherwise.
std::string bech32_encode(int witness_version,
                          const std::vector<uint8_t>& program);

}  // namespace oracle
