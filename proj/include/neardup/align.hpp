#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "neardup/diff.hpp"

namespace neardup {

struct AlignmentConfig {
  // Number of consecutive scripts aligned together. 0 disables alignment;
  // otherwise the value must be at least 2.
  int chunk_size = 10;
};

struct ChainMismatchError : std::runtime_error {
  ChainMismatchError(int old_id_, int new_id_, const std::string& what)
      : std::runtime_error(what), old_id(old_id_), new_id(new_id_) {}
  int old_id;
  int new_id;
};

// Consecutive [begin, end) groups of chunk_size scripts. chunk_size 0 maps
// everything to a single pass-through group.
std::vector<std::pair<size_t, size_t>> chunk_bounds(size_t script_count,
                                                    int chunk_size);

// Propagates every real difference across the chunk: where one script
// changes and another keeps the same token range as common text, the common
// text is split and re-emitted as a pseudo difference (identical delete and
// insert). Requires script i's new side to equal script i+1's old side
// token for token; otherwise throws ChainMismatchError naming the pair.
// Equal spans are only ever split, never merged or moved, and real
// differences pass through untouched.
std::vector<AlignedScript> align_chunk(std::vector<AlignedScript> scripts,
                                       const AlignmentConfig& config);

// Pseudo delete+insert pair count in a script.
size_t pseudo_difference_count(const AlignedScript& script);

}  // namespace neardup
