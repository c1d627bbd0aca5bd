#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "neardup/token.hpp"

namespace neardup {

enum class ChangeOp : uint8_t { Equal, Delete, Insert };

struct Change {
  ChangeOp op;
  TokenStream tokens;
  // Pseudo differences are created by chunk alignment: a delete/insert pair
  // carrying identical token text split out of an equal span.
  bool pseudo = false;

  bool operator==(const Change& other) const {
    return op == other.op && pseudo == other.pseudo && tokens == other.tokens;
  }
};

struct EditScript {
  int old_id = 0;
  int new_id = 1;
  std::vector<Change> changes;
  bool budget_exhausted = false;
  std::chrono::microseconds elapsed{0};
};

// An aligned script has the same shape; alignment only splits equal spans
// into equal/pseudo pieces and never touches real differences.
using AlignedScript = EditScript;

// Minimal token-level diff (insert/delete only, no substitutions). If the
// time budget runs out the result degrades to coarser delete+insert blocks,
// sets budget_exhausted, and still reconstructs both sides exactly.
EditScript token_diff(const TokenStream& a, const TokenStream& b,
                      std::chrono::milliseconds budget =
                          std::chrono::milliseconds(1000));

TokenStream reconstruct_old(const EditScript& script);
TokenStream reconstruct_new(const EditScript& script);

// Deleted plus inserted token count over non-pseudo changes.
size_t edit_cost(const EditScript& script);

// True when no change is empty and no two adjacent changes share an op.
bool is_canonical(const EditScript& script);

}  // namespace neardup
