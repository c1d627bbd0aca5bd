#include "neardup/diff.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace neardup {

namespace {

using Clock = std::chrono::steady_clock;

struct DiffState {
  std::span<const int> a;
  std::span<const int> b;
  Clock::time_point deadline;
  bool exhausted = false;
  // (op, start, len); Equal/Delete index into a, Insert into b.
  struct Piece {
    ChangeOp op;
    size_t start;
    size_t len;
  };
  std::vector<Piece> pieces;

  void emit(ChangeOp op, size_t start, size_t len) {
    if (len > 0) pieces.push_back({op, start, len});
  }
};

// Myers middle-snake search over a[a_lo,a_hi) x b[b_lo,b_hi). On success
// stores the split point; returns false when the sequences share nothing or
// the deadline passed (caller falls back to delete+insert, which is minimal
// in the former case and merely coarse in the latter).
bool find_split(DiffState& st, size_t a_lo, size_t a_hi, size_t b_lo,
                size_t b_hi, size_t& split_a, size_t& split_b) {
  const int n = static_cast<int>(a_hi - a_lo);
  const int m = static_cast<int>(b_hi - b_lo);
  const int max_d = (n + m + 1) / 2;
  const int v_offset = max_d;
  const int v_length = 2 * max_d + 1;
  std::vector<int> v1(v_length, -1), v2(v_length, -1);
  v1[v_offset + 1] = 0;
  v2[v_offset + 1] = 0;
  const int delta = n - m;
  const bool front = (delta % 2 != 0);
  int k1start = 0, k1end = 0, k2start = 0, k2end = 0;
  for (int d = 0; d < max_d; ++d) {
    if (Clock::now() > st.deadline) {
      st.exhausted = true;
      return false;
    }
    for (int k1 = -d + k1start; k1 <= d - k1end; k1 += 2) {
      const int k1_off = v_offset + k1;
      int x1 = (k1 == -d || (k1 != d && v1[k1_off - 1] < v1[k1_off + 1]))
                   ? v1[k1_off + 1]
                   : v1[k1_off - 1] + 1;
      int y1 = x1 - k1;
      while (x1 < n && y1 < m && st.a[a_lo + x1] == st.b[b_lo + y1]) {
        ++x1;
        ++y1;
      }
      v1[k1_off] = x1;
      if (x1 > n) {
        k1end += 2;
      } else if (y1 > m) {
        k1start += 2;
      } else if (front) {
        const int k2_off = v_offset + delta - k1;
        if (k2_off >= 0 && k2_off < v_length && v2[k2_off] != -1) {
          if (x1 >= n - v2[k2_off]) {
            split_a = a_lo + x1;
            split_b = b_lo + y1;
            return true;
          }
        }
      }
    }
    for (int k2 = -d + k2start; k2 <= d - k2end; k2 += 2) {
      const int k2_off = v_offset + k2;
      int x2 = (k2 == -d || (k2 != d && v2[k2_off - 1] < v2[k2_off + 1]))
                   ? v2[k2_off + 1]
                   : v2[k2_off - 1] + 1;
      int y2 = x2 - k2;
      while (x2 < n && y2 < m &&
             st.a[a_lo + n - x2 - 1] == st.b[b_lo + m - y2 - 1]) {
        ++x2;
        ++y2;
      }
      v2[k2_off] = x2;
      if (x2 > n) {
        k2end += 2;
      } else if (y2 > m) {
        k2start += 2;
      } else if (!front) {
        const int k1_off = v_offset + delta - k2;
        if (k1_off >= 0 && k1_off < v_length && v1[k1_off] != -1) {
          const int x1 = v1[k1_off];
          const int y1 = x1 - (k1_off - v_offset);
          if (x1 >= n - x2) {
            split_a = a_lo + x1;
            split_b = b_lo + y1;
            return true;
          }
        }
      }
    }
  }
  return false;
}

void diff_range(DiffState& st, size_t a_lo, size_t a_hi, size_t b_lo,
                size_t b_hi) {
  const size_t prefix_start = a_lo;
  while (a_lo < a_hi && b_lo < b_hi && st.a[a_lo] == st.b[b_lo]) {
    ++a_lo;
    ++b_lo;
  }
  st.emit(ChangeOp::Equal, prefix_start, a_lo - prefix_start);
  size_t common_suffix = 0;
  while (a_lo < a_hi && b_lo < b_hi &&
         st.a[a_hi - 1] == st.b[b_hi - 1]) {
    --a_hi;
    --b_hi;
    ++common_suffix;
  }
  if (a_lo == a_hi) {
    st.emit(ChangeOp::Insert, b_lo, b_hi - b_lo);
  } else if (b_lo == b_hi) {
    st.emit(ChangeOp::Delete, a_lo, a_hi - a_lo);
  } else {
    size_t sa = 0, sb = 0;
    if (find_split(st, a_lo, a_hi, b_lo, b_hi, sa, sb)) {
      diff_range(st, a_lo, sa, b_lo, sb);
      diff_range(st, sa, a_hi, sb, b_hi);
    } else {
      st.emit(ChangeOp::Delete, a_lo, a_hi - a_lo);
      st.emit(ChangeOp::Insert, b_lo, b_hi - b_lo);
    }
  }
  if (common_suffix > 0) st.emit(ChangeOp::Equal, a_hi, common_suffix);
}

}  // namespace

EditScript token_diff(const TokenStream& a, const TokenStream& b,
                      std::chrono::milliseconds budget) {
  if (budget.count() <= 0) {
    throw std::invalid_argument("token_diff: budget must be positive");
  }
  const auto started = Clock::now();

  // Map tokens to opaque symbols so the diff works on integers.
  std::unordered_map<std::string_view, int> symbols;
  symbols.reserve(a.size() + b.size());
  std::vector<int> xs, ys;
  xs.reserve(a.size());
  ys.reserve(b.size());
  const auto intern = [&symbols](const Token& t) {
    const auto [it, inserted] = symbols.try_emplace(
        std::string_view(t.text), static_cast<int>(symbols.size()));
    (void)inserted;
    return it->second;
  };
  for (const auto& t : a) xs.push_back(intern(t));
  for (const auto& t : b) ys.push_back(intern(t));

  DiffState st;
  st.a = xs;
  st.b = ys;
  st.deadline = started + budget;

  diff_range(st, 0, xs.size(), 0, ys.size());

  // Canonicalize: coalesce runs and order each difference site as
  // deletes-then-inserts.
  EditScript script;
  script.budget_exhausted = st.exhausted;
  auto& changes = script.changes;
  const auto slice = [](const TokenStream& src, size_t start,
                        size_t len) {
    return TokenStream(src.begin() + static_cast<long>(start),
                       src.begin() + static_cast<long>(start + len));
  };
  size_t i = 0;
  while (i < st.pieces.size()) {
    if (st.pieces[i].op == ChangeOp::Equal) {
      TokenStream toks;
      while (i < st.pieces.size() && st.pieces[i].op == ChangeOp::Equal) {
        auto part = slice(a, st.pieces[i].start, st.pieces[i].len);
        toks.insert(toks.end(), part.begin(), part.end());
        ++i;
      }
      changes.push_back({ChangeOp::Equal, std::move(toks), false});
    } else {
      TokenStream dels, inss;
      while (i < st.pieces.size() && st.pieces[i].op != ChangeOp::Equal) {
        const auto& p = st.pieces[i];
        if (p.op == ChangeOp::Delete) {
          auto part = slice(a, p.start, p.len);
          dels.insert(dels.end(), part.begin(), part.end());
        } else {
          auto part = slice(b, p.start, p.len);
          inss.insert(inss.end(), part.begin(), part.end());
        }
        ++i;
      }
      if (!dels.empty())
        changes.push_back({ChangeOp::Delete, std::move(dels), false});
      if (!inss.empty())
        changes.push_back({ChangeOp::Insert, std::move(inss), false});
    }
  }

  script.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
      Clock::now() - started);
  return script;
}

TokenStream reconstruct_old(const EditScript& script) {
  TokenStream out;
  for (const auto& c : script.changes) {
    if (c.op == ChangeOp::Equal || c.op == ChangeOp::Delete) {
      out.insert(out.end(), c.tokens.begin(), c.tokens.end());
    }
  }
  return out;
}

TokenStream reconstruct_new(const EditScript& script) {
  TokenStream out;
  for (const auto& c : script.changes) {
    if (c.op == ChangeOp::Equal || c.op == ChangeOp::Insert) {
      out.insert(out.end(), c.tokens.begin(), c.tokens.end());
    }
  }
  return out;
}

size_t edit_cost(const EditScript& script) {
  size_t cost = 0;
  for (const auto& c : script.changes) {
    if (!c.pseudo && c.op != ChangeOp::Equal) cost += c.tokens.size();
  }
  return cost;
}

bool is_canonical(const EditScript& script) {
  for (size_t i = 0; i < script.changes.size(); ++i) {
    if (script.changes[i].tokens.empty()) return false;
    if (i > 0 && script.changes[i].op == script.changes[i - 1].op)
      return false;
  }
  return true;
}

}  // namespace neardup
