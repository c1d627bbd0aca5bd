#include "neardup/align.hpp"

#include <algorithm>
#include <cstdint>

namespace neardup {

namespace {

// Half-open token ranges, kept sorted and disjoint.
using Range = std::pair<int64_t, int64_t>;
using Ranges = std::vector<Range>;

Ranges merge_ranges(Ranges ranges) {
  if (ranges.empty()) return ranges;
  std::sort(ranges.begin(), ranges.end());
  Ranges out;
  out.push_back(ranges[0]);
  for (size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first <= out.back().second) {
      out.back().second = std::max(out.back().second, ranges[i].second);
    } else {
      out.push_back(ranges[i]);
    }
  }
  return out;
}

struct EqualSpan {
  int64_t old_start;
  int64_t new_start;
  int64_t len;
};

std::vector<EqualSpan> equal_spans(const AlignedScript& s) {
  std::vector<EqualSpan> spans;
  int64_t o = 0, n = 0;
  for (const auto& c : s.changes) {
    const auto len = static_cast<int64_t>(c.tokens.size());
    switch (c.op) {
      case ChangeOp::Equal:
        spans.push_back({o, n, len});
        o += len;
        n += len;
        break;
      case ChangeOp::Delete:
        o += len;
        break;
      case ChangeOp::Insert:
        n += len;
        break;
    }
  }
  return spans;
}

// Keeps only the parts of `ranges` that fall inside equal spans of `s`
// (parts landing in differences are absorbed) and shifts them into the
// other side's frame.
Ranges map_through(const std::vector<EqualSpan>& spans, const Ranges& ranges,
                   bool old_to_new) {
  Ranges out;
  size_t k = 0;  // spans and ranges are both sorted in source coordinates
  for (const auto& r : ranges) {
    while (k < spans.size()) {
      const auto& sp = spans[k];
      const int64_t src = old_to_new ? sp.old_start : sp.new_start;
      if (src + sp.len <= r.first) {
        ++k;
        continue;
      }
      break;
    }
    for (size_t j = k; j < spans.size(); ++j) {
      const auto& sp = spans[j];
      const int64_t src = old_to_new ? sp.old_start : sp.new_start;
      if (src >= r.second) break;
      const int64_t dst = old_to_new ? sp.new_start : sp.old_start;
      const int64_t lo = std::max(r.first, src);
      const int64_t hi = std::min(r.second, src + sp.len);
      if (lo < hi) out.push_back({lo - src + dst, hi - src + dst});
    }
  }
  return merge_ranges(out);
}

// Difference ranges a script contributes to its own frames.
void collect_ranges(const AlignedScript& s, Ranges& old_frame,
                    Ranges& new_frame) {
  int64_t o = 0, n = 0;
  for (const auto& c : s.changes) {
    const auto len = static_cast<int64_t>(c.tokens.size());
    switch (c.op) {
      case ChangeOp::Equal:
        o += len;
        n += len;
        break;
      case ChangeOp::Delete:
        old_frame.push_back({o, o + len});
        o += len;
        break;
      case ChangeOp::Insert:
        new_frame.push_back({n, n + len});
        n += len;
        break;
    }
  }
}

// Splits the equal spans of `s` wherever `covered` (old-frame coordinates)
// intersects them, re-emitting the covered tokens as pseudo differences.
AlignedScript carve(const AlignedScript& s, const Ranges& covered) {
  AlignedScript out;
  out.old_id = s.old_id;
  out.new_id = s.new_id;
  out.budget_exhausted = s.budget_exhausted;
  out.elapsed = s.elapsed;
  int64_t o = 0;
  size_t ri = 0;
  for (const auto& c : s.changes) {
    const auto len = static_cast<int64_t>(c.tokens.size());
    if (c.op != ChangeOp::Equal) {
      out.changes.push_back(c);
      if (c.op == ChangeOp::Delete) o += len;
      continue;
    }
    while (ri < covered.size() && covered[ri].second <= o) ++ri;
    int64_t pos = o;  // absolute old-frame cursor within this span
    size_t rj = ri;
    const int64_t span_end = o + len;
    while (pos < span_end) {
      int64_t next_lo = span_end, next_hi = span_end;
      if (rj < covered.size() && covered[rj].first < span_end) {
        next_lo = std::max(covered[rj].first, pos);
        next_hi = std::min(covered[rj].second, span_end);
      }
      if (pos < next_lo) {
        TokenStream eq(c.tokens.begin() + (pos - o),
                       c.tokens.begin() + (next_lo - o));
        out.changes.push_back({ChangeOp::Equal, std::move(eq), false});
        pos = next_lo;
      }
      if (pos < next_hi) {
        TokenStream part(c.tokens.begin() + (pos - o),
                         c.tokens.begin() + (next_hi - o));
        out.changes.push_back({ChangeOp::Delete, part, true});
        out.changes.push_back({ChangeOp::Insert, std::move(part), true});
        pos = next_hi;
        ++rj;
      }
    }
    o = span_end;
  }
  return out;
}

}  // namespace

std::vector<std::pair<size_t, size_t>> chunk_bounds(size_t script_count,
                                                    int chunk_size) {
  std::vector<std::pair<size_t, size_t>> bounds;
  if (script_count == 0) return bounds;
  if (chunk_size == 0) {
    bounds.push_back({0, script_count});
    return bounds;
  }
  const auto step = static_cast<size_t>(chunk_size);
  for (size_t begin = 0; begin < script_count; begin += step) {
    bounds.push_back({begin, std::min(begin + step, script_count)});
  }
  return bounds;
}

std::vector<AlignedScript> align_chunk(std::vector<AlignedScript> scripts,
                                       const AlignmentConfig& config) {
  if (config.chunk_size == 0) return scripts;
  if (config.chunk_size < 2) {
    throw std::invalid_argument("align_chunk: chunk_size must be 0 or >= 2");
  }
  if (scripts.size() > static_cast<size_t>(config.chunk_size)) {
    throw std::invalid_argument("align_chunk: more scripts than chunk_size");
  }
  if (scripts.size() < 2) return scripts;

  const size_t m = scripts.size();
  for (size_t i = 0; i + 1 < m; ++i) {
    const TokenStream left = reconstruct_new(scripts[i]);
    const TokenStream right = reconstruct_old(scripts[i + 1]);
    if (left != right) {
      throw ChainMismatchError(
          scripts[i].new_id, scripts[i + 1].old_id,
          "align_chunk: version " + std::to_string(scripts[i].new_id) +
              " (new side of one script) does not match version " +
              std::to_string(scripts[i + 1].old_id) +
              " (old side of the next)");
    }
  }

  std::vector<std::vector<EqualSpan>> spans;
  spans.reserve(m);
  for (const auto& s : scripts) spans.push_back(equal_spans(s));

  // frames[k]: difference ranges in version-k coordinates, where version k
  // is the new side of script k-1 and the old side of script k.
  std::vector<Ranges> frames(m + 1);
  for (size_t i = 0; i < m; ++i) {
    collect_ranges(scripts[i], frames[i], frames[i + 1]);
  }
  for (auto& f : frames) f = merge_ranges(std::move(f));

  // One forward and one backward pass close the propagation transitively.
  for (size_t i = 0; i < m; ++i) {
    Ranges mapped = map_through(spans[i], frames[i], /*old_to_new=*/true);
    mapped.insert(mapped.end(), frames[i + 1].begin(), frames[i + 1].end());
    frames[i + 1] = merge_ranges(std::move(mapped));
  }
  for (size_t i = m; i-- > 0;) {
    Ranges mapped = map_through(spans[i], frames[i + 1], /*old_to_new=*/false);
    mapped.insert(mapped.end(), frames[i].begin(), frames[i].end());
    frames[i] = merge_ranges(std::move(mapped));
  }

  std::vector<AlignedScript> out;
  out.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    out.push_back(carve(scripts[i], frames[i]));
  }
  return out;
}

size_t pseudo_difference_count(const AlignedScript& script) {
  size_t count = 0;
  for (const auto& c : script.changes) {
    if (c.pseudo && c.op == ChangeOp::Delete) ++count;
  }
  return count;
}

}  // namespace neardup
