#include "neardup/similarity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace neardup {

namespace {

constexpr char kGramSep = '\x1f';

bool is_content(const Token& t) {
  return t.kind == TokenKind::Word || t.kind == TokenKind::DecimalNumber ||
         t.kind == TokenKind::DateLike;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

ShingleSet shingle(const TokenStream& tokens, int k, bool content_only) {
  if (k < 1) throw std::invalid_argument("shingle: k must be >= 1");
  std::vector<const std::string*> parts;
  parts.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!content_only || is_content(t)) parts.push_back(&t.text);
  }
  ShingleSet set;
  set.k = k;
  const auto join = [&parts](size_t begin, size_t end) {
    std::string g;
    for (size_t i = begin; i < end; ++i) {
      if (i > begin) g += kGramSep;
      g += *parts[i];
    }
    return g;
  };
  if (parts.size() < static_cast<size_t>(k)) {
    set.grams.insert(join(0, parts.size()));
    return set;
  }
  for (size_t i = 0; i + k <= parts.size(); ++i) {
    set.grams.insert(join(i, i + k));
  }
  return set;
}

double jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.k != b.k) {
    throw std::invalid_argument("jaccard: shingle sizes differ");
  }
  if (a.grams.empty() && b.grams.empty()) return 1.0;
  const auto& small = a.grams.size() <= b.grams.size() ? a : b;
  const auto& large = a.grams.size() <= b.grams.size() ? b : a;
  size_t common = 0;
  for (const auto& g : small.grams) {
    if (large.grams.count(g)) ++common;
  }
  const size_t total = a.grams.size() + b.grams.size() - common;
  return static_cast<double>(common) / static_cast<double>(total);
}

double minhash_estimate(const ShingleSet& a, const ShingleSet& b,
                        int num_hashes, uint64_t seed) {
  if (a.k != b.k) {
    throw std::invalid_argument("minhash_estimate: shingle sizes differ");
  }
  if (num_hashes < 1) {
    throw std::invalid_argument("minhash_estimate: num_hashes must be >= 1");
  }
  if (a.grams.empty() && b.grams.empty()) return 1.0;
  if (a.grams.empty() || b.grams.empty()) return 0.0;

  const auto signature = [&](const ShingleSet& s) {
    std::vector<uint64_t> elems;
    elems.reserve(s.grams.size());
    for (const auto& g : s.grams) elems.push_back(fnv1a(g));
    std::vector<uint64_t> sig(static_cast<size_t>(num_hashes));
    for (int i = 0; i < num_hashes; ++i) {
      const uint64_t key = mix64(seed + 0x6a09e667f3bcc909ull * (i + 1));
      uint64_t best = std::numeric_limits<uint64_t>::max();
      for (uint64_t e : elems) best = std::min(best, mix64(e ^ key));
      sig[static_cast<size_t>(i)] = best;
    }
    return sig;
  };
  const auto sa = signature(a);
  const auto sb = signature(b);
  int agree = 0;
  for (int i = 0; i < num_hashes; ++i) {
    if (sa[static_cast<size_t>(i)] == sb[static_cast<size_t>(i)]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(num_hashes);
}

double diff_similarity(const EditScript& script) {
  size_t old_len = 0, new_len = 0, changed = 0;
  for (const auto& c : script.changes) {
    switch (c.op) {
      case ChangeOp::Equal:
        old_len += c.tokens.size();
        new_len += c.tokens.size();
        break;
      case ChangeOp::Delete:
        old_len += c.tokens.size();
        if (!c.pseudo) changed += c.tokens.size();
        break;
      case ChangeOp::Insert:
        new_len += c.tokens.size();
        if (!c.pseudo) changed += c.tokens.size();
        break;
    }
  }
  if (old_len + new_len == 0) return 1.0;
  return 1.0 - static_cast<double>(changed) /
                   static_cast<double>(old_len + new_len);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("pearson: size mismatch");
  }
  const size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("pearson: need at least 3 points");
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument(
        "pearson: correlation undefined for zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace neardup
