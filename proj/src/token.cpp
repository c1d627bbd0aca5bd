#include "neardup/token.hpp"

#include <algorithm>
#include <array>

namespace neardup {

namespace {

constexpr bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

struct Codepoint {
  uint32_t value;
  size_t length;  // bytes consumed; 1 for invalid sequences
  bool valid;
};

Codepoint decode_utf8(std::string_view s, size_t i) {
  const auto b0 = static_cast<uint8_t>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
  size_t need = 0;
  uint32_t cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    need = 1;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    need = 2;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    return {b0, 1, false};
  }
  if (i + need >= s.size()) return {b0, 1, false};
  for (size_t k = 1; k <= need; ++k) {
    const auto bk = static_cast<uint8_t>(s[i + k]);
    if ((bk & 0xc0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (bk & 0x3f);
  }
  // reject overlong encodings and surrogates
  static constexpr uint32_t min_for_len[4] = {0, 0x80, 0x800, 0x10000};
  if (cp < min_for_len[need] || (cp >= 0xd800 && cp <= 0xdfff) ||
      cp > 0x10ffff) {
    return {b0, 1, false};
  }
  return {cp, need + 1, true};
}

bool is_space_cp(uint32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0a:
    case 0x0b:
    case 0x0c:
    case 0x0d:
    case 0x20:
    case 0x85:
    case 0xa0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202f:
    case 0x205f:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

// Non-ASCII codepoints count as word characters unless they fall into the
// common punctuation / symbol / currency blocks below. Currency symbols in
// particular must stay separate tokens so that price contexts survive.
bool is_symbol_or_punct_cp(uint32_t cp) {
  struct Range {
    uint32_t lo, hi;
  };
  static constexpr std::array<Range, 14> ranges{{
      {0x0080, 0x00bf},    // C1 controls + Latin-1 punctuation and signs
      {0x00d7, 0x00d7},    // multiplication sign
      {0x00f7, 0x00f7},    // division sign
      {0x2000, 0x206f},    // general punctuation
      {0x20a0, 0x20cf},    // currency symbols
      {0x2100, 0x2bff},    // letterlike symbols .. misc symbols and arrows
      {0x2e00, 0x2e7f},    // supplemental punctuation
      {0x3000, 0x303f},    // CJK symbols and punctuation
      {0xfe10, 0xfe1f},    // vertical forms
      {0xfe30, 0xfe6f},    // CJK compatibility forms, small form variants
      {0xff01, 0xff0f},    // fullwidth punctuation
      {0xff1a, 0xff20},    {0xff3b, 0xff40},
      {0x1f000, 0x1faff},  // emoji and game symbols
  }};
  for (const auto& r : ranges) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

bool is_word_cp(uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z') || cp == '_';
  }
  return !is_space_cp(cp) && !is_symbol_or_punct_cp(cp);
}

size_t digits_at(std::string_view s, size_t i) {
  size_t n = 0;
  while (i + n < s.size() && is_ascii_digit(s[i + n])) ++n;
  return n;
}

// (?:\d{1,4}[./-]){2}\d{1,4} with greedy backtracking on each \d{1,4}.
// Returns the match length or 0.
size_t match_date(std::string_view s, size_t pos) {
  const auto sep_ok = [](char c) { return c == '.' || c == '/' || c == '-'; };
  const size_t d0 = std::min<size_t>(digits_at(s, pos), 4);
  for (size_t a = d0; a >= 1; --a) {
    const size_t pa = pos + a;
    if (pa >= s.size() || !sep_ok(s[pa])) continue;
    const size_t d1 = std::min<size_t>(digits_at(s, pa + 1), 4);
    for (size_t b = d1; b >= 1; --b) {
      const size_t pb = pa + 1 + b;
      if (pb >= s.size() || !sep_ok(s[pb])) continue;
      const size_t c = std::min<size_t>(digits_at(s, pb + 1), 4);
      if (c >= 1) return pb + 1 + c - pos;
    }
  }
  return 0;
}

// \d+.\d+ where . is any single character except '\n' (a full codepoint).
size_t match_decimal(std::string_view s, size_t pos) {
  const size_t d0 = digits_at(s, pos);
  for (size_t a = d0; a >= 1; --a) {
    const size_t mid = pos + a;
    if (mid >= s.size() || s[mid] == '\n') continue;
    const size_t mid_len = decode_utf8(s, mid).length;
    const size_t tail = digits_at(s, mid + mid_len);
    if (tail >= 1) return a + mid_len + tail;
  }
  return 0;
}

size_t match_run(std::string_view s, size_t pos, bool (*pred)(uint32_t)) {
  size_t i = pos;
  while (i < s.size()) {
    const Codepoint cp = decode_utf8(s, i);
    if (!cp.valid || !pred(cp.value)) break;
    i += cp.length;
  }
  return i - pos;
}

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  size_t pos = 0;
  while (pos < text.size()) {
    if (size_t n = match_date(text, pos)) {
      out.push_back({std::string(text.substr(pos, n)), TokenKind::DateLike});
      pos += n;
      continue;
    }
    if (size_t n = match_decimal(text, pos)) {
      out.push_back(
          {std::string(text.substr(pos, n)), TokenKind::DecimalNumber});
      pos += n;
      continue;
    }
    if (size_t n = match_run(text, pos, is_word_cp)) {
      out.push_back({std::string(text.substr(pos, n)), TokenKind::Word});
      pos += n;
      continue;
    }
    if (size_t n = match_run(text, pos, is_space_cp)) {
      out.push_back({std::string(text.substr(pos, n)), TokenKind::Whitespace});
      pos += n;
      continue;
    }
    const Codepoint cp = decode_utf8(text, pos);
    const size_t n = cp.valid ? cp.length : 1;
    out.push_back(
        {std::string(text.substr(pos, n)), TokenKind::OtherSingleChar});
    pos += n;
  }
  return out;
}

std::string detokenize(const TokenStream& tokens) {
  std::string s;
  size_t total = 0;
  for (const auto& t : tokens) total += t.text.size();
  s.reserve(total);
  for (const auto& t : tokens) s += t.text;
  return s;
}

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::DateLike:
      return "date-like";
    case TokenKind::DecimalNumber:
      return "decimal-number";
    case TokenKind::Word:
      return "word";
    case TokenKind::Whitespace:
      return "whitespace";
    case TokenKind::OtherSingleChar:
      return "other-single-char";
  }
  return "unknown";
}

}  // namespace neardup
