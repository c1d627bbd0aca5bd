#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace neardup {

enum class TokenKind : uint8_t {
  DateLike,        // (?:\d{1,4}[./-]){2}\d{1,4}
  DecimalNumber,   // \d+.\d+ with . as any char except newline
  Word,            // run of word characters
  Whitespace,      // run of whitespace characters
  OtherSingleChar  // any single remaining character
};

struct Token {
  std::string text;
  TokenKind kind;

  bool operator==(const Token& other) const { return text == other.text; }
};

using TokenStream = std::vector<Token>;

// Splits text into tokens. The five token shapes are tried in the order
// listed in TokenKind at each position, each with greedy backtracking
// semantics; concatenating the results reproduces the input byte for byte.
TokenStream tokenize(std::string_view text);

std::string detokenize(const TokenStream& tokens);

const char* token_kind_name(TokenKind kind);

}  // namespace neardup
