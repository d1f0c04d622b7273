#ifndef VIZCOT_VQL_LEXER_H_
#define VIZCOT_VQL_LEXER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vizcot::vql {

enum class TokenType {
  kIdentifier,
  kQuotedIdentifier,
  kNumber,
  kString,
  kComma,
  kDot,
  kLParen,
  kRParen,
  kStar,
  kMinus,
  kOperator,
  kEnd,
};

struct Token {
  TokenType type = TokenType::kEnd;
  std::string text;  // identifier/operator text, or string contents unquoted
  std::size_t offset = 0;
};

/// Splits VQL source into tokens. Throws ParseError on unterminated strings
/// and stray characters.
std::vector<Token> tokenize(std::string_view source);

/// True for words that can never be bare identifiers.
bool is_reserved_word(std::string_view word);

}  // namespace vizcot::vql

#endif  // VIZCOT_VQL_LEXER_H_
