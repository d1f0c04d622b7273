#include "vql/lexer.h"

#include <array>
#include <cctype>

#include "common/error.h"
#include "common/strings.h"

namespace vizcot::vql {

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

constexpr std::array<std::string_view, 17> kReserved = {
    "VISUALIZE", "SELECT", "FROM", "WHERE", "GROUP", "ORDER", "BIN", "LIMIT", "JOIN",
    "ON",        "AND",    "OR",   "IN",    "AS",    "LIKE",  "BY",  "NOT"};

}  // namespace

bool is_reserved_word(std::string_view word) {
  for (auto r : kReserved) {
    if (iequals(r, word)) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < src.size()) {
    auto c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    Token tok;
    tok.offset = i;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(static_cast<unsigned char>(src[j]))) ++j;
      tok.type = TokenType::kIdentifier;
      tok.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (std::isdigit(c) ||
               (c == '.' && i + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      if (j < src.size() && is_ident_start(static_cast<unsigned char>(src[j]))) {
        throw ParseError("malformed number", i);
      }
      tok.type = TokenType::kNumber;
      tok.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"' || c == '`') {
      // Doubling the quote character escapes it.
      char quote = static_cast<char>(c);
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < src.size()) {
        if (src[j] == quote) {
          if (j + 1 < src.size() && src[j + 1] == quote) {
            value.push_back(quote);
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        value.push_back(src[j]);
        ++j;
      }
      if (!closed) {
        throw ParseError(quote == '`' ? "unterminated quoted identifier" : "unterminated string",
                         i);
      }
      tok.type = quote == '`' ? TokenType::kQuotedIdentifier : TokenType::kString;
      tok.text = std::move(value);
      i = j;
    } else {
      switch (c) {
        case ',': tok.type = TokenType::kComma; break;
        case '.': tok.type = TokenType::kDot; break;
        case '(': tok.type = TokenType::kLParen; break;
        case ')': tok.type = TokenType::kRParen; break;
        case '*': tok.type = TokenType::kStar; break;
        case '-': tok.type = TokenType::kMinus; break;
        case '=': tok.type = TokenType::kOperator; tok.text = "="; break;
        case '!':
          if (i + 1 < src.size() && src[i + 1] == '=') {
            tok.type = TokenType::kOperator;
            tok.text = "!=";
            ++i;
            break;
          }
          throw ParseError("unexpected character '!'", i);
        case '<':
          tok.type = TokenType::kOperator;
          tok.text = "<";
          if (i + 1 < src.size() && (src[i + 1] == '=' || src[i + 1] == '>')) {
            tok.text = src[i + 1] == '=' ? "<=" : "!=";
            ++i;
          }
          break;
        case '>':
          tok.type = TokenType::kOperator;
          tok.text = ">";
          if (i + 1 < src.size() && src[i + 1] == '=') {
            tok.text = ">=";
            ++i;
          }
          break;
        case ';':
          // A single trailing semicolon is tolerated; anything after it is not.
          tok.type = TokenType::kEnd;
          break;
        default:
          throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", i);
      }
      if (tok.type == TokenType::kEnd) {
        for (std::size_t j = i + 1; j < src.size(); ++j) {
          if (!std::isspace(static_cast<unsigned char>(src[j]))) {
            throw ParseError("unexpected input after ';'", j);
          }
        }
        break;
      }
      ++i;
    }
    tokens.push_back(std::move(tok));
  }
  tokens.push_back(Token{TokenType::kEnd, "", src.size()});
  return tokens;
}

}  // namespace vizcot::vql
