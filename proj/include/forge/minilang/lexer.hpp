#pragma once

#include <string>
#include <vector>

namespace forge::minilang {

enum class TokenKind { Identifier, Keyword, IntLiteral, FloatLiteral, StringLiteral, Punctuation, Eof };

struct Token {
  TokenKind kind;
  std::string text;  // literal text; string literals hold the decoded value
  int line = 1;
  int col = 1;
};

// Tokenizes UTF-8 source. Keywords: fn if else while return null.
// Comments run from // to end of line. Raises SyntaxError on stray bytes,
// unterminated strings, or malformed numbers.
std::vector<Token> lex(const std::string& source);

}  // namespace forge::minilang
