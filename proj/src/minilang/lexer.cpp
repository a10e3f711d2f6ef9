#include "forge/minilang/lexer.hpp"

#include <cctype>

#include "forge/minilang/errors.hpp"

namespace forge::minilang {

namespace {

bool is_keyword(const std::string& s) {
  return s == "fn" || s == "if" || s == "else" || s == "while" ||
         s == "return" || s == "null";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto peek = [&](size_t off = 0) -> char {
    return i + off < src.size() ? src[i + off] : '\0';
  };
  auto advance = [&]() -> char {
    char c = src[i++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  };

  while (i < src.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && peek() != '\n') advance();
      continue;
    }

    int tline = line, tcol = col;
    if (ident_start(c)) {
      std::string text;
      while (i < src.size() && ident_char(peek())) text += advance();
      out.push_back({is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier,
                     text, tline, tcol});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      bool is_float = false;
      while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        is_float = true;
        text += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        size_t save = i;
        std::string exp;
        exp += advance();
        if (peek() == '+' || peek() == '-') exp += advance();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
          is_float = true;
          while (std::isdigit(static_cast<unsigned char>(peek()))) exp += advance();
          text += exp;
        } else {
          i = save;  // bare 'e' begins an identifier, not an exponent
        }
      }
      out.push_back({is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral,
                     text, tline, tcol});
      continue;
    }
    if (c == '"') {
      advance();
      std::string text;
      while (true) {
        if (i >= src.size() || peek() == '\n')
          throw SyntaxError(tline, tcol, "closing '\"'");
        char d = advance();
        if (d == '"') break;
        if (d == '\\') {
          if (i >= src.size()) throw SyntaxError(tline, tcol, "closing '\"'");
          char e = advance();
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case '"': text += '"'; break;
            case '\\': text += '\\'; break;
            default:
              throw SyntaxError(line, col - 2, "escape in {\\n, \\t, \\\", \\\\}");
          }
        } else {
          text += d;
        }
      }
      out.push_back({TokenKind::StringLiteral, text, tline, tcol});
      continue;
    }

    // Punctuation, longest match first.
    static const char* two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
    std::string two{c, peek(1)};
    bool matched = false;
    for (const char* op : two_char) {
      if (two == op) {
        advance();
        advance();
        out.push_back({TokenKind::Punctuation, two, tline, tcol});
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string singles = "(){}[],;:.=<>+-*/%!";
    if (singles.find(c) != std::string::npos) {
      advance();
      out.push_back({TokenKind::Punctuation, std::string(1, c), tline, tcol});
      continue;
    }
    throw SyntaxError(line, col, "a token");
  }
  out.push_back({TokenKind::Eof, "", line, col});
  return out;
}

}  // namespace forge::minilang
