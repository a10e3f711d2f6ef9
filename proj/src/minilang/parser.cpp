#include "forge/minilang/parser.hpp"

#include "forge/minilang/errors.hpp"
#include "forge/minilang/lexer.hpp"

namespace forge::minilang {

const FunctionDecl* Program::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse_program() {
    Program prog;
    while (!at_eof()) {
      expect_keyword("fn");
      prog.functions.push_back(parse_function());
      const FunctionDecl& f = prog.functions.back();
      for (size_t i = 0; i + 1 < prog.functions.size(); ++i)
        if (prog.functions[i].name == f.name)
          throw SyntaxError(fn_name_tok_.line, fn_name_tok_.col,
                            "a function name not declared before");
      if (f.name.rfind("test_", 0) == 0) {
        if (!f.params.empty())
          throw SyntaxError(fn_name_tok_.line, fn_name_tok_.col,
                            "no parameters on a test function");
        prog.tests.insert(f.name);
      }
    }
    return prog;
  }

 private:
  const Token& peek(size_t off = 0) const {
    size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() {
    size_t i = pos_++;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_eof() const { return peek().kind == TokenKind::Eof; }

  bool check_punct(const std::string& p) const {
    return peek().kind == TokenKind::Punctuation && peek().text == p;
  }
  bool check_keyword(const std::string& k) const {
    return peek().kind == TokenKind::Keyword && peek().text == k;
  }
  bool match_punct(const std::string& p) {
    if (!check_punct(p)) return false;
    ++pos_;
    return true;
  }
  const Token& expect_punct(const std::string& p) {
    if (!check_punct(p)) throw SyntaxError(peek().line, peek().col, "'" + p + "'");
    return toks_[pos_++];
  }
  const Token& expect_keyword(const std::string& k) {
    if (!check_keyword(k)) throw SyntaxError(peek().line, peek().col, "'" + k + "'");
    return toks_[pos_++];
  }
  const Token& expect_ident() {
    if (peek().kind != TokenKind::Identifier)
      throw SyntaxError(peek().line, peek().col, "an identifier");
    return toks_[pos_++];
  }

  int add(NodeKind kind, std::string text = "") {
    int id = static_cast<int>(ast_.nodes.size());
    ast_.nodes.push_back({id, kind, std::move(text), {}});
    return id;
  }
  void link(int parent, int child) { ast_.nodes[parent].children.push_back(child); }

  FunctionDecl parse_function() {
    ast_ = Ast{};
    FunctionDecl fn;
    int root = add(NodeKind::Function);
    fn_name_tok_ = expect_ident();
    fn.name = fn_name_tok_.text;
    link(root, add(NodeKind::Ident, fn.name));
    int params = add(NodeKind::Params);
    link(root, params);
    expect_punct("(");
    if (!check_punct(")")) {
      do {
        const Token& p = expect_ident();
        for (const std::string& seen : fn.params)
          if (seen == p.text)
            throw SyntaxError(p.line, p.col, "a parameter name not declared before");
        fn.params.push_back(p.text);
        link(params, add(NodeKind::Ident, p.text));
      } while (match_punct(","));
    }
    expect_punct(")");
    link(root, parse_block());
    ast_.renumber_preorder(root);
    fn.ast = std::move(ast_);
    return fn;
  }

  int parse_block() {
    expect_punct("{");
    int block = add(NodeKind::Block);
    while (!check_punct("}")) {
      if (at_eof()) throw SyntaxError(peek().line, peek().col, "'}'");
      link(block, parse_stmt());
    }
    expect_punct("}");
    return block;
  }

  int parse_stmt() {
    if (check_keyword("if")) return parse_if();
    if (check_keyword("while")) {
      advance();
      int n = add(NodeKind::While);
      expect_punct("(");
      link(n, parse_expr());
      expect_punct(")");
      link(n, parse_block());
      return n;
    }
    if (check_keyword("return")) {
      advance();
      int n = add(NodeKind::Return);
      if (!check_punct(";")) link(n, parse_expr());
      expect_punct(";");
      return n;
    }
    int lhs = parse_expr();
    if (match_punct("=")) {
      NodeKind k = ast_.nodes[lhs].kind;
      if (k != NodeKind::Ident && k != NodeKind::Field && k != NodeKind::Index)
        throw SyntaxError(stmt_tok_line_, stmt_tok_col_,
                          "an assignable target (variable, field, or index)");
      int n = add(NodeKind::Assign);
      link(n, lhs);
      link(n, parse_expr());
      expect_punct(";");
      return n;
    }
    expect_punct(";");
    int n = add(NodeKind::ExprStmt);
    link(n, lhs);
    return n;
  }

  int parse_if() {
    expect_keyword("if");
    int n = add(NodeKind::If);
    expect_punct("(");
    link(n, parse_expr());
    expect_punct(")");
    link(n, parse_block());
    if (check_keyword("else")) {
      advance();
      if (check_keyword("if"))
        link(n, parse_if());
      else
        link(n, parse_block());
    }
    return n;
  }

  int parse_expr() {
    stmt_tok_line_ = peek().line;
    stmt_tok_col_ = peek().col;
    return parse_binary_level(0);
  }

  // Levels: 0 ||, 1 &&, 2 == !=, 3 < <= > >=, 4 + -, 5 * / %.
  int parse_binary_level(int level) {
    static const std::vector<std::vector<std::string>> ops = {
        {"||"}, {"&&"}, {"==", "!="}, {"<", "<=", ">", ">="}, {"+", "-"},
        {"*", "/", "%"}};
    if (level >= static_cast<int>(ops.size())) return parse_unary();
    int lhs = parse_binary_level(level + 1);
    while (true) {
      bool found = false;
      for (const std::string& op : ops[level]) {
        if (check_punct(op)) {
          advance();
          int n = add(NodeKind::Binary);
          link(n, lhs);
          link(n, add(NodeKind::Op, op));
          link(n, parse_binary_level(level + 1));
          lhs = n;
          found = true;
          break;
        }
      }
      if (!found) return lhs;
    }
  }

  int parse_unary() {
    if (check_punct("!") || check_punct("-")) {
      std::string op = advance().text;
      int n = add(NodeKind::Unary);
      link(n, add(NodeKind::Op, op));
      link(n, parse_unary());
      return n;
    }
    return parse_postfix();
  }

  int parse_postfix() {
    int e = parse_primary();
    while (true) {
      if (match_punct("(")) {
        int n = add(NodeKind::Call);
        link(n, e);
        if (!check_punct(")")) {
          do {
            link(n, parse_expr());
          } while (match_punct(","));
        }
        expect_punct(")");
        e = n;
      } else if (match_punct("[")) {
        int n = add(NodeKind::Index);
        link(n, e);
        link(n, parse_expr());
        expect_punct("]");
        e = n;
      } else if (match_punct(".")) {
        const Token& f = expect_ident();
        int n = add(NodeKind::Field);
        link(n, e);
        link(n, add(NodeKind::Ident, f.text));
        e = n;
      } else {
        return e;
      }
    }
  }

  int parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Identifier:
        advance();
        return add(NodeKind::Ident, t.text);
      case TokenKind::IntLiteral:
        advance();
        return add(NodeKind::Int, t.text);
      case TokenKind::FloatLiteral:
        advance();
        return add(NodeKind::Float, t.text);
      case TokenKind::StringLiteral:
        advance();
        return add(NodeKind::Str, t.text);
      case TokenKind::Keyword:
        if (t.text == "null") {
          advance();
          return add(NodeKind::Null, "null");
        }
        break;
      case TokenKind::Punctuation:
        if (t.text == "(") {
          advance();
          int e = parse_expr();
          expect_punct(")");
          return e;
        }
        if (t.text == "[") {
          advance();
          int n = add(NodeKind::Array);
          if (!check_punct("]")) {
            do {
              link(n, parse_expr());
            } while (match_punct(","));
          }
          expect_punct("]");
          return n;
        }
        if (t.text == "{") {
          advance();
          int n = add(NodeKind::Record);
          std::vector<std::string> seen;
          if (!check_punct("}")) {
            do {
              const Token& f = expect_ident();
              for (const std::string& s : seen)
                if (s == f.text)
                  throw SyntaxError(f.line, f.col, "a field name not declared before");
              seen.push_back(f.text);
              expect_punct(":");
              int fi = add(NodeKind::FieldInit);
              link(fi, add(NodeKind::Ident, f.text));
              link(fi, parse_expr());
              link(n, fi);
            } while (match_punct(","));
          }
          expect_punct("}");
          return n;
        }
        break;
      default:
        break;
    }
    throw SyntaxError(t.line, t.col, "an expression");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  Ast ast_;
  Token fn_name_tok_;
  int stmt_tok_line_ = 1, stmt_tok_col_ = 1;
};

}  // namespace

Program parse(const std::string& source) {
  return Parser(lex(source)).parse_program();
}

}  // namespace forge::minilang
