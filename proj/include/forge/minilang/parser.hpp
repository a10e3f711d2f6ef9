#pragma once

#include <set>
#include <string>
#include <vector>

#include "forge/minilang/ast.hpp"

namespace forge::minilang {

struct FunctionDecl {
  std::string name;
  std::vector<std::string> params;
  Ast ast;  // rooted at a Function node: [Ident(name), Params, Block]
};

struct Program {
  std::vector<FunctionDecl> functions;
  std::set<std::string> tests;  // functions named test_*
  std::set<std::string> core;   // marked for instrumentation by the caller

  const FunctionDecl* find(const std::string& name) const;
};

// Grammar:
//   program   := function*
//   function  := "fn" IDENT "(" (IDENT ("," IDENT)*)? ")" block
//   block     := "{" stmt* "}"
//   stmt      := "if" "(" expr ")" block ("else" (block | if-stmt))?
//              | "while" "(" expr ")" block
//              | "return" expr? ";"
//              | expr ("=" expr)? ";"
//   expr      := or; or := and ("||" and)*; and := eq ("&&" eq)*
//   eq        := cmp (("=="|"!=") cmp)*; cmp := add (("<"|"<="|">"|">=") add)*
//   add       := mul (("+"|"-") mul)*; mul := unary (("*"|"/"|"%") unary)*
//   unary     := ("!"|"-") unary | postfix
//   postfix   := primary ("(" args ")" | "[" expr "]" | "." IDENT)*
//   primary   := IDENT | INT | FLOAT | STRING | "null" | "(" expr ")"
//              | "[" (expr ("," expr)*)? "]"
//              | "{" (IDENT ":" expr ("," IDENT ":" expr)*)? "}"
// Assignment targets must be an identifier, field access, or index.
// Raises SyntaxError with position and expected-set. Also rejects duplicate
// function names and test functions with parameters.
Program parse(const std::string& source);

}  // namespace forge::minilang
