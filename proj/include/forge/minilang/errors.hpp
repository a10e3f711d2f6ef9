#pragma once

#include <string>
#include <vector>

#include "forge/error.hpp"

namespace forge::minilang {

class SyntaxError : public ForgeError {
 public:
  SyntaxError(int line, int col, std::string expected)
      : ForgeError("syntax error at " + std::to_string(line) + ":" +
                   std::to_string(col) + ", expected " + expected),
        line(line),
        col(col),
        expected(std::move(expected)) {}

  int line;
  int col;
  std::string expected;
};

// Raised by the interpreter; run_tests records it against the failing test
// instead of aborting the run.
class RuntimeError : public ForgeError {
 public:
  explicit RuntimeError(const std::string& message) : ForgeError(message) {}
};

}  // namespace forge::minilang
