#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Base for every domain error the pipeline can raise. The CLI maps these to
// exit code 1; anything else escaping main is a bug.
class ForgeError : public std::runtime_error {
 public:
  explicit ForgeError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (trace, invariant, graph, checkpoint, config).
class FormatError : public ForgeError {
 public:
  FormatError(const std::string& where, const std::string& reason)
      : ForgeError(where + ": " + reason) {}
};

}  // namespace forge
