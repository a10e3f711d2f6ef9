#include <string>
#include <vector>

#include "forge/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return forge::cli::dispatch(args);
}
