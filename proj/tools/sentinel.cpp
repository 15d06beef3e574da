#include <iostream>

#include "sentinel/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sentinel::cli::run(args, std::cout, std::cerr);
}
