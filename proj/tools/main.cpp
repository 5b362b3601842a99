#include <iostream>
#include <string>
#include <vector>

#include "gramdyn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gramdyn::cli::main(args, std::cout, std::cerr);
}
