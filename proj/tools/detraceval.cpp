#include <iostream>
#include <string>
#include <vector>

#include "detraceval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return detraceval::cli::run(args, std::cout, std::cerr);
}
