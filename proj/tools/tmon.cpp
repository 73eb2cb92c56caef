#include <iostream>

#include "tmon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tmon::cli::run(args, std::cout, std::cerr);
}
