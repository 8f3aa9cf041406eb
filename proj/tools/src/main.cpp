#include <iostream>

#include "somite/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return somite::cli_run(args, std::cout, std::cerr);
}
