#include <iostream>
#include <string>
#include <vector>

#include "eipe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return eipe::cli::run_cli(args, std::cout, std::cerr);
}
