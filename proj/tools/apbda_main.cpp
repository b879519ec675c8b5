#include <iostream>
#include <string>
#include <vector>

#include "apbda/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return apbda::run_cli(args, std::cout, std::cerr);
}
