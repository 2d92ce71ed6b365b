#include <iostream>
#include <string>
#include <vector>

#include "leggett/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return leggett::cli::run(args, std::cout, std::cerr);
}
