#include <iostream>
#include <string>
#include <vector>

#include "ginprod/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ginprod::cli::run(args, std::cout, std::cerr);
}
