// Runs every acceptance criterion and prints one PASS/FAIL line each.
#include <iostream>

#include "ginprod/cli/acceptance.hpp"
#include "ginprod/cli/commands.hpp"

int main() {
  const int failed = ginprod::acceptance::run_suite("all", {}, std::cout);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? ginprod::cli::kExitOk : ginprod::cli::kExitAcceptance;
}
