#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ginprod::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitAcceptance = 4,
};

// Whole command line, argv[0] included. Output without --output goes to
// `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ginprod::cli
