#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ginprod::acceptance {

struct Options {
  // Every "error <= tol" check compares against tol * tolerance_scale.
  // Zero is the failure-injection hook used by the negative-control test.
  double tolerance_scale = 1.0;
};

struct Outcome {
  int id = 0;
  std::string name;
  bool passed = false;
  bool within_budget = true;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

// Suites: all, edges, density, stieltjes, kernel, montecarlo, or a single
// criterion number ("7").
std::vector<std::string> suite_names();
std::vector<int> criteria_in(const std::string& suite);  // DomainError when unknown

Outcome run_criterion(int id, const Options& opts = {});

// One line, e.g. "PASS  3 normalization  max|m0-1|=2.2e-16 tol=1e-08  (0.04 s / 30 s)".
std::string format_line(const Outcome& o);

// Prints one line per criterion as it finishes. Returns the number failed.
int run_suite(const std::string& suite, const Options& opts, std::ostream& out);

}  // namespace ginprod::acceptance
