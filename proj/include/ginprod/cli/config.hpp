#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace CLI {
class App;
}

namespace ginprod::cli {

// Bad flags or config contents; maps to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field, const std::string& why)
      : std::runtime_error(field + ": " + why), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Reads a flat JSON object whose keys are the long flag names of `command`
// (without the leading dashes) and fills every option that was not given on
// the command line. Unknown keys, nested objects and nulls are rejected.
void apply_json_config(CLI::App& command, const std::string& path);

// --threads when given, else GINPROD_THREADS, else every available core.
int resolve_threads(std::optional<int> flag);

}  // namespace ginprod::cli
