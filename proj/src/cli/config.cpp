#include "ginprod/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

namespace ginprod::cli {

namespace {

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  // dump() writes doubles in round-trip form, so nothing is lost on the way
  // through the option's own parser.
  if (v.is_number()) return v.dump();
  throw ValidationError(key, "config value must be a number, string, boolean or array of those");
}

}  // namespace

void apply_json_config(CLI::App& command, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config", "'" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "top level of '" + path + "' must be an object");

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    CLI::Option* opt = key == "config" ? nullptr : command.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw ValidationError(key, "unknown field in config '" + path + "' for command '" + command.get_name() + "'");
    }
    if (opt->count() > 0) continue;  // the command line wins

    std::vector<std::string> values;
    if (it->is_array()) {
      for (const auto& v : *it) values.push_back(scalar_text(v, key));
    } else {
      values.push_back(scalar_text(*it, key));
    }
    try {
      for (const auto& v : values) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ValidationError(key, std::string("bad value in config: ") + e.what());
    }
  }
}

int resolve_threads(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw ValidationError("threads", "must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("GINPROD_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
      throw ValidationError("threads", std::string("GINPROD_THREADS='") + env + "' is not a positive integer");
    }
    return static_cast<int>(n);
  }
  return omp_get_num_procs();
}

}  // namespace ginprod::cli
