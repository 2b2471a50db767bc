#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginprod/cli/commands.hpp"
#include "ginprod/cli/config.hpp"
#include "ginprod/cli/csv.hpp"
#include "ginprod/density.hpp"

using namespace ginprod;
namespace fs = std::filesystem;

namespace {
struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ginprod");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(std::strtod(f.c_str(), nullptr));
  return v;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ginprod_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
}  // namespace

TEST_CASE("number formatting") {
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  CHECK(cli::format_double(4.0) == "4");
  CHECK(cli::format_double(std::nan("")) == "nan");
  CHECK(cli::format_double(-INFINITY) == "-inf");
}

TEST_CASE("edges") {
  auto r = run({"edges", "--M", "1", "--y", "1"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "M,y,x_minus,x_plus");
  CHECK(ls[1] == "1,1,0,4");
  CHECK(r.out.find('\r') == std::string::npos);

  r = run({"edges", "--M", "2", "--y", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["x_plus"].get<double>() == doctest::Approx(6.75).epsilon(1e-14));

  r = run({"edges", "--M", "1", "--y", "0.5"});
  auto row = fields(lines(r.out)[1]);
  CHECK(row[2] == doctest::Approx(1.5 - std::sqrt(2.0)).epsilon(1e-13));
  CHECK(row[3] == doctest::Approx(1.5 + std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("validation errors exit 2 and name the field") {
  auto r = run({"edges", "--M", "1", "--y", "1.5"});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("y") != std::string::npos);
  CHECK(run({"edges", "--M", "0", "--y", "1"}).code == cli::kExitValidation);
  CHECK(run({"edges", "--M", "1"}).code == cli::kExitValidation);
  CHECK(run({"edges", "--M", "1", "--y", "1", "--bogus"}).code == cli::kExitValidation);
  CHECK(run({"nonsense"}).code == cli::kExitValidation);
  CHECK(run({}).code == cli::kExitValidation);
  CHECK(run({"edges", "--M", "1", "--y", "1", "--threads", "0"}).code == cli::kExitValidation);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("density output") {
  auto r = run({"density", "--M", "1", "--y", "1", "--x-min", "-0.5", "--x-max", "4.5", "--points", "11"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 12);
  CHECK(ls[0] == "x,rho,theta,admissible");
  // x = -0.5 and 4.5 are off the support.
  CHECK(ls[1] == "-0.5,0,nan,0");
  CHECK(ls[11] == "4.5,0,nan,0");
  // x = 2: MP density sqrt(x(4-x))/(2 pi x) = 1/(2 pi).
  auto mid = fields(ls[6]);
  CHECK(mid[0] == 2.0);
  CHECK(mid[1] == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-10));
  CHECK(mid[3] == 1.0);
  for (std::size_t i = 2; i <= 10; ++i) {
    auto row = fields(ls[i]);
    CHECK(row[1] == doctest::Approx(density::density_at(density::ModelParams(1, 1.0), row[0])).epsilon(1e-12));
  }
}

TEST_CASE("stieltjes output") {
  const std::vector<std::string> grid{"--x-min", "0.5", "--x-max", "5", "--points", "7"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), grid.begin(), grid.end());
    return run(a);
  };
  auto eq = with({"stieltjes", "--ratios", "0.5,0.5"});
  REQUIRE(eq.code == 0);
  auto ls = lines(eq.out);
  CHECK(ls[0] == "x,density,residual");
  REQUIRE(ls.size() == 8);
  const density::ModelParams p(2, 0.5);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto row = fields(ls[i]);
    CHECK(std::abs(row[1] - density::density_at(p, row[0])) <= 1e-6);
    CHECK(row[2] <= 1e-10);
  }

  auto a = with({"stieltjes", "--ratios", "0.3,0.9,0.6"});
  auto b = with({"stieltjes", "--ratios", "0.9,0.6,0.3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  auto z = run({"stieltjes", "--ratios", "1", "--z", "2,1"});
  REQUIRE(z.code == 0);
  CHECK(lines(z.out)[0] == "z_re,z_im,G_re,G_im,residual");
  CHECK(run({"stieltjes", "--ratios", "1", "--z", "2,0"}).code == cli::kExitValidation);
  CHECK(run({"stieltjes", "--ratios", "1.2"}).code == cli::kExitValidation);
}

TEST_CASE("config file precedence and unknown fields") {
  const fs::path cfg = scratch("edges.json");
  write_file(cfg, R"({"M": 2, "y": 1})");
  auto r = run({"edges", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[1] == "2,1,0,6.75");
  // Command-line flags win over the file.
  r = run({"edges", "--config", cfg.string(), "--M", "1"});
  CHECK(lines(r.out)[1] == "1,1,0,4");

  write_file(cfg, R"({"M": 2, "y": 1, "colour": "red"})");
  r = run({"edges", "--config", cfg.string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("colour") != std::string::npos);

  write_file(cfg, R"({"N": 4, "nu": [4, 4], "trials": 2})");
  r = run({"sample", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 9);

  CHECK(run({"edges", "--config", scratch("missing.json").string()}).code == cli::kExitValidation);
}

TEST_CASE("thread count resolution") {
  CHECK(cli::resolve_threads(3) == 3);
  CHECK_THROWS_AS(cli::resolve_threads(0), cli::ValidationError);
  setenv("GINPROD_THREADS", "2", 1);
  CHECK(cli::resolve_threads(std::nullopt) == 2);
  CHECK(cli::resolve_threads(5) == 5);
  setenv("GINPROD_THREADS", "many", 1);
  CHECK_THROWS_AS(cli::resolve_threads(std::nullopt), cli::ValidationError);
  CHECK(run({"edges", "--M", "1", "--y", "1"}).code == cli::kExitValidation);
  unsetenv("GINPROD_THREADS");
  CHECK(cli::resolve_threads(std::nullopt) >= 1);
}

TEST_CASE("sample output is reproducible across thread counts") {
  const std::vector<std::string> base{"sample", "--N", "12", "--nu", "12,12", "--trials", "6", "--seed", "42"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  auto one = with({"--threads", "1"});
  auto four = with({"--threads", "4"});
  auto serial = with({"--serial"});
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(one.out == serial.out);
  auto ls = lines(one.out);
  CHECK(ls[0] == "trial,index,value,log_value");
  CHECK(ls.size() == 1 + 6 * 12);
  CHECK(with({"--seed", "43"}).out != one.out);

  const fs::path stats = scratch("stats.json");
  auto r = with({"--stats", stats.string()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(read_file(stats));
  CHECK(doc["seed"] == 42);
  CHECK(doc["pooled_count"] == 72);
  CHECK(doc["y"].get<double>() == 0.5);
  CHECK(doc["ks"].get<double>() >= 0.0);
  REQUIRE(doc["moments"].size() == 4);
  CHECK(doc["moments"][0]["theory"].get<double>() == doctest::Approx(1.0));

  // Mixed ratios need an explicit reference law.
  CHECK(run({"sample", "--N", "4", "--nu", "0,4"}).code == cli::kExitValidation);
  CHECK(run({"sample", "--N", "4", "--nu", "0,4", "--M", "2", "--y", "0.75"}).code == 0);
}

TEST_CASE("kernel output") {
  auto r = run({"kernel", "--N", "1", "--nu", "0", "--x-min", "0", "--x-max", "1", "--points", "2"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls[0] == "x,K,abs_error,c,T,panels,bits_lost,oracle");
  auto row = fields(ls[1]);
  CHECK(std::abs(row[1] - 0.3678794) < 1e-7);
  CHECK(row[7] == doctest::Approx(row[1]).epsilon(1e-10));

  // Double accumulation cannot resolve the N = 60 bulk.
  r = run({"kernel", "--N", "60", "--nu", "0", "--x-min", "4.5", "--x-max", "4.5", "--points", "1",
           "--accumulation", "double"});
  CHECK(r.code == cli::kExitNumerical);

  // The scaling window needs one shared ratio.
  CHECK(run({"kernel", "--N", "10", "--nu", "0,5", "--mode", "sine-check"}).code == cli::kExitValidation);
}

TEST_CASE("verify exit codes") {
  auto ok = run({"verify", "edges"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(lines(ok.out).size() >= 2);
  auto bad = run({"verify", "edges", "--inject-failure"});
  CHECK(bad.code == cli::kExitAcceptance);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  CHECK(run({"verify", "nosuch"}).code == cli::kExitValidation);
}

TEST_CASE("output file") {
  const fs::path out = scratch("edges.csv");
  auto r = run({"edges", "--M", "1", "--y", "1", "-o", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(read_file(out) == "M,y,x_minus,x_plus\n1,1,0,4\n");
}
