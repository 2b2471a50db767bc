#include "ginprod/cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <omp.h>

#include "ginprod/cli/csv.hpp"
#include "ginprod/density.hpp"
#include "ginprod/errors.hpp"
#include "ginprod/kernel.hpp"
#include "ginprod/montecarlo.hpp"
#include "ginprod/stieltjes.hpp"

namespace ginprod::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct Verdict {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  const char* suite;
  double budget_seconds;
  std::function<Verdict(const Options&)> run;
};

const std::vector<std::pair<int, double>>& model_grid() {
  static const std::vector<std::pair<int, double>> grid = [] {
    std::vector<std::pair<int, double>> g;
    for (int M = 1; M <= 3; ++M)
      for (double y : {0.25, 0.5, 0.75, 1.0}) g.emplace_back(M, y);
    return g;
  }();
  return grid;
}

// n angles spread over the physical branches: split between the leading and
// trailing arcs when y < 1, all on the leading arc when y = 1.
std::vector<double> physical_angles(const density::ModelParams& p, int n) {
  const double tc = density::critical_angle(p);
  std::vector<double> out;
  if (p.square()) {
    for (int i = 0; i < n; ++i) out.push_back(tc * (i + 0.5) / n);
    return out;
  }
  const int lead = n / 2;
  for (int i = 0; i < lead; ++i) out.push_back(tc * (i + 0.5) / lead);
  for (int i = 0; i < n - lead; ++i) out.push_back(kPi - tc * (i + 0.5) / (n - lead));
  return out;
}

Verdict edges_mp(const Options& o) {
  double worst = 0.0;
  for (double y : {0.25, 0.5, 1.0}) {
    const auto s = density::support_edges(density::ModelParams(1, y));
    const double lo = (1.0 - std::sqrt(y)) * (1.0 - std::sqrt(y));
    const double hi = (1.0 + std::sqrt(y)) * (1.0 + std::sqrt(y));
    worst = std::max({worst, std::abs(s.x_minus - lo), std::abs(s.x_plus - hi)});
  }
  const double tol = 1e-12;
  return {worst <= tol * o.tolerance_scale, printf_string("max|dx|=%.2e tol=%.0e", worst, tol)};
}

Verdict edges_square(const Options& o) {
  double worst = 0.0;
  for (int M = 1; M <= 5; ++M) {
    const auto s = density::support_edges(density::ModelParams(M, 1.0));
    const double hi = std::pow(M + 1.0, M + 1) / std::pow(static_cast<double>(M), M);
    worst = std::max({worst, std::abs(s.x_minus), std::abs(s.x_plus - hi)});
  }
  const double tol = 1e-12;
  return {worst <= tol * o.tolerance_scale, printf_string("max|dx|=%.2e tol=%.0e", worst, tol)};
}

Verdict normalization(const Options& o) {
  double worst = 0.0;
  for (auto [M, y] : model_grid()) {
    worst = std::max(worst, std::abs(density::moment(density::ModelParams(M, y), 0) - 1.0));
  }
  const double tol = 1e-8;
  return {worst <= tol * o.tolerance_scale, printf_string("max|m0-1|=%.2e tol=%.0e", worst, tol)};
}

Verdict rho_identity(const Options& o) {
  double worst = 0.0;
  int checked = 0;
  for (auto [M, y] : model_grid()) {
    const density::ModelParams p(M, y);
    for (double t : physical_angles(p, 200)) {
      const auto s = density::sample_theta(p, t);
      if (!s.admissible) {
        return {false, printf_string("theta=%.17g not admissible at M=%d y=%g", t, M, y)};
      }
      worst = std::max(worst, std::abs(s.rho * s.x - std::abs(s.r * std::sin(t)) / kPi));
      ++checked;
    }
  }
  const double tol = 1e-12;
  return {worst <= tol * o.tolerance_scale,
          printf_string("max|rho x - |r sin|/pi|=%.2e tol=%.0e over %d angles", worst, tol, checked)};
}

Verdict moments(const Options& o) {
  double worst = 0.0;
  for (auto [M, y] : model_grid()) {
    const density::ModelParams p(M, y);
    const auto series = stieltjes::moments_series(stieltjes::GeneralParams(std::vector<double>(M, y)), 6);
    for (int k = 0; k <= 6; ++k) worst = std::max(worst, std::abs(density::moment(p, k) - series[k]));
  }
  const density::ModelParams fc(2, 1.0);
  const double catalan[] = {1.0, 1.0, 3.0, 12.0, 55.0};
  double worst_fc = 0.0;
  for (int k = 0; k <= 4; ++k) worst_fc = std::max(worst_fc, std::abs(density::moment(fc, k) - catalan[k]));
  const double tol = 1e-5;
  const double tol_fc = 1e-6;
  return {worst <= tol * o.tolerance_scale && worst_fc <= tol_fc * o.tolerance_scale,
          printf_string("max|quad-series|=%.2e tol=%.0e; Fuss-Catalan max=%.2e tol=%.0e", worst, tol,
                        worst_fc, tol_fc)};
}

Verdict equal_ratio_reduction(const Options& o) {
  double worst = 0.0;
  for (auto [M, y] : {std::pair{2, 0.5}, std::pair{3, 0.75}}) {
    const density::ModelParams p(M, y);
    const stieltjes::GeneralParams g(std::vector<double>(M, y));
    const auto s = density::support_edges(p);
    for (int i = 1; i <= 50; ++i) {
      const double x = s.x_minus + (s.x_plus - s.x_minus) * i / 51.0;
      worst = std::max(worst, std::abs(stieltjes::density_from_inversion(g, x) - density::density_at(p, x)));
    }
  }
  const double tol = 1e-6;
  return {worst <= tol * o.tolerance_scale, printf_string("max|inversion-density|=%.2e tol=%.0e", worst, tol)};
}

Verdict saddle_stationarity(const Options& o) {
  double worst = 0.0;
  for (auto [M, y] : {std::pair{1, 0.5}, std::pair{2, 0.5}, std::pair{3, 0.75}}) {
    const density::ModelParams p(M, y);
    for (double t : physical_angles(p, 100)) worst = std::max(worst, std::abs(density::saddle(p, t).g_prime));
  }
  const double tol = 1e-10;
  return {worst <= tol * o.tolerance_scale, printf_string("max|g'|=%.2e tol=%.0e", worst, tol)};
}

Verdict kernel_closed_form(const Options& o) {
  const kernel::FiniteModel model(1, {0});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-4.0, 2.5);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    const double exact = std::exp(y - std::exp(y));
    worst = std::max(worst, std::abs(kernel::kernel_log(model, x, y).value - exact));
  }
  const double tol = 1e-10;
  return {worst <= tol * o.tolerance_scale, printf_string("max|K-e^{y-e^y}|=%.2e tol=%.0e", worst, tol)};
}

Verdict kernel_oracle(const Options& o) {
  double worst = 0.0;
  for (auto [N, nu] : {std::pair{10, 0}, std::pair{20, 3}, std::pair{30, 5}}) {
    const kernel::FiniteModel model(N, {nu});
    const density::ModelParams p(1, static_cast<double>(N) / (N + nu));
    const auto s = density::support_edges(p);
    std::vector<double> xs;
    for (double f : {0.15, 0.3, 0.5, 0.7, 0.85}) {
      xs.push_back(std::log(static_cast<double>(N + nu)) + std::log(s.x_minus + f * (s.x_plus - s.x_minus)));
    }
    const auto ks = kernel::kernel_diagonal(model, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double ref = kernel::laguerre_oracle(model, xs[i], xs[i]);
      worst = std::max(worst, std::abs(ks[i].value - ref) / std::abs(ref));
    }
  }
  const double tol = 1e-6;
  return {worst <= tol * o.tolerance_scale, printf_string("max rel dev=%.2e tol=%.0e", worst, tol)};
}

Verdict kernel_mass(const Options& o) {
  double worst = 0.0;
  std::string masses;
  for (const kernel::FiniteModel& m : {kernel::FiniteModel(5, {0}), kernel::FiniteModel(20, {10, 10})}) {
    const double mass = kernel::total_mass(m);
    worst = std::max(worst, std::abs(mass - m.N) / m.N);
    masses += printf_string("N=%d:%.10g ", m.N, mass);
  }
  const double tol = 1e-4;
  return {worst <= tol * o.tolerance_scale, masses + printf_string("max rel dev=%.2e tol=%.0e", worst, tol)};
}

Verdict corollary(const Options& o) {
  const density::ModelParams p(1, 0.5);
  std::vector<double> dev;
  for (int N : {25, 50, 100}) {
    dev.push_back(kernel::corollary_density_check(kernel::FiniteModel(N, {N}), p, kPi / 8).relative_deviation);
  }
  const double tol = 0.1;
  const bool decreasing = dev[0] > dev[1] && dev[1] > dev[2];
  return {dev[2] <= tol * o.tolerance_scale && decreasing,
          printf_string("rel dev N=25:%.4f N=50:%.4f N=100:%.4f tol=%.2g %s", dev[0], dev[1], dev[2], tol,
                        decreasing ? "decreasing" : "NOT decreasing")};
}

Verdict sine_kernel(const Options& o) {
  const density::ModelParams p(1, 0.5);
  std::vector<double> dev;
  double det100 = 0.0;
  double target = 0.0;
  for (int N : {25, 50, 100}) {
    const auto rep = kernel::sine_limit_check(kernel::FiniteModel(N, {N}), p, kPi / 8, {0.0, 0.5});
    dev.push_back(rep.det_pair_deviation);
    det100 = rep.det_pair;
    target = rep.det_pair_target;
  }
  const double tol = 0.05;
  const bool decreasing = dev[0] > dev[1] && dev[1] > dev[2];
  return {dev[2] <= tol * o.tolerance_scale && decreasing,
          printf_string("det N=100 %.6f target %.6f; dev N=25:%.4f N=50:%.4f N=100:%.4f tol=%.2g %s",
                        det100, target, dev[0], dev[1], dev[2], tol,
                        decreasing ? "decreasing" : "NOT decreasing")};
}

Verdict monte_carlo_law(const Options& o) {
  montecarlo::EnsembleConfig cfg;
  cfg.N = 256;
  cfg.nu = {256, 256};
  cfg.trials = 20;
  cfg.seed = 20240601;
  const auto results = montecarlo::sample_all(cfg);
  const auto pooled = montecarlo::pooled_sorted(results);
  const double ks = montecarlo::ks_distance_sorted(pooled, density::ModelParams(2, 0.5));
  const double control = montecarlo::ks_distance_sorted(pooled, density::ModelParams(2, 1.0));
  const double tol = 0.03;
  const double floor = 0.1;
  return {ks <= tol * o.tolerance_scale && control >= floor,
          printf_string("KS=%.4f tol=%.2g; mismatched y=1 KS=%.4f floor=%.2g", ks, tol, control, floor)};
}

Verdict reproducibility(const Options&) {
  montecarlo::EnsembleConfig cfg;
  cfg.N = 48;
  cfg.nu = {16, 48};
  cfg.trials = 6;
  cfg.seed = 0x9e3779b97f4a7c15ULL;
  auto csv = [&](montecarlo::ExecPolicy policy) {
    std::ostringstream out;
    cli::write_samples(out, montecarlo::sample_all(cfg, policy));
    return out.str();
  };
  const std::string reference = csv(montecarlo::ExecPolicy::kSerial);
  const int saved = omp_get_max_threads();
  int runs = 1;
  bool same = true;
  for (int threads : {1, 2, 4, 1}) {
    omp_set_num_threads(threads);
    same = same && csv(montecarlo::ExecPolicy::kParallel) == reference;
    ++runs;
  }
  omp_set_num_threads(saved);
  return {same, printf_string("%d runs (serial; 1, 2, 4, 1 threads), %zu bytes each, %s", runs,
                              reference.size(), same ? "byte-identical" : "MISMATCH")};
}

const std::vector<Criterion>& registry() {
  static const std::vector<Criterion> all = {
      {1, "edges-mp", "edges", 1, edges_mp},
      {2, "edges-square", "edges", 1, edges_square},
      {3, "normalization", "density", 30, normalization},
      {4, "rho-identity", "density", 5, rho_identity},
      {5, "moments", "density", 30, moments},
      {6, "equal-ratio-reduction", "stieltjes", 60, equal_ratio_reduction},
      {7, "saddle-stationarity", "density", 5, saddle_stationarity},
      {8, "kernel-closed-form", "kernel", 5, kernel_closed_form},
      {9, "kernel-oracle", "kernel", 120, kernel_oracle},
      {10, "kernel-mass", "kernel", 300, kernel_mass},
      {11, "corollary", "kernel", 600, corollary},
      {12, "sine-kernel", "kernel", 900, sine_kernel},
      {13, "monte-carlo-law", "montecarlo", 300, monte_carlo_law},
      {14, "reproducibility", "montecarlo", 300, reproducibility},
  };
  return all;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"all", "edges", "density", "stieltjes", "kernel", "montecarlo"};
}

std::vector<int> criteria_in(const std::string& suite) {
  std::vector<int> ids;
  for (const auto& c : registry()) {
    if (suite == "all" || suite == c.suite || suite == std::to_string(c.id)) ids.push_back(c.id);
  }
  if (ids.empty()) {
    throw DomainError("unknown suite '" + suite +
                      "' (expected all, edges, density, stieltjes, kernel, montecarlo or 1-14)");
  }
  return ids;
}

Outcome run_criterion(int id, const Options& opts) {
  const auto& all = registry();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Criterion& c) { return c.id == id; });
  if (it == all.end()) throw DomainError("no acceptance criterion " + std::to_string(id));
  Outcome out;
  out.id = id;
  out.name = it->name;
  out.budget_seconds = it->budget_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Verdict v = it->run(opts);
    out.passed = v.passed;
    out.detail = v.detail;
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail = std::string("error: ") + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.within_budget = out.seconds <= out.budget_seconds;
  if (!out.within_budget) out.passed = false;
  return out;
}

std::string format_line(const Outcome& o) {
  return printf_string("%s %2d %-22s %s  (%.2f s / %g s%s)", o.passed ? "PASS" : "FAIL", o.id,
                       o.name.c_str(), o.detail.c_str(), o.seconds, o.budget_seconds,
                       o.within_budget ? "" : ", over budget");
}

int run_suite(const std::string& suite, const Options& opts, std::ostream& out) {
  int failed = 0;
  for (int id : criteria_in(suite)) {
    const Outcome o = run_criterion(id, opts);
    out << format_line(o) << '\n' << std::flush;
    if (!o.passed) ++failed;
  }
  return failed;
}

}  // namespace ginprod::acceptance
