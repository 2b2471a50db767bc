#include "ginprod/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "ginprod/cli/acceptance.hpp"
#include "ginprod/cli/config.hpp"
#include "ginprod/cli/csv.hpp"
#include "ginprod/density.hpp"
#include "ginprod/errors.hpp"
#include "ginprod/kernel.hpp"
#include "ginprod/montecarlo.hpp"
#include "ginprod/stieltjes.hpp"

namespace ginprod::cli {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

// JSON has no NaN; non-finite values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Common {
  std::string config;
  std::string output;
  std::string format = "csv";
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON file of flag values (keys are flag names without dashes)");
  cmd->add_option("-o,--output", c.output, "Output file (default: standard output)");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--threads", c.threads,
                  "Worker threads (count); falls back to GINPROD_THREADS, then all cores");
}

// Sink for the command's main output: the --output file or the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ValidationError("output", "cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("write to output failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

template <class T>
void require(const std::optional<T>& v, const char* field) {
  if (!v) throw ValidationError(field, "required (flag or config field)");
}

density::ModelParams model_params(const std::optional<int>& M, const std::optional<double>& y) {
  require(M, "M");
  require(y, "y");
  if (*M < 1) throw ValidationError("M", "must be >= 1");
  if (!(*y > 0.0 && *y <= 1.0)) throw ValidationError("y", "must lie in (0, 1]");
  return density::ModelParams(*M, *y);
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  return xs;
}

void check_grid(double lo, double hi, int points) {
  if (points < 1) throw ValidationError("points", "must be >= 1");
  if (!(std::isfinite(lo) && std::isfinite(hi))) throw ValidationError("x-min", "grid bounds must be finite");
  if (points > 1 && !(hi > lo)) throw ValidationError("x-max", "must exceed x-min");
}

// ---------------------------------------------------------------- edges

struct EdgesArgs {
  Common common;
  std::optional<int> M;
  std::optional<double> y;
};

void cmd_edges(const EdgesArgs& a, std::ostream& fallback) {
  const auto p = model_params(a.M, a.y);
  const auto s = density::support_edges(p);
  Sink sink(a.common.output, fallback);
  if (a.common.format == "json") {
    sink.get() << json{{"M", p.M()}, {"y", p.y()}, {"x_minus", s.x_minus}, {"x_plus", s.x_plus}}.dump(2) << '\n';
  } else {
    CsvWriter csv(sink.get(), {"M", "y", "x_minus", "x_plus"});
    csv.row({p.M(), p.y(), s.x_minus, s.x_plus});
  }
  sink.finish();
}

// -------------------------------------------------------------- density

struct DensityArgs {
  Common common;
  std::optional<int> M;
  std::optional<double> y;
  std::optional<double> x_min, x_max;
  int points = 201;
};

void cmd_density(const DensityArgs& a, std::ostream& fallback) {
  const auto p = model_params(a.M, a.y);
  const auto s = density::support_edges(p);
  const double pad = 0.05 * (s.x_plus - s.x_minus);
  const double lo = a.x_min.value_or(std::max(0.0, s.x_minus - pad));
  const double hi = a.x_max.value_or(s.x_plus + pad);
  check_grid(lo, hi, a.points);

  struct Row {
    double x, rho, theta;
    bool admissible;
  };
  std::vector<Row> rows;
  for (double x : linear_grid(lo, hi, a.points)) {
    Row r{x, 0.0, std::nan(""), false};
    if (x > s.x_minus && x < s.x_plus) {
      r.rho = density::density_at(p, x);
      r.theta = density::theta_of_x(p, x);
      r.admissible = density::classify_angle(p, r.theta) == density::AngleBranch::kLeading ||
                     density::classify_angle(p, r.theta) == density::AngleBranch::kTrailing;
    }
    rows.push_back(r);
  }

  Sink sink(a.common.output, fallback);
  if (a.common.format == "json") {
    json doc{{"M", p.M()}, {"y", p.y()}, {"x_minus", s.x_minus}, {"x_plus", s.x_plus}, {"rows", json::array()}};
    for (const Row& r : rows) {
      doc["rows"].push_back({{"x", r.x}, {"rho", r.rho}, {"theta", num(r.theta)}, {"admissible", r.admissible}});
    }
    sink.get() << doc.dump(2) << '\n';
  } else {
    CsvWriter csv(sink.get(), {"x", "rho", "theta", "admissible"});
    for (const Row& r : rows) csv.row({r.x, r.rho, r.theta, r.admissible});
  }
  sink.finish();
}

// ------------------------------------------------------------ stieltjes

struct StieltjesArgs {
  Common common;
  std::vector<double> ratios;
  std::vector<double> z;
  std::optional<double> x_min, x_max;
  int points = 201;
};

void cmd_stieltjes(const StieltjesArgs& a, std::ostream& fallback) {
  if (a.ratios.empty()) throw ValidationError("ratios", "required (flag or config field)");
  for (double y : a.ratios) {
    if (!(y > 0.0 && y <= 1.0)) throw ValidationError("ratios", "every ratio must lie in (0, 1]");
  }
  const stieltjes::GeneralParams p(a.ratios);
  Sink sink(a.common.output, fallback);

  if (!a.z.empty()) {
    if (a.z.size() != 2) throw ValidationError("z", "expects two numbers: real and imaginary part");
    const stieltjes::cplx z(a.z[0], a.z[1]);
    if (z.imag() == 0.0) throw ValidationError("z", "imaginary part must be nonzero");
    const auto v = stieltjes::solve_G(p, z);
    if (a.common.format == "json") {
      sink.get() << json{{"ratios", p.ratios()},
                         {"z_re", z.real()}, {"z_im", z.imag()},
                         {"G_re", v.G.real()}, {"G_im", v.G.imag()},
                         {"residual", v.residual}}.dump(2) << '\n';
    } else {
      CsvWriter csv(sink.get(), {"z_re", "z_im", "G_re", "G_im", "residual"});
      csv.row({z.real(), z.imag(), v.G.real(), v.G.imag(), v.residual});
    }
    sink.finish();
    return;
  }

  double lo = 0.0;
  double hi = 0.0;
  if (a.x_min && a.x_max) {
    lo = *a.x_min;
    hi = *a.x_max;
  } else {
    const auto support = stieltjes::numeric_support(p);
    lo = a.x_min.value_or(support.lower);
    hi = a.x_max.value_or(support.upper);
  }
  check_grid(lo, hi, a.points);

  struct Row {
    double x, density, residual;
  };
  std::vector<Row> rows;
  for (double x : linear_grid(lo, hi, a.points)) {
    Row r{x, stieltjes::density_from_inversion(p, x), 0.0};
    // Residual of the worst of the three off-axis solves behind the density.
    for (double eps : {1e-3, 5e-4, 2.5e-4}) {
      r.residual = std::max(r.residual, stieltjes::solve_G(p, {x, eps}).residual);
    }
    rows.push_back(r);
  }
  if (a.common.format == "json") {
    json doc{{"ratios", p.ratios()}, {"rows", json::array()}};
    for (const Row& r : rows) doc["rows"].push_back({{"x", r.x}, {"density", r.density}, {"residual", r.residual}});
    sink.get() << doc.dump(2) << '\n';
  } else {
    CsvWriter csv(sink.get(), {"x", "density", "residual"});
    for (const Row& r : rows) csv.row({r.x, r.density, r.residual});
  }
  sink.finish();
}

// --------------------------------------------------------------- sample

struct SampleArgs {
  Common common;
  std::optional<int> N;
  std::vector<int> nu;
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> frame_seed;
  std::optional<int> M;
  std::optional<double> y;
  std::string stats;
  bool serial = false;
};

// Common ratio N/(N + nu_j) when every factor shares it.
std::optional<double> common_ratio(int N, const std::vector<int>& nu) {
  const double y0 = static_cast<double>(N) / (N + nu.front());
  for (int v : nu) {
    if (std::abs(static_cast<double>(N) / (N + v) - y0) > 1e-12) return std::nullopt;
  }
  return y0;
}

void cmd_sample(const SampleArgs& a, std::ostream& fallback) {
  require(a.N, "N");
  if (*a.N < 1) throw ValidationError("N", "must be >= 1");
  if (a.nu.empty()) throw ValidationError("nu", "required: one nonnegative integer per factor");
  if (std::any_of(a.nu.begin(), a.nu.end(), [](int v) { return v < 0; })) {
    throw ValidationError("nu", "entries must be >= 0");
  }
  if (a.trials < 1) throw ValidationError("trials", "must be >= 1");

  const int M = a.M.value_or(static_cast<int>(a.nu.size()));
  if (M != static_cast<int>(a.nu.size())) throw ValidationError("M", "must equal the number of nu entries");
  std::optional<double> y = a.y ? a.y : common_ratio(*a.N, a.nu);
  if (!y) throw ValidationError("y", "the ratios N/(N+nu_j) differ; pass y to choose the reference law");
  const auto params = model_params(M, y);

  montecarlo::EnsembleConfig cfg;
  cfg.N = *a.N;
  cfg.nu = a.nu;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.frame_seed = a.frame_seed;
  cfg.validate();
  const auto results =
      montecarlo::sample_all(cfg, a.serial ? montecarlo::ExecPolicy::kSerial : montecarlo::ExecPolicy::kParallel);

  const auto summary = montecarlo::summarize(results, params);
  json stats{{"seed", cfg.seed},   {"N", cfg.N},   {"nu", cfg.nu}, {"trials", cfg.trials},
             {"M", params.M()},    {"y", params.y()}, {"pooled_count", summary.pooled_count},
             {"ks", summary.ks},   {"moments", json::array()}, {"histogram", json::array()}};
  stats["frame_seed"] = cfg.frame_seed ? json(*cfg.frame_seed) : json(nullptr);
  int resamples = 0;
  for (const auto& r : results) resamples += r.resamples;
  stats["resamples"] = resamples;
  for (int k = 1; k <= 4; ++k) {
    const auto m = montecarlo::moment_check(results, params, k);
    stats["moments"].push_back(
        {{"k", k}, {"sample", m.sample}, {"theory", m.theory}, {"std_error", num(m.std_error)}, {"z", num(m.z)}});
  }
  for (const auto& [center, dens] : summary.histogram) stats["histogram"].push_back({{"center", center}, {"density", dens}});

  Sink sink(a.common.output, fallback);
  if (a.common.format == "json") {
    json doc{{"stats", stats}, {"trials", json::array()}};
    for (const auto& r : results) doc["trials"].push_back({{"trial", r.trial}, {"values", r.values}});
    sink.get() << doc.dump(2) << '\n';
  } else {
    write_samples(sink.get(), results);
  }
  sink.finish();
  if (!a.stats.empty()) {
    Sink st(a.stats, fallback);
    st.get() << stats.dump(2) << '\n';
    st.finish();
  }
}

// --------------------------------------------------------------- kernel

struct KernelArgs {
  Common common;
  std::optional<int> N;
  std::vector<int> nu;
  std::string mode = "diagonal";
  double theta = kPi / 8;
  double x_min = -5.0;
  double x_max = 5.0;
  int points = 11;
  std::vector<double> xi{0.0, 0.5};
  std::optional<double> c, T;
  int panels = 16;
  int max_panels = 8192;
  double tol = 1e-10;
  std::string accumulation = "auto";
  bool serial = false;
};

kernel::ContourConfig contour(const KernelArgs& a) {
  kernel::ContourConfig cfg;
  cfg.c = a.c;
  cfg.T = a.T;
  if (a.T && !(*a.T > 0.0)) throw ValidationError("T", "must be > 0");
  if (a.panels < 1) throw ValidationError("panels", "must be >= 1");
  if (a.max_panels < a.panels) throw ValidationError("max-panels", "must be >= panels");
  if (!(a.tol > 0.0 && a.tol < 1.0)) throw ValidationError("tol", "must lie in (0, 1)");
  cfg.panels = a.panels;
  cfg.max_panels = a.max_panels;
  cfg.tol = a.tol;
  cfg.accumulation = a.accumulation == "double"     ? kernel::Accumulation::kDouble
                     : a.accumulation == "extended" ? kernel::Accumulation::kExtended
                                                    : kernel::Accumulation::kAuto;
  cfg.policy = a.serial ? kernel::ExecPolicy::kSerial : kernel::ExecPolicy::kParallel;
  return cfg;
}

// Reports are flat; CSV gets one quantity per row.
void write_report(Sink& sink, const std::string& format, const json& report) {
  if (format == "json") {
    sink.get() << report.dump(2) << '\n';
    return;
  }
  CsvWriter csv(sink.get(), {"quantity", "value"});
  for (auto it = report.begin(); it != report.end(); ++it) {
    if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& v = (*it)[i];
        csv.row({it.key() + "[" + std::to_string(i) + "]", v.is_null() ? std::nan("") : v.get<double>()});
      }
    } else if (it->is_number()) {
      csv.row({it.key(), it->get<double>()});
    } else if (it->is_null()) {
      csv.row({it.key(), std::nan("")});
    } else {
      csv.row({it.key(), it->dump()});
    }
  }
}

void cmd_kernel(const KernelArgs& a, std::ostream& fallback) {
  require(a.N, "N");
  if (*a.N < 1) throw ValidationError("N", "must be >= 1");
  if (a.nu.empty()) throw ValidationError("nu", "required: one nonnegative integer per factor");
  if (std::any_of(a.nu.begin(), a.nu.end(), [](int v) { return v < 0; })) {
    throw ValidationError("nu", "entries must be >= 0");
  }
  const kernel::FiniteModel model(*a.N, a.nu);
  const auto cfg = contour(a);
  Sink sink(a.common.output, fallback);

  if (a.mode == "diagonal") {
    check_grid(a.x_min, a.x_max, a.points);
    const auto xs = linear_grid(a.x_min, a.x_max, a.points);
    const auto ks = kernel::kernel_diagonal(model, xs, cfg);
    std::vector<double> oracle(xs.size(), std::nan(""));
    if (model.M() == 1) {
      for (std::size_t i = 0; i < xs.size(); ++i) oracle[i] = kernel::laguerre_oracle(model, xs[i], xs[i]);
    }
    if (a.common.format == "json") {
      json doc{{"N", model.N}, {"nu", model.nu}, {"rows", json::array()}};
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& k = ks[i];
        doc["rows"].push_back({{"x", k.x}, {"K", k.value}, {"abs_error", k.abs_error_estimate}, {"c", k.c},
                               {"T", k.T}, {"panels", k.panels}, {"bits_lost", k.bits_lost},
                               {"oracle", num(oracle[i])}});
      }
      sink.get() << doc.dump(2) << '\n';
    } else {
      CsvWriter csv(sink.get(), {"x", "K", "abs_error", "c", "T", "panels", "bits_lost", "oracle"});
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& k = ks[i];
        csv.row({k.x, k.value, k.abs_error_estimate, k.c, k.T, k.panels, k.bits_lost, oracle[i]});
      }
    }
    sink.finish();
    return;
  }

  if (a.mode == "mass") {
    const auto rep = kernel::total_mass_report(model, cfg);
    write_report(sink, a.common.format,
                 json{{"N", model.N}, {"mass", rep.mass}, {"relative_deviation", std::abs(rep.mass - model.N) / model.N},
                      {"lower", rep.lower}, {"upper", rep.upper}, {"evaluations", rep.evaluations}});
    sink.finish();
    return;
  }

  const auto y = common_ratio(model.N, model.nu);
  if (!y) throw ValidationError("nu", "sine-check and corollary need a common ratio N/(N+nu_j)");
  const density::ModelParams params(model.M(), *y);
  if (!(a.theta > 0.0 && a.theta < kPi)) throw ValidationError("theta", "must lie in (0, pi)");
  if (density::classify_angle(params, a.theta) != density::AngleBranch::kLeading &&
      density::classify_angle(params, a.theta) != density::AngleBranch::kTrailing) {
    throw ValidationError("theta", "not on a physical branch for M=" + std::to_string(params.M()) +
                                       ", y=" + format_double(params.y()));
  }

  if (a.mode == "corollary") {
    const auto rep = kernel::corollary_density_check(model, params, a.theta, cfg);
    write_report(sink, a.common.format,
                 json{{"N", model.N}, {"M", params.M()}, {"y", params.y()}, {"theta", rep.theta},
                      {"center", rep.center}, {"kernel_value", rep.kernel_value}, {"normalized", rep.normalized},
                      {"rho", rep.rho}, {"relative_deviation", rep.relative_deviation}});
  } else {
    if (a.xi.size() < 2 || a.xi.size() > 8) throw ValidationError("xi", "needs between 2 and 8 points");
    const auto rep = kernel::sine_limit_check(model, params, a.theta, a.xi, cfg);
    write_report(sink, a.common.format,
                 json{{"N", model.N}, {"M", params.M()}, {"y", params.y()}, {"theta", rep.theta}, {"xi", rep.xi},
                      {"scaled_kernel", rep.scaled_kernel},
                      {"sup_pointwise_deviation", rep.sup_pointwise_deviation},
                      {"diagonal_deviation", rep.diagonal_deviation}, {"det_pair", rep.det_pair},
                      {"det_pair_target", rep.det_pair_target}, {"det_pair_deviation", rep.det_pair_deviation},
                      {"det_full", rep.det_full}, {"det_full_target", rep.det_full_target},
                      {"det_full_deviation", rep.det_full_deviation}});
  }
  sink.finish();
}

// --------------------------------------------------------------- verify

struct VerifyArgs {
  Common common;
  std::string suite = "all";
  bool fast = false;
  bool inject_failure = false;
  bool list = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& fallback) {
  if (a.list) {
    for (const auto& s : acceptance::suite_names()) {
      fallback << s << ':';
      for (int id : acceptance::criteria_in(s)) fallback << ' ' << id;
      fallback << '\n';
    }
    return kExitOk;
  }
  acceptance::criteria_in(a.suite);  // validates the name before any work
  acceptance::Options opts;
  if (a.inject_failure) opts.tolerance_scale = 0.0;
  Sink sink(a.common.output, fallback);
  const int failed = acceptance::run_suite(a.suite, opts, sink.get());
  sink.get() << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  sink.finish();
  return failed == 0 ? kExitOk : kExitAcceptance;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limiting spectra and correlation kernels of products of rectangular Ginibre matrices", "ginprod"};
  app.require_subcommand(1);

  EdgesArgs edges;
  auto* c_edges = app.add_subcommand("edges", "Support edges (x_minus, x_plus) of the limiting law");
  add_common(c_edges, edges.common);
  c_edges->add_option("--M", edges.M, "Number of factors (count, >= 1)");
  c_edges->add_option("--y", edges.y, "Ratio N/N_l shared by every factor (dimensionless, in (0, 1])");

  DensityArgs dens;
  auto* c_density = app.add_subcommand("density", "Limiting density on an x grid: x,rho,theta,admissible");
  add_common(c_density, dens.common);
  c_density->add_option("--M", dens.M, "Number of factors (count, >= 1)");
  c_density->add_option("--y", dens.y, "Ratio N/N_l shared by every factor (dimensionless, in (0, 1])");
  c_density->add_option("--x-min", dens.x_min, "Grid start (scaled eigenvalue; default support minus 5%)");
  c_density->add_option("--x-max", dens.x_max, "Grid end (scaled eigenvalue; default support plus 5%)");
  c_density->add_option("--points", dens.points, "Grid points (count)")->capture_default_str();

  StieltjesArgs st;
  auto* c_stieltjes =
      app.add_subcommand("stieltjes", "Density by Stieltjes inversion for per-factor ratios: x,density,residual");
  add_common(c_stieltjes, st.common);
  c_stieltjes->add_option("--ratios", st.ratios, "Ratios y_l = N/N_l, comma separated (dimensionless, in (0, 1])")
      ->delimiter(',');
  c_stieltjes->add_option("--z", st.z, "Single complex point 're,im' instead of a grid (Im != 0)")
      ->delimiter(',')
      ->expected(2);
  c_stieltjes->add_option("--x-min", st.x_min, "Grid start (scaled eigenvalue; default numeric support)");
  c_stieltjes->add_option("--x-max", st.x_max, "Grid end (scaled eigenvalue; default numeric support)");
  c_stieltjes->add_option("--points", st.points, "Grid points (count)")->capture_default_str();

  SampleArgs smp;
  auto* c_sample = app.add_subcommand("sample", "Monte Carlo squared singular values of Ginibre products");
  add_common(c_sample, smp.common);
  c_sample->add_option("--N", smp.N, "Smallest dimension N_0 (count, >= 1)");
  c_sample->add_option("--nu", smp.nu, "Excess dimensions nu_j >= 0, comma separated (count each)")->delimiter(',');
  c_sample->add_option("--trials", smp.trials, "Independent products (count)")->capture_default_str();
  c_sample->add_option("--seed", smp.seed, "Master seed (64-bit unsigned)")->capture_default_str();
  c_sample->add_option("--frame-seed", smp.frame_seed,
                       "Seed for fixed unitary frames around each factor (64-bit unsigned; off by default)");
  c_sample->add_option("--M", smp.M, "Factors of the reference law (count; default: number of nu entries)");
  c_sample->add_option("--y", smp.y, "Ratio of the reference law (dimensionless; default N/(N+nu_j) when shared)");
  c_sample->add_option("--stats", smp.stats, "Also write the JSON statistics (ks, moments, seed) to this file");
  c_sample->add_flag("--serial", smp.serial, "Run trials on one thread (results are identical either way)");

  KernelArgs ker;
  auto* c_kernel = app.add_subcommand("kernel", "Finite-N correlation kernel K_{M,N} in log coordinates");
  add_common(c_kernel, ker.common);
  c_kernel->add_option("--N", ker.N, "Smallest dimension N_0 (count, >= 1)");
  c_kernel->add_option("--nu", ker.nu, "Excess dimensions nu_j >= 0, comma separated (count each)")->delimiter(',');
  c_kernel->add_option("--mode", ker.mode, "What to compute")
      ->check(CLI::IsMember({"diagonal", "sine-check", "corollary", "mass"}))
      ->capture_default_str();
  c_kernel->add_option("--theta", ker.theta, "Bulk angle for sine-check/corollary (radians, physical branch)")
      ->capture_default_str();
  c_kernel->add_option("--x-min", ker.x_min, "Diagonal grid start (log eigenvalue)")->capture_default_str();
  c_kernel->add_option("--x-max", ker.x_max, "Diagonal grid end (log eigenvalue)")->capture_default_str();
  c_kernel->add_option("--points", ker.points, "Diagonal grid points (count)")->capture_default_str();
  c_kernel->add_option("--xi", ker.xi, "Scaled points for sine-check, comma separated (mean spacings)")
      ->delimiter(',')
      ->capture_default_str();
  c_kernel->add_option("--c", ker.c, "Abscissa of the s-line (dimensionless; default chosen per point)");
  c_kernel->add_option("--T", ker.T, "Truncation height of the s-line (imaginary units; default scanned)");
  c_kernel->add_option("--panels", ker.panels, "Initial Gauss-Legendre panels on [0, T] (count)")
      ->capture_default_str();
  c_kernel->add_option("--max-panels", ker.max_panels, "Panel cap before giving up (count)")->capture_default_str();
  c_kernel->add_option("--tol", ker.tol, "Relative change accepted between panel doublings")->capture_default_str();
  c_kernel->add_option("--accumulation", ker.accumulation, "Residue-sum arithmetic")
      ->check(CLI::IsMember({"auto", "double", "extended"}))
      ->capture_default_str();
  c_kernel->add_flag("--serial", ker.serial, "Evaluate quadrature nodes on one thread (bitwise identical)");

  VerifyArgs ver;
  auto* c_verify = app.add_subcommand("verify", "Run acceptance criteria; exit 4 when any fails");
  add_common(c_verify, ver.common);
  c_verify->add_option("suite", ver.suite, "all, edges, density, stieltjes, kernel, montecarlo, or a number 1-14")
      ->capture_default_str();
  c_verify->add_flag("--fast", ver.fast, "Accepted for scripts; the full suite already runs in a few minutes");
  c_verify->add_flag("--list", ver.list, "List suites and their criterion numbers");
  c_verify->add_flag("--inject-failure", ver.inject_failure, "Test hook: zero every tolerance so checks fail")
      ->group("");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    // help() delegates to the selected subcommand when there is one.
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    Common* common = cmd == c_edges       ? &edges.common
                     : cmd == c_density   ? &dens.common
                     : cmd == c_stieltjes ? &st.common
                     : cmd == c_sample    ? &smp.common
                     : cmd == c_kernel    ? &ker.common
                                          : &ver.common;
    if (!common->config.empty()) apply_json_config(*cmd, common->config);
    omp_set_num_threads(resolve_threads(common->threads));

    if (cmd == c_edges) cmd_edges(edges, out);
    if (cmd == c_density) cmd_density(dens, out);
    if (cmd == c_stieltjes) cmd_stieltjes(st, out);
    if (cmd == c_sample) cmd_sample(smp, out);
    if (cmd == c_kernel) cmd_kernel(ker, out);
    if (cmd == c_verify) return cmd_verify(ver, out);
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace ginprod::cli
