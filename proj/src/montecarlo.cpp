#include "ginprod/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ginprod/errors.hpp"
#include "ginprod/stieltjes.hpp"

namespace ginprod::montecarlo {

namespace {

using Matrix = Eigen::MatrixXcd;
constexpr int kMaxAttempts = 8;
constexpr std::uint64_t kFrameTag = 0x6672616d65ULL;

// Box-Muller on our own uniforms: std::normal_distribution is not
// specified bit-for-bit across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::seed_seq& seq) : engine_(seq) {}

  std::complex<double> complex_unit() {
    // Each part has variance 1/2.
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  // (0, 1]
  double uniform_open() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  std::mt19937_64 engine_;
};

Matrix ginibre(GaussianStream& g, int rows, int cols) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = g.complex_unit();
  }
  return m;
}

// Haar unitary: QR of a Ginibre matrix with the phases of diag(R) removed.
Matrix haar_unitary(std::uint64_t seed, int factor, int side, int n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kFrameTag), static_cast<std::uint32_t>(factor),
                    static_cast<std::uint32_t>(side)};
  GaussianStream g(seq);
  const Matrix z = ginibre(g, n, n);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (N < 1) throw DomainError("N must be >= 1");
  if (nu.empty()) throw DomainError("nu must list at least one factor");
  for (int v : nu) {
    if (v < 0) throw DomainError("every nu_j must be >= 0");
  }
  if (trials < 1) throw DomainError("trials must be >= 1");
}

SampleResult sample_product(const EnsembleConfig& config, int trial_index) {
  config.validate();
  if (trial_index < 0 || trial_index >= config.trials) {
    throw DomainError("trial_index must lie in [0, trials)");
  }
  SampleResult out;
  out.trial = trial_index;
  const int M = config.M();

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Product accumulated factor by factor; each factor carries 1/sqrt(N_j)
    // so the final values need no further scaling.
    Matrix product;
    int cols = config.N;
    for (int j = 1; j <= M; ++j) {
      const int rows = config.N + config.nu[j - 1];
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                        static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(j),
                        static_cast<std::uint32_t>(attempt)};
      GaussianStream g(seq);
      Matrix x = ginibre(g, rows, cols) / std::sqrt(static_cast<double>(rows));
      if (config.frame_seed) {
        x = haar_unitary(*config.frame_seed, j, 0, rows) * x * haar_unitary(*config.frame_seed, j, 1, cols);
      }
      product = (j == 1) ? std::move(x) : Matrix(x * product);
      cols = rows;
    }
    Eigen::BDCSVD<Matrix> svd(product);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
      ++out.resamples;
      continue;
    }
    const auto& sv = svd.singularValues();
    out.values.resize(config.N);
    for (int i = 0; i < config.N; ++i) out.values[i] = sv(i) * sv(i);
    std::sort(out.values.begin(), out.values.end());
    out.log_values.resize(config.N);
    for (int i = 0; i < config.N; ++i) out.log_values[i] = std::log(out.values[i]);
    return out;
  }
  throw NumericalError("sample_product: singular value decomposition failed on every redraw (trial " +
                       std::to_string(trial_index) + ")");
}

std::vector<SampleResult> sample_all(const EnsembleConfig& config, ExecPolicy policy) {
  config.validate();
  std::vector<SampleResult> results(config.trials);
  if (policy == ExecPolicy::kSerial) {
    for (int t = 0; t < config.trials; ++t) results[t] = sample_product(config, t);
    return results;
  }
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < config.trials; ++t) {
    try {
      results[t] = sample_product(config, t);
    } catch (const std::exception& e) {
#pragma omp critical(ginprod_mc_failure)
      {
        failed = true;
        failure = e.what();
      }
    }
  }
  if (failed) throw NumericalError(failure);
  return results;
}

std::vector<double> pooled_sorted(const std::vector<SampleResult>& results) {
  std::vector<double> all;
  for (const auto& r : results) all.insert(all.end(), r.values.begin(), r.values.end());
  std::sort(all.begin(), all.end());
  return all;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sorted_values) : values_(std::move(sorted_values)) {
  if (values_.empty()) throw DomainError("empirical_cdf: no values");
  if (!std::is_sorted(values_.begin(), values_.end())) std::sort(values_.begin(), values_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

EmpiricalCdf empirical_cdf(const std::vector<SampleResult>& results) {
  return EmpiricalCdf(pooled_sorted(results));
}

double ks_distance_sorted(const std::vector<double>& sorted, const density::ModelParams& params) {
  if (sorted.empty()) throw DomainError("ks_distance: no values");
  const std::vector<double> F = density::cdf_sorted(params, sorted);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Ties: the empirical CDF jumps once past the last equal value.
    std::size_t last = i;
    while (last + 1 < sorted.size() && sorted[last + 1] == sorted[i]) ++last;
    d = std::max({d, (last + 1) / n - F[i], F[i] - i / n});
    i = last;
  }
  return std::min(d, 1.0);
}

double ks_distance(const std::vector<SampleResult>& results, const density::ModelParams& params) {
  return ks_distance_sorted(pooled_sorted(results), params);
}

double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: no values");
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

MomentReport moment_check(const std::vector<SampleResult>& results, const density::ModelParams& params,
                          int k) {
  if (k < 0 || k > 4) throw DomainError("moment_check: k must lie in [0, 4]");
  if (results.empty()) throw DomainError("moment_check: no trials");
  const std::size_t T = results.size();
  std::vector<double> sums(T, 0.0);
  std::vector<double> counts(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (double v : results[t].values) sums[t] += std::pow(v, k);
    counts[t] = static_cast<double>(results[t].values.size());
  }
  double total = 0.0;
  double total_count = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    total += sums[t];
    total_count += counts[t];
  }
  MomentReport rep;
  rep.k = k;
  rep.sample = total / total_count;
  rep.theory = stieltjes::moments_series(stieltjes::GeneralParams(std::vector<double>(params.M(), params.y())),
                                         k)[k];
  if (T > 1) {
    double mean_loo = 0.0;
    std::vector<double> loo(T);
    for (std::size_t t = 0; t < T; ++t) {
      loo[t] = (total - sums[t]) / (total_count - counts[t]);
      mean_loo += loo[t] / T;
    }
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    rep.std_error = std::sqrt((T - 1.0) / T * ss);
  }
  rep.z = rep.std_error > 0.0 ? (rep.sample - rep.theory) / rep.std_error
                              : (rep.sample == rep.theory ? 0.0 : std::numeric_limits<double>::infinity());
  return rep;
}

std::vector<std::pair<double, double>> histogram(const std::vector<double>& sorted) {
  if (sorted.empty()) throw DomainError("histogram: no values");
  const std::size_t n = sorted.size();
  auto quantile = [&](double q) {
    const double pos = q * (n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile(0.75) - quantile(0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  if (!(width > 0.0)) width = hi > lo ? (hi - lo) : 1.0;
  const int bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  std::vector<long> counts(bins, 0);
  for (double v : sorted) {
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
    ++counts[b];
  }
  std::vector<std::pair<double, double>> out(bins);
  for (int b = 0; b < bins; ++b) {
    out[b] = {lo + (b + 0.5) * width, counts[b] / (static_cast<double>(n) * width)};
  }
  return out;
}

EmpiricalStats summarize(const std::vector<SampleResult>& results, const density::ModelParams& params) {
  const std::vector<double> pooled = pooled_sorted(results);
  EmpiricalStats s;
  s.ks = ks_distance_sorted(pooled, params);
  s.histogram = histogram(pooled);
  s.pooled_count = static_cast<long>(pooled.size());
  return s;
}

std::vector<double> inverse_transform_sample(const density::ModelParams& params, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("inverse_transform_sample: n must be >= 1");
  const density::SpectralSupport s = density::support_edges(params);
  constexpr int kTable = 4000;
  std::vector<double> xs(kTable + 1);
  // Denser near the edges, where the CDF bends fastest.
  for (int i = 0; i <= kTable; ++i) {
    const double t = 0.5 - 0.5 * std::cos(std::numbers::pi * i / kTable);
    xs[i] = s.x_minus + (s.x_plus - s.x_minus) * t;
  }
  std::vector<double> F = density::cdf_sorted(params, xs);
  F.back() = 1.0;
  std::mt19937_64 engine(seed);
  std::vector<double> out(n);
  for (double& v : out) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(F.begin(), F.end(), u);
    const std::size_t i = std::clamp<std::size_t>(it - F.begin(), 1, F.size() - 1);
    const double span = F[i] - F[i - 1];
    const double t = span > 0.0 ? (u - F[i - 1]) / span : 0.0;
    v = xs[i - 1] + t * (xs[i] - xs[i - 1]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ginprod::montecarlo
