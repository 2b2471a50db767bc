#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ginprod/density.hpp"

namespace ginprod::montecarlo {

struct EnsembleConfig {
  int N = 1;
  std::vector<int> nu;  // one entry per factor
  int trials = 1;
  std::uint64_t seed = 0;
  // When set, each factor is sandwiched between fixed unitaries drawn from
  // this seed (QR of a Ginibre matrix); the law must not change.
  std::optional<std::uint64_t> frame_seed;

  void validate() const;
  int M() const { return static_cast<int>(nu.size()); }
};

struct SampleResult {
  int trial = 0;
  std::vector<double> values;      // ascending, scaled by prod_j (N + nu_j)
  std::vector<double> log_values;
  int resamples = 0;               // decompositions that had to be redrawn
};

struct EmpiricalStats {
  double ks = 0.0;
  std::vector<std::pair<double, double>> histogram;  // (bin centre, density)
  long pooled_count = 0;
};

enum class ExecPolicy { kParallel, kSerial };

SampleResult sample_product(const EnsembleConfig& config, int trial_index);

// All trials, in trial order. Output does not depend on the policy or the
// thread count.
std::vector<SampleResult> sample_all(const EnsembleConfig& config,
                                     ExecPolicy policy = ExecPolicy::kParallel);

std::vector<double> pooled_sorted(const std::vector<SampleResult>& results);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sorted_values);
  double operator()(double x) const;  // right-continuous
  long count() const { return static_cast<long>(values_.size()); }

 private:
  std::vector<double> values_;
};

EmpiricalCdf empirical_cdf(const std::vector<SampleResult>& results);

// Sup distance between the pooled empirical CDF and the limiting law.
double ks_distance(const std::vector<SampleResult>& results, const density::ModelParams& params);
double ks_distance_sorted(const std::vector<double>& sorted, const density::ModelParams& params);
// Two-sample version, for comparing pooled runs against each other.
double ks_two_sample(const std::vector<double>& a_sorted, const std::vector<double>& b_sorted);

struct MomentReport {
  int k = 0;
  double sample = 0.0;
  double theory = 0.0;
  double std_error = 0.0;  // jackknife over trials
  double z = 0.0;
};

MomentReport moment_check(const std::vector<SampleResult>& results, const density::ModelParams& params,
                          int k);

// Freedman-Diaconis bins on the pooled values.
std::vector<std::pair<double, double>> histogram(const std::vector<double>& sorted);

EmpiricalStats summarize(const std::vector<SampleResult>& results, const density::ModelParams& params);

// n draws from the limiting law by inverting a tabulated CDF.
std::vector<double> inverse_transform_sample(const density::ModelParams& params, int n,
                                             std::uint64_t seed);

}  // namespace ginprod::montecarlo
