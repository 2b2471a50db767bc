#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ginprod/density.hpp"
#include "ginprod/errors.hpp"
#include "ginprod/montecarlo.hpp"

using namespace ginprod;
using namespace ginprod::montecarlo;

namespace {
EnsembleConfig make(int N, std::vector<int> nu, int trials, std::uint64_t seed) {
  EnsembleConfig c;
  c.N = N;
  c.nu = std::move(nu);
  c.trials = trials;
  c.seed = seed;
  return c;
}

double pooled_mean(const std::vector<SampleResult>& rs) {
  double s = 0.0;
  long n = 0;
  for (const auto& r : rs)
    for (double v : r.values) s += v, ++n;
  return s / n;
}
}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(make(0, {0}, 1, 0).validate(), DomainError);
  CHECK_THROWS_AS(make(2, {}, 1, 0).validate(), DomainError);
  CHECK_THROWS_AS(make(2, {-1}, 1, 0).validate(), DomainError);
  CHECK_THROWS_AS(make(2, {0}, 0, 0).validate(), DomainError);
  CHECK_THROWS_AS(sample_product(make(2, {0}, 3, 0), 3), DomainError);
}

TEST_CASE("N = 1 gives unit exponentials") {
  // 1e5 trials as specified; the mean has standard error 0.003.
  const auto rs = sample_all(make(1, {0}, 100000, 1));
  CHECK(std::abs(pooled_mean(rs) - 1.0) < 0.02);

  const auto prod = sample_all(make(1, {0, 0}, 100000, 2));
  CHECK(std::abs(pooled_mean(prod) - 1.0) < 0.03);
}

TEST_CASE("values are sorted, nonnegative and N per trial") {
  const auto rs = sample_all(make(7, {3, 0}, 4, 3));
  REQUIRE(rs.size() == 4);
  for (std::size_t t = 0; t < rs.size(); ++t) {
    CHECK(rs[t].trial == static_cast<int>(t));
    REQUIRE(rs[t].values.size() == 7);
    CHECK(std::is_sorted(rs[t].values.begin(), rs[t].values.end()));
    CHECK(rs[t].values.front() >= 0.0);
    for (std::size_t i = 0; i < 7; ++i)
      CHECK(rs[t].log_values[i] == doctest::Approx(std::log(rs[t].values[i])).epsilon(1e-15));
  }
}

TEST_CASE("reproducible and independent of the execution policy") {
  const auto cfg = make(16, {8, 16}, 5, 99);
  const auto a = sample_all(cfg);
  const auto b = sample_all(cfg);
  const auto c = sample_all(cfg, ExecPolicy::kSerial);
  for (int t = 0; t < cfg.trials; ++t) {
    CHECK(a[t].values == b[t].values);
    CHECK(a[t].values == c[t].values);
  }
  CHECK(sample_product(cfg, 3).values == a[3].values);
  const auto other = sample_all(make(16, {8, 16}, 5, 100));
  CHECK(other[0].values != a[0].values);
}

TEST_CASE("empirical cdf") {
  EmpiricalCdf single({2.5});
  CHECK(single(2.4) == 0.0);
  CHECK(single(2.5) == 1.0);
  CHECK(single(-std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(single(std::numeric_limits<double>::infinity()) == 1.0);

  const auto rs = sample_all(make(6, {2}, 9, 4));
  const EmpiricalCdf f = empirical_cdf(rs);
  CHECK(f.count() == 54);
  CHECK(pooled_sorted(rs).size() == 54);
}

TEST_CASE("histogram integrates to one") {
  const auto rs = sample_all(make(20, {20}, 10, 5));
  const auto sorted = pooled_sorted(rs);
  const auto h = histogram(sorted);
  REQUIRE(h.size() >= 2);
  const double width = h[1].first - h[0].first;
  double total = 0.0;
  for (const auto& [c, d] : h) total += d * width;
  CHECK(std::abs(total - 1.0) < 1e-9);

  const auto s = summarize(rs, density::ModelParams(1, 0.5));
  CHECK(s.pooled_count == 200);
  CHECK(s.ks >= 0.0);
  CHECK(s.ks <= 1.0);
}

TEST_CASE("inverse transform self test") {
  const density::ModelParams p(2, 0.5);
  std::vector<double> xs = inverse_transform_sample(p, 10000, 17);
  std::sort(xs.begin(), xs.end());
  CHECK(ks_distance_sorted(xs, p) <= 0.02);
  // Against the wrong law it must be clearly off.
  CHECK(ks_distance_sorted(xs, density::ModelParams(2, 1.0)) >= 0.1);
}

TEST_CASE("finite samples follow the limiting law") {
  const density::ModelParams p(1, 0.5);
  const auto rs = sample_all(make(64, {64}, 20, 6));
  CHECK(ks_distance(rs, p) <= 0.03);
  // Doubling N and nu together keeps the same limit.
  const auto rs2 = sample_all(make(128, {128}, 10, 7));
  CHECK(ks_distance(rs2, p) <= 0.05);
  CHECK(ks_distance(rs, density::ModelParams(1, 1.0)) >= 0.1);
}

TEST_CASE("fixed unitary frames do not change the law") {
  auto base = make(64, {64, 64}, 80, 8);
  auto framed = base;
  framed.seed = 9;
  framed.frame_seed = 123;
  const double ks = ks_two_sample(pooled_sorted(sample_all(base)), pooled_sorted(sample_all(framed)));
  // 5120 points per side: the 5% critical value is about 0.027.
  CHECK(ks <= 0.03);
}

TEST_CASE("moment check") {
  const density::ModelParams p(1, 0.5);
  const auto rs = sample_all(make(64, {64}, 40, 10));
  const auto m1 = moment_check(rs, p, 1);
  CHECK(m1.theory == doctest::Approx(1.0).epsilon(1e-12));
  const auto m2 = moment_check(rs, p, 2);
  CHECK(m2.theory == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(m2.std_error > 0.0);
  // For one Wishart factor E[m2] = 1 + y already at finite N, so no bias term.
  CHECK(std::abs(m2.z) <= 3.0);
}
