#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ginprod/density.hpp"
#include "ginprod/errors.hpp"
#include "ginprod/kernel.hpp"

using namespace ginprod;
using kernel::ContourConfig;
using kernel::FiniteModel;

namespace {
double closed_form(double y) { return std::exp(y - std::exp(y)); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Bulk points for an M = 1 model: log of interior points of the scaled support.
std::vector<double> bulk_points(const FiniteModel& m, int count) {
  const double y = static_cast<double>(m.N) / (m.N + m.nu[0]);
  const density::SpectralSupport s = density::support_edges(density::ModelParams(1, y));
  std::vector<double> xs;
  for (int i = 1; i <= count; ++i) {
    const double f = static_cast<double>(i) / (count + 1);
    xs.push_back(std::log(m.N + m.nu[0]) + std::log(s.x_minus + f * (s.x_plus - s.x_minus)));
  }
  return xs;
}
}  // namespace

TEST_CASE("finite model validation") {
  CHECK_THROWS_AS(FiniteModel(0, {0}), DomainError);
  CHECK_THROWS_AS(FiniteModel(3, {}), DomainError);
  CHECK_THROWS_AS(FiniteModel(3, {1, -1}), DomainError);
  const FiniteModel m(4, {0, 3});
  CHECK(m.M() == 2);
  CHECK(m.dims() == std::vector<int>{4, 4, 7});
}

TEST_CASE("delta_MN") {
  CHECK(kernel::delta_MN(FiniteModel(100, {100})) == doctest::Approx(0.015).epsilon(1e-15));
  CHECK(kernel::delta_MN(FiniteModel(1, {0})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(kernel::delta_MN(FiniteModel(50, {0, 0})) == doctest::Approx(0.06).epsilon(1e-15));
}

TEST_CASE("N = 1 kernel is exp(y - e^y)") {
  const FiniteModel m(1, {0});
  CHECK(std::abs(kernel::kernel_log(m, 0.0, 0.0).value - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(kernel::kernel_log(m, 0.0, 0.0).value - 0.3678794) < 1e-7);
  const double v = kernel::kernel_log(m, 1.7, -1.0).value;
  CHECK(std::abs(v - std::exp(-1.0 - std::exp(-1.0))) < 1e-10);
  CHECK(std::abs(v - 0.2546464) < 1e-7);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const double x = u(rng), y = u(rng);
    CHECK(std::abs(kernel::kernel_log(m, x, y).value - closed_form(y)) < 1e-10);
  }
}

TEST_CASE("laguerre oracle") {
  CHECK(kernel::laguerre_oracle(FiniteModel(1, {0}), 0.0, 0.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(kernel::laguerre_oracle(FiniteModel(3, {0, 0}), 0.0, 0.0), DomainError);

  // Diagonal of the N = 5 oracle integrates to 5 (trapezoid on a smooth, fast-decaying integrand).
  const FiniteModel m(5, {0});
  double mass = 0.0;
  const double h = 0.005;
  for (double x = -40.0; x <= 5.0; x += h) mass += kernel::laguerre_oracle(m, x, x) * h;
  CHECK(std::abs(mass - 5.0) < 1e-6);
}

TEST_CASE("contour kernel matches the oracle in the bulk") {
  for (auto [N, nu] : {std::pair{10, 0}, std::pair{20, 3}, std::pair{30, 5}}) {
    const FiniteModel m(N, {nu});
    for (double x : bulk_points(m, 5)) {
      CAPTURE(N);
      CAPTURE(x);
      const double k = kernel::kernel_log(m, x, x).value;
      CHECK(rel(k, kernel::laguerre_oracle(m, x, x)) < 1e-6);
      CHECK(k > 0.0);
    }
  }
}

TEST_CASE("regression values") {
  CHECK(rel(kernel::kernel_log(FiniteModel(10, {0}), 1.0, 1.0).value, 1.6194627361203811) < 1e-9);
  CHECK(rel(kernel::kernel_log(FiniteModel(30, {5}), 4.0, 4.0).value, 10.252627738701186) < 1e-9);
  const FiniteModel two(20, {10, 10});
  CHECK(rel(kernel::kernel_log(two, 6.0, 6.0).value, 4.2464829124361962) < 1e-9);
  CHECK(rel(kernel::kernel_log(two, 4.0, 4.0).value, 2.2561042172095473) < 1e-9);
}

TEST_CASE("doubling T and panels stays within tolerance") {
  const FiniteModel m(20, {10, 10});
  ContourConfig cfg;
  const auto base = kernel::kernel_log(m, 5.0, 5.0, cfg);
  cfg.T = 2.0 * base.T;
  cfg.panels = 2 * base.panels;
  const auto fine = kernel::kernel_log(m, 5.0, 5.0, cfg);
  CHECK(rel(fine.value, base.value) <= 1e-10 * 10);
  CHECK(base.abs_error_estimate <= 1e-10 * (1.0 + std::abs(base.value)));
}

TEST_CASE("extended accumulation agrees with double") {
  // Small N keeps the cancellation inside what double can resolve at tol 1e-10.
  const FiniteModel m(5, {1});
  ContourConfig dbl, ext;
  dbl.accumulation = kernel::Accumulation::kDouble;
  ext.accumulation = kernel::Accumulation::kExtended;
  for (double x : bulk_points(m, 3)) {
    const double a = kernel::kernel_log(m, x, x + 0.3, dbl).value;
    const double b = kernel::kernel_log(m, x, x + 0.3, ext).value;
    CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)));
  }
}

TEST_CASE("double accumulation refuses heavy cancellation") {
  // In the N = 60 bulk the residue sum cancels about 90 bits.
  const FiniteModel m(60, {0});
  ContourConfig cfg;
  cfg.accumulation = kernel::Accumulation::kDouble;
  CHECK_THROWS_AS(kernel::kernel_log(m, 4.5, 4.5, cfg), PrecisionError);
  cfg.accumulation = kernel::Accumulation::kAuto;
  const auto k = kernel::kernel_log(m, 4.5, 4.5, cfg);
  CHECK(k.bits_lost > 52.0);
  CHECK(k.value > 0.0);
}

TEST_CASE("correlations") {
  const FiniteModel one(1, {0});
  CHECK(std::abs(kernel::correlation(one, {0.0, 1.0})) < 1e-12);

  const FiniteModel m(10, {0});
  const std::vector<double> xs = bulk_points(m, 3);
  CHECK(kernel::correlation(m, {xs[0]}) ==
        doctest::Approx(kernel::kernel_log(m, xs[0], xs[0]).value).epsilon(1e-12));

  const double r_ab = kernel::correlation(m, {xs[0], xs[2]});
  const double r_ba = kernel::correlation(m, {xs[2], xs[0]});
  CHECK(r_ab > 0.0);
  CHECK(rel(r_ab, r_ba) < 1e-12);
  CHECK(kernel::correlation(m, xs) > 0.0);
  // Nearly coincident points repel.
  CHECK(std::abs(kernel::correlation(m, {xs[1], xs[1] + 1e-6})) < 1e-6);
}

TEST_CASE("determinants are gauge invariant") {
  const FiniteModel m(10, {0});
  const std::vector<double> xs = bulk_points(m, 4);
  const auto block = kernel::kernel_block(m, xs, xs);
  const int n = static_cast<int>(xs.size());
  std::vector<double> k(n * n), g(n * n);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  std::vector<double> d(n);
  for (double& v : d) v = u(rng);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      k[i * n + j] = block[i * n + j].value;
      g[i * n + j] = d[i] * k[i * n + j] / d[j];
    }
  }
  const double a = kernel::determinant(k, n);
  CHECK(rel(kernel::determinant(g, n), a) < 1e-12);
}

TEST_CASE("kernel block is identical in parallel and serial") {
  const FiniteModel m(12, {4});
  const std::vector<double> xs{1.5, 2.0, 2.5, 3.0};
  ContourConfig par, ser;
  ser.policy = kernel::ExecPolicy::kSerial;
  const auto a = kernel::kernel_block(m, xs, xs, par);
  const auto b = kernel::kernel_block(m, xs, xs, ser);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
}

TEST_CASE("scaled window") {
  const FiniteModel m(100, {100});
  const density::ModelParams p(1, 0.5);
  const double theta = std::numbers::pi / 8;
  const auto w = kernel::scaled_points(m, p, theta, {0.0, 0.5});
  const double r = density::radial(p, theta);
  CHECK(w.scale == doctest::Approx(100.0 * std::abs(r * std::sin(theta)) / std::numbers::pi));
  CHECK(w.points[0] == w.center);
  CHECK(w.points[1] == doctest::Approx(w.center + 0.5 / w.scale));
  CHECK_THROWS_AS(kernel::scaled_points(FiniteModel(100, {50}), p, theta, {0.0}), DomainError);
}

TEST_CASE("total mass") {
  CHECK(std::abs(kernel::total_mass(FiniteModel(1, {0})) - 1.0) < 1e-6);
  CHECK(std::abs(kernel::total_mass(FiniteModel(5, {0})) - 5.0) < 5e-4);
}
