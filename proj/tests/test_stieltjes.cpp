#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ginprod/density.hpp"
#include "ginprod/errors.hpp"
#include "ginprod/stieltjes.hpp"

using namespace ginprod;
using stieltjes::cplx;
using stieltjes::GeneralParams;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("parameters") {
  CHECK_THROWS_AS(GeneralParams({}), DomainError);
  CHECK_THROWS_AS(GeneralParams({0.5, 0.0}), DomainError);
  CHECK_THROWS_AS(GeneralParams({1.2}), DomainError);
  const GeneralParams p({0.75, 0.25, 0.5});
  CHECK(p.M() == 3);
  CHECK(p.ratios() == std::vector<double>{0.25, 0.5, 0.75});
}

TEST_CASE("residual examples") {
  const GeneralParams mp({1.0});
  CHECK(stieltjes::resolvent_residual(mp, cplx(1.3, 0.2), 0.0) == cplx(1.0));
  // Closed-form Marchenko-Pastur transform at y = 1, below the axis.
  const double x = 1.7;
  const cplx z(x, 0.0);
  const cplx Gmp = 0.5 - cplx(0.0, 1.0) * std::sqrt(x * (4.0 - x)) / (2.0 * x);
  CHECK(std::abs(stieltjes::resolvent_residual(mp, z, Gmp)) < 1e-12);
}

TEST_CASE("solve_G roots and asymptotics") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.1, 1.0);
  std::uniform_real_distribution<double> ux(-2.0, 12.0);
  std::uniform_real_distribution<double> ue(-3.0, 3.0);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> ys(1 + i % 4);
    for (double& y : ys) y = ur(rng);
    const GeneralParams p(ys);
    const cplx z(ux(rng), std::pow(10.0, ue(rng)) * (i % 2 ? 1.0 : -1.0));
    const auto v = stieltjes::solve_G(p, z);
    CHECK(v.residual <= 1e-10 * std::pow(1.0 + std::abs(z), 2));
    // Herglotz: Im G has the sign opposite to Im z.
    CHECK(v.G.imag() * z.imag() < 0.0);
    const auto c = stieltjes::solve_G(p, std::conj(z));
    CHECK(std::abs(c.G - std::conj(v.G)) < 1e-12 * (1.0 + std::abs(v.G)));
  }
  const GeneralParams p({0.3, 0.9});
  const cplx z(1e6, 1.0);
  CHECK(std::abs(stieltjes::solve_G(p, z).G - 1.0 / z) <= 10.0 / std::norm(z));
}

TEST_CASE("Marchenko-Pastur by inversion") {
  const GeneralParams mp({1.0});
  CHECK(stieltjes::density_from_inversion(mp, 2.0) == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-7));
  const auto v = stieltjes::solve_G(mp, cplx(2.0, 1e-6));
  CHECK(-v.G.imag() / kPi == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-4));
  CHECK(std::abs(stieltjes::density_from_inversion(mp, 40.0)) <= 1e-8);
}

TEST_CASE("equal ratios reduce to the density module") {
  for (auto [M, y] : {std::pair{2, 0.5}, std::pair{3, 0.75}, std::pair{1, 0.25}}) {
    const density::ModelParams d(M, y);
    const GeneralParams g(std::vector<double>(M, y));
    const auto e = density::support_edges(d);
    for (int i = 1; i < 30; ++i) {
      const double x = e.x_minus + (e.x_plus - e.x_minus) * i / 30.0;
      CHECK(std::abs(stieltjes::density_from_inversion(g, x) - density::density_at(d, x)) < 1e-6);
    }
  }
}

TEST_CASE("moment series") {
  const auto fc = stieltjes::moments_series(GeneralParams({1.0, 1.0, 1.0}), 4);
  CHECK(fc[0] == 1.0);
  CHECK(fc[1] == 1.0);
  CHECK(fc[2] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(fc[3] == doctest::Approx(22.0).epsilon(1e-15));
  CHECK(fc[4] == doctest::Approx(140.0).epsilon(1e-15));
  const GeneralParams p({0.2, 0.45, 0.9});
  const auto m = stieltjes::moments_series(p, 3);
  CHECK(m[2] == doctest::Approx(1.0 + 0.2 + 0.45 + 0.9).epsilon(1e-15));
  CHECK_THROWS_AS(stieltjes::moments_series(p, 13), DomainError);
}

TEST_CASE("moments of the inverted density match the series for distinct ratios") {
  const GeneralParams p({0.3, 0.8});
  const auto sup = stieltjes::numeric_support(p, 2000);
  const auto series = stieltjes::moments_series(p, 3);
  // Composite midpoint rule on the numeric support; only a coarse check.
  const int n = 4000;
  double m[4] = {0, 0, 0, 0};
  const double h = (sup.upper - sup.lower) / n;
  for (int i = 0; i < n; ++i) {
    const double x = sup.lower + (i + 0.5) * h;
    const double r = stieltjes::density_from_inversion(p, x) * h;
    for (int k = 0; k < 4; ++k) m[k] += r * std::pow(x, k);
  }
  for (int k = 0; k < 4; ++k) CHECK(m[k] == doctest::Approx(series[k]).epsilon(2e-3));
}

TEST_CASE("numeric support brackets the known edges") {
  const GeneralParams g({0.5, 0.5});
  const auto e = density::support_edges(density::ModelParams(2, 0.5));
  const auto s = stieltjes::numeric_support(g);
  CHECK(s.lower >= e.x_minus - 0.01);
  CHECK(s.lower <= e.x_minus + 0.01);
  CHECK(s.upper <= e.x_plus + 0.01);
  CHECK(s.upper >= e.x_plus - 0.02);
}

TEST_CASE("permuted ratios give bitwise identical results") {
  const GeneralParams a({0.3, 0.6, 0.9});
  const GeneralParams b({0.9, 0.3, 0.6});
  for (double x : {0.2, 1.0, 2.5}) {
    CHECK(stieltjes::density_from_inversion(a, x) == stieltjes::density_from_inversion(b, x));
  }
}
