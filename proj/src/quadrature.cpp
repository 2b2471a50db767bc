#include "ginprod/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ginprod::quad {

namespace {

constexpr int kPoints = 20;

struct LegendreTable {
  std::array<double, kPoints> nodes{};
  std::array<double, kPoints> weights{};

  LegendreTable() {
    using rule = boost::math::quadrature::gauss<double, kPoints>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    constexpr int half = kPoints / 2;
    for (int i = 0; i < half; ++i) {
      nodes[half - 1 - i] = -x[i];
      weights[half - 1 - i] = w[i];
      nodes[half + i] = x[i];
      weights[half + i] = w[i];
    }
  }
};

const LegendreTable& table() {
  static const LegendreTable t;
  return t;
}

}  // namespace

namespace {

Estimate bisect_panels(const std::function<double(double)>& f, double a, double b, double rel_tol,
                       unsigned depth, double abs_tol_per_unit) {
  // Map to [-1, 1] here: Boost's own finite-interval path applies its
  // 2 eps |K| error floor before scaling by the half-width, which swamps the
  // estimate on very short panels.
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double t) { return f(centre + half * t); };
  Estimate out;
  out.value = half * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -1.0, 1.0, 0,
                                                                                   0.0, &out.error);
  out.error *= std::abs(half);
  const double floor = abs_tol_per_unit * std::abs(b - a);
  if (depth == 0 || out.error <= std::max(rel_tol * std::abs(out.value), floor)) return out;
  const double mid = 0.5 * (a + b);
  const Estimate left = bisect_panels(f, a, mid, rel_tol, depth - 1, abs_tol_per_unit);
  const Estimate right = bisect_panels(f, mid, b, rel_tol, depth - 1, abs_tol_per_unit);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace

Estimate gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                       double rel_tol, unsigned max_depth, double abs_tol_per_unit) {
  Estimate out;
  if (a == b) return out;
  if (abs_tol_per_unit > 0.0) return bisect_panels(f, a, b, rel_tol, max_depth, abs_tol_per_unit);
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, max_depth, rel_tol, &out.error, &l1);
  return out;
}

std::span<const double> legendre_nodes() { return table().nodes; }
std::span<const double> legendre_weights() { return table().weights; }

}  // namespace ginprod::quad
