#include "ginprod/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ginprod/errors.hpp"
#include "ginprod/polyroots.hpp"

namespace ginprod::stieltjes {

namespace {

constexpr double kPi = std::numbers::pi;

struct Nearest {
  std::size_t index = 0;
  double distance = std::numeric_limits<double>::infinity();
  double runner_up = std::numeric_limits<double>::infinity();
};

Nearest nearest_root(const std::vector<cplx>& roots, cplx target) {
  Nearest n;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double d = std::abs(roots[i] - target);
    if (d < n.distance) {
      n.runner_up = n.distance;
      n.distance = d;
      n.index = i;
    } else if (d < n.runner_up) {
      n.runner_up = d;
    }
  }
  return n;
}

// A match is trusted when the prediction is clearly closer to one root.
bool unambiguous(const Nearest& n) { return n.distance < 0.25 * n.runner_up; }

StieltjesValue finish(const GeneralParams& p, cplx z, cplx G) {
  const auto coeffs = resolvent_polynomial(p, z);
  StieltjesValue v;
  v.z = z;
  v.G = polish_root(coeffs, G);
  v.residual = std::abs(resolvent_residual(p, z, v.G));
  return v;
}

}  // namespace

GeneralParams::GeneralParams(std::vector<double> ratios) : ratios_(std::move(ratios)) {
  if (ratios_.empty()) throw DomainError("GeneralParams: ratios must be nonempty");
  for (double y : ratios_) {
    if (!(y > 0.0 && y <= 1.0)) throw DomainError("GeneralParams: every ratio must lie in (0, 1]");
  }
  // The law is symmetric in the ratios; a fixed order makes results bitwise
  // independent of how the caller listed them.
  std::sort(ratios_.begin(), ratios_.end());
}

cplx resolvent_residual(const GeneralParams& p, cplx z, cplx G) {
  cplx prod = 1.0;
  for (double y : p.ratios()) prod *= (1.0 - y) + z * y * G;
  return 1.0 - z * G + G * prod;
}

std::vector<cplx> resolvent_polynomial(const GeneralParams& p, cplx z) {
  // prod_l (b_l + c_l G) in ascending powers, then shifted by one for the G factor.
  std::vector<cplx> asc{1.0};
  for (double y : p.ratios()) {
    const cplx b = 1.0 - y;
    const cplx c = z * y;
    std::vector<cplx> next(asc.size() + 1, 0.0);
    for (std::size_t k = 0; k < asc.size(); ++k) {
      next[k] += b * asc[k];
      next[k + 1] += c * asc[k];
    }
    asc = std::move(next);
  }
  std::vector<cplx> full(asc.size() + 1, 0.0);
  for (std::size_t k = 0; k < asc.size(); ++k) full[k + 1] = asc[k];
  full[0] += 1.0;
  full[1] -= z;
  return {full.rbegin(), full.rend()};
}

double tracking_radius(const GeneralParams& p) {
  // Equal unit ratios give the widest support, (M+1)^{M+1}/M^M.
  const double M = p.M();
  return 10.0 * (1.0 + std::pow(M + 1.0, M + 1.0) / std::pow(M, M));
}

StieltjesValue solve_G(const GeneralParams& p, cplx z) {
  if (z.imag() == 0.0) throw DomainError("solve_G: Im z must be nonzero");
  double radius = tracking_radius(p);

  if (std::abs(z) >= radius) {
    const auto roots = poly_roots(resolvent_polynomial(p, z));
    const Nearest n = nearest_root(roots, 1.0 / z);
    if (unambiguous(n)) return finish(p, z, roots[n.index]);
  }

  // Base point far above (or below) z on the same vertical line.
  const double sign = z.imag() > 0.0 ? 1.0 : -1.0;
  const double target_height = std::abs(z.imag());
  double height = 0.0;
  cplx G;
  for (int attempt = 0;; ++attempt) {
    height = std::max(radius, 2.0 * target_height);
    const cplx z0(z.real(), sign * height);
    const auto roots = poly_roots(resolvent_polynomial(p, z0));
    const Nearest n = nearest_root(roots, 1.0 / z0);
    if (unambiguous(n)) {
      G = roots[n.index];
      break;
    }
    if (attempt >= 20) throw BranchTrackingError("solve_G: no isolated root near 1/z0");
    radius *= 4.0;
  }

  // Descend geometrically in |Im|, predicting linearly in log height.
  cplx G_prev = G;
  double h_prev = height;
  double ratio = 0.5;
  constexpr double kMinRatioGap = 1e-12;
  while (height > target_height) {
    const double h_next = std::max(target_height, height * ratio);
    const cplx z_next(z.real(), sign * h_next);
    const auto roots = poly_roots(resolvent_polynomial(p, z_next));
    cplx predicted = G;
    if (h_prev != height) {
      const double s = std::log(h_next / height) / std::log(height / h_prev);
      predicted = G + (G - G_prev) * s;
    }
    const Nearest n = nearest_root(roots, predicted);
    if (!unambiguous(n)) {
      ratio = std::sqrt(ratio);
      if (1.0 - ratio < kMinRatioGap) {
        throw BranchTrackingError("solve_G: roots collide along the path at Im z = " +
                                  std::to_string(h_next));
      }
      continue;
    }
    G_prev = G;
    h_prev = height;
    G = roots[n.index];
    height = h_next;
    ratio = std::max(0.5 * ratio, ratio * ratio);
    ratio = std::max(ratio, 0.125);
  }
  return finish(p, z, G);
}

double density_from_inversion(const GeneralParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("density_from_inversion: x must be positive");
  constexpr double eps = 1e-3;
  auto f = [&](double e) { return -solve_G(p, cplx(x, e)).G.imag() / kPi; };
  const double value = (8.0 * f(eps / 4.0) - 6.0 * f(eps / 2.0) + f(eps)) / 3.0;
  return std::max(value, 0.0);
}

std::vector<double> moments_series(const GeneralParams& p, int K) {
  if (K < 0 || K > 12) throw DomainError("moments_series: K must lie in [0, 12]");
  // u = zG = sum m_k w^k with w = 1/z solves u = 1 + w u prod_l (1 - y_l + y_l u).
  const std::size_t n = static_cast<std::size_t>(K) + 1;
  auto mul = [n](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; i + j < n; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  std::vector<double> u(n, 0.0);
  u[0] = 1.0;
  // Each pass fixes one more coefficient.
  for (int pass = 0; pass < K; ++pass) {
    std::vector<double> prod = u;
    for (double y : p.ratios()) {
      std::vector<double> factor(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) factor[k] = y * u[k];
      factor[0] += 1.0 - y;
      prod = mul(prod, factor);
    }
    std::vector<double> next(n, 0.0);
    next[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) next[k] = prod[k - 1];
    u = std::move(next);
  }
  return u;
}

NumericSupport numeric_support(const GeneralParams& p, int grid_points, double threshold) {
  if (grid_points < 2) throw DomainError("numeric_support: need at least two grid points");
  const double top = tracking_radius(p) / 10.0;
  NumericSupport s{std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
  for (int i = 1; i <= grid_points; ++i) {
    const double x = top * i / grid_points;
    if (density_from_inversion(p, x) > threshold) {
      if (std::isnan(s.lower)) s.lower = x;
      s.upper = x;
    }
  }
  if (std::isnan(s.lower)) throw NumericalError("numeric_support: inverted density never exceeded threshold");
  return s;
}

}  // namespace ginprod::stieltjes
