#include "ginprod/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ginprod/errors.hpp"
#include "ginprod/polyroots.hpp"
#include "ginprod/quadrature.hpp"

namespace ginprod::density {

double density_inside(const ModelParams& p, double lo, double hi, double x);

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEdgeProximity = 1e-9;
// Closest approach to theta = 0 or pi used when bracketing.
constexpr double kAngleFloor = 1e-10;
constexpr double kQuadTol = 1e-13;
// Density values carry ~1e-15 absolute noise from the root solve; the floor
// has to sit well above it.
constexpr double kAbsTolPerUnit = 1e-13;

void require_open_angle(double theta, const char* op) {
  if (!(theta > 0.0 && theta < kPi)) {
    throw DomainError(std::string(op) + ": theta must lie in (0, pi)");
  }
}

// sin(k theta), reflected about pi/2 so it keeps full relative accuracy as
// theta -> pi.
double sin_k(int k, double theta) {
  if (theta <= 0.5 * kPi) return std::sin(k * theta);
  const double s = std::sin(k * (kPi - theta));
  return k % 2 == 0 ? -s : s;
}

double signed_sqrt_numerator(const ModelParams& p, double theta, double disc) {
  const int M = p.M();
  const double a = p.excess();
  const double b = a * sin_k(M - 1, theta) + sin_k(M + 1, theta) / p.y();
  const double sm = sin_k(M, theta);
  const double root = std::copysign(std::sqrt(std::max(disc, 0.0)), sm);
  if ((b >= 0.0) == (root >= 0.0)) return (b + root) / (2.0 * sm);
  // The roots multiply to (1 - y)/y^2; use that where b and root cancel.
  return 2.0 * (1.0 - p.y()) / (p.y() * p.y()) * sm / (b - root);
}

// x(theta) from r; identical to the ratio form with one power of r cancelled.
double x_from_r(const ModelParams& p, double theta, double r) {
  const int M = p.M();
  return std::pow(p.y(), M) * std::pow(r, M - 1) *
         (r * sin_k(M + 1, theta) - p.excess() * sin_k(M, theta)) / sin_k(1, theta);
}

double rho_from_r(const ModelParams& p, double theta, double r) {
  return std::abs(r * sin_k(1, theta)) / (kPi * x_from_r(p, theta, r));
}

void require_physical(const ModelParams& p, double theta, const char* op) {
  require_open_angle(theta, op);
  const AngleBranch b = classify_angle(p, theta);
  if (b == AngleBranch::kLeading || b == AngleBranch::kTrailing) return;
  const double d = discriminant(p, theta);
  throw InadmissibleAngle(theta, d,
                          std::string(op) + ": angle " + std::to_string(theta) +
                              (b == AngleBranch::kSpurious
                                   ? " is off the physical branch"
                                   : " has negative discriminant " + std::to_string(d)));
}

std::vector<cplx> resolvent_coefficients(const ModelParams& p, cplx z) {
  const int M = p.M();
  const double yM = std::pow(p.y(), M);
  std::vector<cplx> c(M + 2, 0.0);
  c[0] = yM;
  c[1] = -yM * p.excess();
  c[M] += -z;
  c[M + 1] += z / p.y();
  return c;
}

// Substitution u in [0, 2] -> x in [x_minus, x_plus] that flattens the edge
// behaviour of the density: x - x_minus ~ u^p on the left piece, and
// x_plus - x ~ (2 - u)^2 on the right piece.
struct EdgeMap {
  double x_minus, x_plus, split;
  double left_power;
  double left_span, right_span;

  explicit EdgeMap(const ModelParams& p) {
    const SpectralSupport s = support_edges(p);
    x_minus = s.x_minus;
    x_plus = s.x_plus;
    split = 0.5 * (x_minus + x_plus);
    left_power = p.square() ? static_cast<double>(p.M() + 1) : 2.0;
    left_span = std::pow(split - x_minus, 1.0 / left_power);
    right_span = std::sqrt(x_plus - split);
  }

  double x_at(double u) const {
    if (u <= 1.0) return x_minus + std::pow(u * left_span, left_power);
    const double s = (2.0 - u) * right_span;
    return x_plus - s * s;
  }

  double jacobian(double u) const {
    if (u <= 1.0) {
      const double s = u * left_span;
      return left_power * std::pow(s, left_power - 1.0) * left_span;
    }
    return 2.0 * (2.0 - u) * right_span * right_span;
  }

  double u_at(double x) const {
    if (x <= x_minus) return 0.0;
    if (x >= x_plus) return 2.0;
    if (x <= split) return std::pow(x - x_minus, 1.0 / left_power) / left_span;
    return 2.0 - std::sqrt(x_plus - x) / right_span;
  }
};

double integrate_u(const ModelParams& p, const EdgeMap& map, double u0, double u1, int k) {
  auto integrand = [&](double u) {
    const double x = map.x_at(u);
    const double w = density_inside(p, map.x_minus, map.x_plus, x) * map.jacobian(u);
    return k == 0 ? w : w * std::pow(x, k);
  };
  double total = 0.0;
  // The jacobian changes form at u = 1.
  if (u0 < 1.0 && u1 > 1.0) {
    total += quad::gauss_kronrod(integrand, u0, 1.0, kQuadTol, 18, kAbsTolPerUnit).value;
    total += quad::gauss_kronrod(integrand, 1.0, u1, kQuadTol, 18, kAbsTolPerUnit).value;
  } else if (u1 > u0) {
    total += quad::gauss_kronrod(integrand, u0, u1, kQuadTol, 18, kAbsTolPerUnit).value;
  }
  return total;
}

template <class F>
double bisect_decreasing(F&& f, double lo, double hi, double target) {
  // f decreasing on [lo, hi], f(lo) >= target >= f(hi).
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double flo = f(lo);
  const double fhi = f(hi);
  return std::abs(flo - target) <= std::abs(fhi - target) ? lo : hi;
}

}  // namespace

ModelParams::ModelParams(int factors, double ratio) : factors_(factors), ratio_(ratio) {
  if (factors < 1) throw DomainError("ModelParams: M must be >= 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw DomainError("ModelParams: y must lie in (0, 1]");
}

double discriminant(const ModelParams& p, double theta) {
  require_open_angle(theta, "discriminant");
  const int M = p.M();
  const double y = p.y();
  const double a = p.excess();
  const double s1 = sin_k(M - 1, theta);
  const double s2 = sin_k(M + 1, theta);
  const double sm = sin_k(M, theta);
  const double st = sin_k(1, theta);
  // cos(2M theta) + cos(2 theta) - 2 written with sines: no cancellation near 0 or pi.
  return a * a * s1 * s1 + s2 * s2 / (y * y) - 2.0 * (1.0 - y) / (y * y) * (sm * sm + st * st);
}

double critical_angle(const ModelParams& p) {
  const int M = p.M();
  if (p.square()) return kPi / (M + 1);
  // Discriminant is positive just above 0 and turns negative before pi/M.
  constexpr int kScan = 512;
  const double upper = kPi / M;
  double prev = 0.0;
  for (int i = 1; i <= kScan; ++i) {
    const double t = upper * i / kScan;
    if (t >= kPi) break;
    if (discriminant(p, t) < 0.0) {
      double lo = prev > 0.0 ? prev : t * 1e-6;
      double hi = t;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (discriminant(p, mid) >= 0.0 ? lo : hi) = mid;
      }
      return lo;
    }
    prev = t;
  }
  throw NumericalError("critical_angle: discriminant never turned negative");
}

AngleBranch classify_angle(const ModelParams& p, double theta) {
  require_open_angle(theta, "classify_angle");
  const double tc = critical_angle(p);
  if (p.square()) {
    if (theta < tc) return AngleBranch::kLeading;
  } else {
    if (theta <= tc) return AngleBranch::kLeading;
    if (theta >= kPi - tc) return AngleBranch::kTrailing;
  }
  return discriminant(p, theta) >= 0.0 ? AngleBranch::kSpurious : AngleBranch::kInadmissible;
}

double radial(const ModelParams& p, double theta) {
  require_open_angle(theta, "radial");
  const double d = discriminant(p, theta);
  if (d < 0.0) {
    const AngleBranch b = classify_angle(p, theta);
    // Rounding at the branch end can leave a tiny negative value.
    if (b != AngleBranch::kLeading && b != AngleBranch::kTrailing) {
      throw InadmissibleAngle(theta, d, "radial: negative discriminant " + std::to_string(d));
    }
  }
  return signed_sqrt_numerator(p, theta, d);
}

std::pair<double, double> endpoints_r(const ModelParams& p) {
  const double M = p.M();
  const double a = p.excess();
  const double d = std::sqrt((M + 1) * (M + 1) + 4.0 * M * a);
  const double big = M + 1 + 2.0 * M * a;
  const double r0 = (big + d) / (2.0 * M);
  // (d - big) rationalized: big^2 - d^2 = 4 M^2 a (a + 1).
  const double rpi = -(4.0 * M * M * a * (a + 1.0)) / (big + d) / (2.0 * M);
  return {r0, rpi};
}

double x_of_theta(const ModelParams& p, double theta) {
  require_physical(p, theta, "x_of_theta");
  return x_from_r(p, theta, radial(p, theta));
}

double rho_of_theta(const ModelParams& p, double theta) {
  require_physical(p, theta, "rho_of_theta");
  return rho_from_r(p, theta, radial(p, theta));
}

ThetaSample sample_theta(const ModelParams& p, double theta) {
  require_open_angle(theta, "sample_theta");
  ThetaSample s;
  s.theta = theta;
  s.discriminant = discriminant(p, theta);
  s.branch = classify_angle(p, theta);
  s.admissible = s.branch == AngleBranch::kLeading || s.branch == AngleBranch::kTrailing;
  if (s.admissible || s.branch == AngleBranch::kSpurious) {
    s.r = signed_sqrt_numerator(p, theta, s.discriminant);
  } else {
    s.r = kNaN;
  }
  if (s.admissible) {
    s.x = x_from_r(p, theta, s.r);
    s.rho = rho_from_r(p, theta, s.r);
  } else {
    s.x = kNaN;
    s.rho = kNaN;
  }
  return s;
}

SpectralSupport support_edges(const ModelParams& p) {
  const double M = p.M();
  const double y = p.y();
  const double a = p.excess();
  const double d = std::sqrt((M + 1) * (M + 1) + 4.0 * M * a);
  const double first_plus = M + 1 + 2.0 * a + d;
  const double second_plus = M + 1 + 2.0 * M * a + d;
  // The minus factors rationalized to avoid cancellation as y -> 1.
  const double first_minus = 4.0 * a * (a + 1.0) / first_plus;
  const double second_minus = 4.0 * M * M * a * (a + 1.0) / second_plus;
  const double scale = std::pow(y, M + 1) / (std::pow(2.0, M + 1) * std::pow(M, M));
  SpectralSupport s;
  s.x_minus = scale * first_minus * std::pow(second_minus, M);
  s.x_plus = scale * first_plus * std::pow(second_plus, M);
  return s;
}

cplx resolvent_residual(const ModelParams& p, cplx z, cplx W) {
  const int M = p.M();
  return std::pow(p.y(), M) * (W - p.excess()) * std::pow(W, M) - (W - 1.0 / p.y()) * z;
}

ResolventRoot resolvent_root(const ModelParams& p, double z) {
  const auto coeffs = resolvent_coefficients(p, z);
  const auto roots = poly_roots(coeffs);
  const cplx* best = nullptr;
  for (const cplx& w : roots) {
    // Relative cut: real roots come back with rounding-level imaginary parts.
    if (w.imag() > 1e-14 * std::abs(w) && (best == nullptr || std::arg(w) < std::arg(*best))) {
      best = &w;
    }
  }
  if (best == nullptr) {
    throw NumericalError("resolvent_root: no root with positive imaginary part at z = " +
                         std::to_string(z));
  }
  ResolventRoot out;
  out.z = z;
  out.W = *best;
  out.G = (out.W - 1.0 / p.y() + 1.0) / z;
  out.residual = std::abs(resolvent_residual(p, z, out.W));
  return out;
}

// Same as density_at with the edges already known; the edge search dominates
// otherwise when called from quadrature.
double density_inside(const ModelParams& p, double lo, double hi, double x) {
  if (!(x > lo && x < hi)) return 0.0;
  try {
    return resolvent_root(p, x).W.imag() / (kPi * x);
  } catch (const NumericalError&) {
    return 0.0;
  }
}

DensityPoint evaluate_density(const ModelParams& p, double x) {
  const SpectralSupport s = support_edges(p);
  DensityPoint out;
  out.x = x;
  if (!(x > s.x_minus && x < s.x_plus)) return out;
  out.near_edge = std::min(x - s.x_minus, s.x_plus - x) < kEdgeProximity;
  try {
    out.root = resolvent_root(p, x);
    out.has_root = true;
    out.rho = out.root.W.imag() / (kPi * x);
  } catch (const NumericalError&) {
    // Only reachable within rounding distance of an edge.
    out.near_edge = true;
  }
  return out;
}

double density_at(const ModelParams& p, double x) { return evaluate_density(p, x).rho; }

double theta_of_x(const ModelParams& p, double x0) {
  const SpectralSupport s = support_edges(p);
  if (!(x0 > s.x_minus && x0 < s.x_plus)) {
    throw DomainError("theta_of_x: x0 must lie in the open support (" +
                      std::to_string(s.x_minus) + ", " + std::to_string(s.x_plus) + ")");
  }
  const double tc = critical_angle(p);
  auto x_at = [&](double t) { return x_from_r(p, t, signed_sqrt_numerator(p, t, discriminant(p, t))); };

  double lo, hi, seed;
  const double arg_w = std::arg(resolvent_root(p, x0).W);
  if (p.square()) {
    lo = kAngleFloor;
    hi = std::nextafter(tc, 0.0);
    seed = arg_w;
  } else {
    const double x_mid = x_at(tc);
    // The branches meet at x_mid, a square-root point of the discriminant
    // where x(theta) is only good to ~sqrt(eps). Ties go to the leading branch.
    if (x0 >= x_mid - 1e-7 * (1.0 + x_mid)) {
      lo = kAngleFloor;
      hi = tc;
      seed = arg_w;
    } else {
      lo = kPi - tc;
      hi = kPi - kAngleFloor;
      seed = kPi - arg_w;
    }
  }
  // Narrow the bracket around the root-solver seed when it brackets.
  const double width = 1e-6;
  const double slo = std::max(lo, seed - width);
  const double shi = std::min(hi, seed + width);
  if (slo < shi && x_at(slo) >= x0 && x_at(shi) <= x0) {
    lo = slo;
    hi = shi;
  }
  return bisect_decreasing(x_at, lo, hi, x0);
}

double cdf(const ModelParams& p, double x) {
  const EdgeMap map(p);
  return integrate_u(p, map, 0.0, map.u_at(x), 0);
}

std::vector<double> cdf_sorted(const ModelParams& p, std::span<const double> xs) {
  const EdgeMap map(p);
  std::vector<double> out(xs.size());
  double u_prev = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0 && xs[i] < xs[i - 1]) throw DomainError("cdf_sorted: input must be ascending");
    const double u = map.u_at(xs[i]);
    acc += integrate_u(p, map, u_prev, u, 0);
    out[i] = acc;
    u_prev = u;
  }
  return out;
}

double moment(const ModelParams& p, int k) {
  if (k < 0 || k > 12) throw DomainError("moment: k must lie in [0, 12]");
  const EdgeMap map(p);
  return integrate_u(p, map, 0.0, 2.0, k);
}

SaddleData saddle(const ModelParams& p, double theta) {
  require_physical(p, theta, "saddle");
  const int M = p.M();
  const double y = p.y();
  const double r = radial(p, theta);
  const double x = x_from_r(p, theta, r);
  const cplx q = std::polar(r, theta) - 1.0 / y;
  const cplx q1 = q + 1.0;
  const cplx qy = q + 1.0 / y;

  SaddleData out;
  out.theta = theta;
  out.q = q;
  out.g_value = q1 * (std::log(q1) - 1.0) + static_cast<double>(M) * qy * (std::log(qy) - 1.0) -
                q * (std::log(q) - 1.0) + static_cast<double>(M) * q * std::log(y) -
                q * std::log(x);
  out.g_prime = std::log(q1 * std::pow(qy * y, M) / (q * x));
  out.g_double_prime = 1.0 / q1 + static_cast<double>(M) / qy - 1.0 / q;
  return out;
}

}  // namespace ginprod::density
