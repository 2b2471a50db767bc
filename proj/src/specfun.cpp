#include "ginprod/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/sin_pi.hpp>

#include "ginprod/errors.hpp"

namespace ginprod::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// B_{2k} / (2k (2k-1)), k = 1..8
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,       1.0 / 1260.0,
    -1.0 / 1680.0,       1.0 / 1188.0,       -691.0 / 360360.0,
    1.0 / 156.0,         -3617.0 / 122400.0};

// B_{2k}, k = 1..8
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,  -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0};

// Below this real part the asymptotic series is not used directly.
constexpr double kAsymptoticThreshold = 10.0;

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

int shift_count(cplx z) {
  if (z.real() >= kAsymptoticThreshold) return 0;
  return static_cast<int>(std::ceil(kAsymptoticThreshold - z.real()));
}

cplx stirling_tail(cplx z) {
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx sum = 0.0;
  for (int k = static_cast<int>(kStirling.size()) - 1; k >= 0; --k) {
    sum = sum * inv2 + kStirling[k];
  }
  return sum * inv;
}

cplx log_gamma_asymptotic(cplx z) {
  return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + stirling_tail(z);
}

cplx log1p_complex(cplx w) {
  const double u = w.real();
  const double v = w.imag();
  const double re = 0.5 * std::log1p(2.0 * u + u * u + v * v);
  const double im = std::atan2(v, 1.0 + u);
  return {re, im};
}

// log(b + delta) - log(b) along the segment, when the segment stays clear of
// the branch cut.
bool log_difference_small(cplx b, cplx delta, cplx* out) {
  const double nb = std::abs(b);
  if (!(std::abs(delta) < 0.5 * nb)) return false;
  const cplx a = b + delta;
  if (b.real() >= 0.0 || b.imag() * a.imag() > 0.0) {
    *out = log1p_complex(delta / b);
    return true;
  }
  return false;
}

}  // namespace

LogComplex LogComplex::from_log(cplx log_value) {
  double phase = std::remainder(log_value.imag(), 2.0 * kPi);
  if (phase <= -kPi) phase += 2.0 * kPi;
  return {log_value.real(), phase};
}

LogComplex LogComplex::from_value(cplx value) {
  if (value == cplx(0.0)) {
    throw DomainError("LogComplex: zero has no logarithm");
  }
  return {std::log(std::abs(value)), std::arg(value)};
}

cplx LogComplex::exp() const { return std::polar(std::exp(log_magnitude), phase); }

LogComplex LogComplex::operator*(const LogComplex& o) const {
  return from_log({log_magnitude + o.log_magnitude, phase + o.phase});
}

LogComplex LogComplex::operator/(const LogComplex& o) const {
  return from_log({log_magnitude - o.log_magnitude, phase - o.phase});
}

cplx log_gamma(cplx z) {
  if (is_pole(z)) throw DomainError("log_gamma: pole at nonpositive integer");
  const int n = shift_count(z);
  cplx correction = 0.0;
  for (int k = 0; k < n; ++k) correction += std::log(z + static_cast<double>(k));
  return log_gamma_asymptotic(z + static_cast<double>(n)) - correction;
}

double log_gamma(double x) {
  if (x <= 0.0 && x == std::round(x)) {
    throw DomainError("log_gamma: pole at nonpositive integer");
  }
  return std::lgamma(x);
}

cplx log_gamma_ratio(cplx a, cplx b) {
  if (is_pole(a) || is_pole(b)) {
    throw DomainError("log_gamma_ratio: pole at nonpositive integer");
  }
  const cplx delta = a - b;
  if (delta == cplx(0.0)) return 0.0;

  const int n = std::max(shift_count(a), shift_count(b));
  const cplx big_a = a + static_cast<double>(n);
  const cplx big_b = b + static_cast<double>(n);

  cplx log_ratio_big;
  if (!log_difference_small(big_b, delta, &log_ratio_big)) {
    return log_gamma(a) - log_gamma(b);
  }

  // Stirling difference at the shifted arguments.
  cplx result = delta * std::log(big_b) + (big_a - 0.5) * log_ratio_big - delta +
                stirling_tail(big_a) - stirling_tail(big_b);

  for (int k = 0; k < n; ++k) {
    const cplx bk = b + static_cast<double>(k);
    cplx d;
    if (log_difference_small(bk, delta, &d)) {
      result -= d;
    } else {
      result -= std::log(a + static_cast<double>(k)) - std::log(bk);
    }
  }
  return result;
}

cplx digamma(cplx z) {
  if (is_pole(z)) throw DomainError("digamma: pole at nonpositive integer");
  const int n = shift_count(z);
  cplx correction = 0.0;
  for (int k = 0; k < n; ++k) correction += 1.0 / (z + static_cast<double>(k));
  const cplx w = z + static_cast<double>(n);
  const cplx inv2 = 1.0 / (w * w);
  cplx series = 0.0;
  for (int k = static_cast<int>(kBernoulli.size()) - 1; k >= 0; --k) {
    series = series * inv2 + kBernoulli[k] / (2.0 * (k + 1));
  }
  return std::log(w) - 0.5 / w - series * inv2 - correction;
}

cplx trigamma(cplx z) {
  if (is_pole(z)) throw DomainError("trigamma: pole at nonpositive integer");
  const int n = shift_count(z);
  cplx correction = 0.0;
  for (int k = 0; k < n; ++k) {
    const cplx t = 1.0 / (z + static_cast<double>(k));
    correction += t * t;
  }
  const cplx w = z + static_cast<double>(n);
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  for (int k = static_cast<int>(kBernoulli.size()) - 1; k >= 0; --k) {
    series = series * inv2 + kBernoulli[k];
  }
  return inv + 0.5 * inv2 + series * inv2 * inv + correction;
}

double sinc_pi(double u) {
  if (std::abs(u) < 1e-4) {
    const double t = kPi * u;
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return boost::math::sin_pi(u) / (kPi * u);
}

}  // namespace ginprod::specfun
