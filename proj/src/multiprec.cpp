#include "multiprec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ginprod/errors.hpp"

namespace ginprod::detail {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Neumaier's variant of Kahan summation.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

double log_sum_exp(const std::vector<double>& logs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double l : logs) top = std::max(top, l);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return top + std::log(acc);
}

// log of a value held as (re, im) in MPFR, returned as (log|z|, arg z).
specfun::LogComplex to_log_complex(mpfr_srcptr re, mpfr_srcptr im) {
  if (mpfr_zero_p(re) && mpfr_zero_p(im)) {
    return {-std::numeric_limits<double>::infinity(), 0.0};
  }
  long e_re = 0;
  long e_im = 0;
  const double m_re = mpfr_zero_p(re) ? 0.0 : mpfr_get_d_2exp(&e_re, re, MPFR_RNDN);
  const double m_im = mpfr_zero_p(im) ? 0.0 : mpfr_get_d_2exp(&e_im, im, MPFR_RNDN);
  long top = std::numeric_limits<long>::min();
  if (m_re != 0.0) top = std::max(top, e_re);
  if (m_im != 0.0) top = std::max(top, e_im);
  const double r = m_re == 0.0 ? 0.0 : std::ldexp(m_re, static_cast<int>(std::max(e_re - top, -2000L)));
  const double i = m_im == 0.0 ? 0.0 : std::ldexp(m_im, static_cast<int>(std::max(e_im - top, -2000L)));
  return {std::log(std::hypot(r, i)) + static_cast<double>(top) * kLn2, std::atan2(i, r)};
}

}  // namespace

ResidueSum::ResidueSum(std::vector<int> dims, double x) : dims_(std::move(dims)), x_(x) {
  if (dims_.empty() || dims_.front() < 1) throw DomainError("ResidueSum: need N >= 1");
  for (int d : dims_) {
    if (d < dims_.front()) throw DomainError("ResidueSum: every N_j must be >= N");
  }
  log_a0_ = 0.0;
  for (int d : dims_) log_a0_ -= std::lgamma(static_cast<double>(d));

  const int n = dims_.front();
  mantissa_.resize(n);
  exponent_.resize(n);
  const double decay = -std::exp(-x_);
  double m = 1.0;
  long e = 0;
  for (int k = 0; k < n; ++k) {
    int shift = 0;
    m = std::frexp(m, &shift);
    e += shift;
    mantissa_[k] = m;
    exponent_[k] = e;
    if (k + 1 == n) break;
    double factor = decay / (k + 1);
    for (int d : dims_) factor *= static_cast<double>(d - k - 1);
    m *= factor;
    if (m == 0.0 || !std::isfinite(m)) {
      // e^{-x} itself under- or overflowed; such x are far outside any spectrum.
      throw DomainError("ResidueSum: x too large in magnitude for the residue recurrence");
    }
  }
}

SumValue ResidueSum::evaluate_double(std::complex<double> s) const {
  const int n = terms();
  const long top = *std::max_element(exponent_.begin(), exponent_.end());
  Compensated re;
  Compensated im;
  std::vector<double> abs_logs(n);
  for (int k = 0; k < n; ++k) {
    const double a = std::ldexp(mantissa_[k], static_cast<int>(std::max(exponent_[k] - top, -2000L)));
    const double ck = s.real() + k;
    const double d = ck * ck + s.imag() * s.imag();
    const double w = a / d;
    re.add(w * ck);
    im.add(-w * s.imag());
    abs_logs[k] = std::log(std::abs(mantissa_[k])) + (exponent_[k] - top) * kLn2 - 0.5 * std::log(d);
  }
  const std::complex<double> sum(re.value(), im.value());
  const double scale = log_a0_ + static_cast<double>(top) * kLn2;
  SumValue out;
  if (sum == 0.0) {
    out.value = {-std::numeric_limits<double>::infinity(), 0.0};
    out.bits_lost = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = {std::log(std::abs(sum)) + scale, std::arg(sum)};
  out.bits_lost = (log_sum_exp(abs_logs) - std::log(std::abs(sum))) / kLn2;
  return out;
}

std::vector<Mpfr> ResidueSum::build(long bits) const {
  const int n = terms();
  std::vector<Mpfr> a;
  a.reserve(n);
  Mpfr decay(bits);
  mpfr_set_d(decay.get(), -x_, MPFR_RNDN);
  mpfr_exp(decay.get(), decay.get(), MPFR_RNDN);
  mpfr_neg(decay.get(), decay.get(), MPFR_RNDN);
  Mpfr t(bits);
  mpfr_set_ui(t.get(), 1, MPFR_RNDN);
  for (int k = 0; k < n; ++k) {
    a.emplace_back(bits);
    mpfr_set(a.back().get(), t.get(), MPFR_RNDN);
    if (k + 1 == n) break;
    mpfr_mul(t.get(), t.get(), decay.get(), MPFR_RNDN);
    for (int d : dims_) mpfr_mul_ui(t.get(), t.get(), static_cast<unsigned long>(d - k - 1), MPFR_RNDN);
    mpfr_div_ui(t.get(), t.get(), static_cast<unsigned long>(k + 1), MPFR_RNDN);
  }
  return a;
}

void ResidueSum::prepare(long bits) {
  if (bits <= prepared_bits_) return;
  coeffs_ = build(bits);
  prepared_bits_ = bits;
}

SumValue ResidueSum::sum_mp(std::complex<double> s, long bits, const std::vector<Mpfr>& a) const {
  const int n = terms();
  Mpfr re(bits), im(bits), ck(bits), d(bits), tau2(bits), w(bits);
  mpfr_set_zero(re.get(), 1);
  mpfr_set_zero(im.get(), 1);
  mpfr_set_d(tau2.get(), s.imag(), MPFR_RNDN);
  mpfr_sqr(tau2.get(), tau2.get(), MPFR_RNDN);
  std::vector<double> abs_logs(n);
  for (int k = 0; k < n; ++k) {
    mpfr_set_d(ck.get(), s.real(), MPFR_RNDN);
    mpfr_add_si(ck.get(), ck.get(), k, MPFR_RNDN);
    mpfr_sqr(d.get(), ck.get(), MPFR_RNDN);
    mpfr_add(d.get(), d.get(), tau2.get(), MPFR_RNDN);
    mpfr_div(w.get(), a[k].get(), d.get(), MPFR_RNDN);
    mpfr_add(im.get(), im.get(), w.get(), MPFR_RNDN);
    mpfr_mul(w.get(), w.get(), ck.get(), MPFR_RNDN);
    mpfr_add(re.get(), re.get(), w.get(), MPFR_RNDN);
    const double ckd = s.real() + k;
    abs_logs[k] = std::log(std::abs(mantissa_[k])) + exponent_[k] * kLn2 -
                  0.5 * std::log(ckd * ckd + s.imag() * s.imag());
  }
  mpfr_mul_d(im.get(), im.get(), -s.imag(), MPFR_RNDN);
  SumValue out;
  const specfun::LogComplex raw = to_log_complex(re.get(), im.get());
  out.value = {raw.log_magnitude + log_a0_, raw.phase};
  out.bits_lost = std::isfinite(raw.log_magnitude)
                      ? (log_sum_exp(abs_logs) - raw.log_magnitude) / kLn2
                      : std::numeric_limits<double>::infinity();
  return out;
}

SumValue ResidueSum::evaluate_mp(std::complex<double> s, long bits) const {
  if (bits <= prepared_bits_) return sum_mp(s, bits, coeffs_);
  return sum_mp(s, bits, build(bits));
}

}  // namespace ginprod::detail
