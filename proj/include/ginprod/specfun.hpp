#pragma once

#include <complex>

namespace ginprod::specfun {

using cplx = std::complex<double>;

// Complex number stored as (log|z|, arg z). Used to carry products of
// gamma values whose magnitudes leave the double range.
struct LogComplex {
  double log_magnitude = 0.0;
  double phase = 0.0;  // principal, in (-pi, pi]

  static LogComplex from_log(cplx log_value);
  static LogComplex from_value(cplx value);
  cplx log() const { return {log_magnitude, phase}; }
  cplx exp() const;

  LogComplex operator*(const LogComplex& o) const;
  LogComplex operator/(const LogComplex& o) const;
};

// log Gamma(z), continuous analytic branch (real on the positive axis,
// log Gamma(z+1) = log Gamma(z) + log z). Throws DomainError at poles.
cplx log_gamma(cplx z);
double log_gamma(double x);

// log Gamma(a) - log Gamma(b) without cancellation when a is close to b.
cplx log_gamma_ratio(cplx a, cplx b);

cplx digamma(cplx z);
cplx trigamma(cplx z);

// sin(pi u) / (pi u), 1 at u = 0.
double sinc_pi(double u);

}  // namespace ginprod::specfun
