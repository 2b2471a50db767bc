#pragma once

// Residue sum S_x(s) = sum_{k<N} A_k / (s + k) with
// A_k = (-1)^k e^{-kx} / (k! prod_j Gamma(N_j - k)).
// The A_k alternate and the sum cancels by many orders of magnitude in the
// bulk, so it is evaluated either in double with compensated summation or in
// MPFR at a precision fitted to the observed loss.

#include <mpfr.h>

#include <complex>
#include <vector>

#include "ginprod/specfun.hpp"

namespace ginprod::detail {

class Mpfr {
 public:
  explicit Mpfr(long bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

struct SumValue {
  specfun::LogComplex value;
  double bits_lost = 0.0;  // log2(sum |terms|) - log2 |S|
};

class ResidueSum {
 public:
  // dims holds N_0..N_M with N_0 = N the number of terms.
  ResidueSum(std::vector<int> dims, double x);

  int terms() const { return dims_.front(); }
  double x() const { return x_; }

  SumValue evaluate_double(std::complex<double> s) const;
  // Uses the prepared coefficients when `bits` does not exceed their
  // precision, otherwise builds a private set.
  SumValue evaluate_mp(std::complex<double> s, long bits) const;

  // Not thread-safe; call before sharing the object across threads.
  void prepare(long bits);
  long prepared_bits() const { return prepared_bits_; }

 private:
  std::vector<Mpfr> build(long bits) const;
  SumValue sum_mp(std::complex<double> s, long bits, const std::vector<Mpfr>& a) const;

  std::vector<int> dims_;
  double x_;
  double log_a0_;  // log |A_0|
  // A_k / A_0 = mantissa_k * 2^exponent_k, built by the exact-factor recurrence.
  std::vector<double> mantissa_;
  std::vector<long> exponent_;
  long prepared_bits_ = 0;
  std::vector<Mpfr> coeffs_;
};

}  // namespace ginprod::detail
