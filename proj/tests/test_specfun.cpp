#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ginprod/errors.hpp"
#include "ginprod/specfun.hpp"

using namespace ginprod;
using specfun::cplx;

TEST_CASE("log_gamma at classical points") {
  CHECK(std::abs(specfun::log_gamma(cplx(1.0))) < 1e-15);
  CHECK(specfun::log_gamma(cplx(0.5)).real() == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK(specfun::log_gamma(cplx(5.0)).real() == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(specfun::log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
}

TEST_CASE("log_gamma matches lgamma on the positive axis") {
  for (double x = 0.05; x < 200.0; x *= 1.37) {
    INFO("x = " << x);
    CHECK(specfun::log_gamma(cplx(x)).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    CHECK(std::abs(specfun::log_gamma(cplx(x)).imag()) < 1e-15);
  }
}

TEST_CASE("log_gamma satisfies the recurrence off the axis") {
  for (cplx z : {cplx(0.3, 2.0), cplx(-3.7, 0.4), cplx(12.0, -40.0), cplx(0.5, 150.0)}) {
    const cplx lhs = specfun::log_gamma(z + 1.0);
    const cplx rhs = specfun::log_gamma(z) + std::log(z);
    // Equal up to a multiple of 2 pi i.
    const cplx d = lhs - rhs;
    const double k = std::round(d.imag() / (2 * std::numbers::pi));
    CHECK(std::abs(d.real()) < 1e-12);
    CHECK(std::abs(d.imag() - 2 * std::numbers::pi * k) < 1e-12);
  }
}

TEST_CASE("log_gamma reflection and conjugation") {
  const cplx z(0.25, 0.75);
  CHECK(std::abs(specfun::log_gamma(std::conj(z)) - std::conj(specfun::log_gamma(z))) < 1e-14);
  // |Gamma(1/2 + i t)|^2 = pi / cosh(pi t)
  const double t = 3.0;
  const double lhs = 2.0 * specfun::log_gamma(cplx(0.5, t)).real();
  CHECK(lhs == doctest::Approx(std::log(std::numbers::pi / std::cosh(std::numbers::pi * t))).epsilon(1e-13));
}

TEST_CASE("log_gamma rejects poles") {
  CHECK_THROWS_AS(specfun::log_gamma(cplx(0.0)), DomainError);
  CHECK_THROWS_AS(specfun::log_gamma(cplx(-3.0)), DomainError);
}

TEST_CASE("log_gamma_ratio") {
  CHECK(std::abs(specfun::log_gamma_ratio(cplx(6.0), cplx(5.0)) - std::log(5.0)) < 1e-14);
  CHECK(std::abs(specfun::log_gamma_ratio(cplx(2.5), cplx(2.5))) < 1e-15);
  const cplx a(10.0, 1.0);
  const cplx direct = specfun::log_gamma(a) - specfun::log_gamma(cplx(10.0));
  CHECK(std::abs(specfun::log_gamma_ratio(a, cplx(10.0)) - direct) < 1e-12);
}

TEST_CASE("digamma and trigamma") {
  constexpr double euler = 0.57721566490153286;
  CHECK(specfun::digamma(cplx(1.0)).real() == doctest::Approx(-euler).epsilon(1e-14));
  CHECK(specfun::trigamma(cplx(1.0)).real() == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-14));
  // psi(z+1) = psi(z) + 1/z
  const cplx z(-2.3, 1.1);
  CHECK(std::abs(specfun::digamma(z + 1.0) - specfun::digamma(z) - 1.0 / z) < 1e-13);
}

TEST_CASE("sinc_pi") {
  CHECK(specfun::sinc_pi(0.0) == 1.0);
  CHECK(specfun::sinc_pi(0.5) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
  CHECK(std::abs(specfun::sinc_pi(1.0)) < 1e-16);
  CHECK(specfun::sinc_pi(1e-9) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("LogComplex round trip and products") {
  const cplx a(-3.0, 4.0);
  const cplx b(0.5, -0.25);
  const auto la = specfun::LogComplex::from_value(a);
  const auto lb = specfun::LogComplex::from_value(b);
  CHECK(std::abs(la.exp() - a) < 1e-14);
  CHECK(std::abs((la * lb).exp() - a * b) < 1e-14);
  CHECK(std::abs((la / lb).exp() - a / b) < 1e-13);
  // Magnitudes far outside double range survive in log form.
  const auto huge = specfun::LogComplex::from_log(cplx(1000.0, 0.5));
  const auto tiny = specfun::LogComplex::from_log(cplx(-999.0, 0.25));
  CHECK(std::abs((huge * tiny).exp() - std::exp(cplx(1.0, 0.75))) < 1e-12);
}
