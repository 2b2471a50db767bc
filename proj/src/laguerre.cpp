#include <cmath>

#include "ginprod/errors.hpp"
#include "ginprod/kernel.hpp"

namespace ginprod::kernel {

namespace {

// Orthonormal Laguerre functions psi_k(lambda) = p_k(lambda) sqrt(lambda^nu e^{-lambda}),
// k < N, as mantissas with a running log scale.
struct LaguerreFunctions {
  std::vector<double> value;
  std::vector<double> log_scale;
};

LaguerreFunctions laguerre_functions(int N, int nu, double lambda) {
  LaguerreFunctions f;
  f.value.resize(N);
  f.log_scale.resize(N);
  double scale = 0.5 * (nu * std::log(lambda) - lambda - std::lgamma(nu + 1.0));
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < N; ++k) {
    f.value[k] = cur;
    f.log_scale[k] = scale;
    if (k + 1 == N) break;
    const double next = ((2.0 * k + 1.0 + nu - lambda) * cur - std::sqrt(k * (k + static_cast<double>(nu))) * prev) /
                        std::sqrt((k + 1.0) * (k + 1.0 + nu));
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
      const double shift = std::log(mag);
      cur /= mag;
      prev /= mag;
      scale += shift;
    }
  }
  return f;
}

}  // namespace

double laguerre_oracle(const FiniteModel& model, double x, double y) {
  if (model.M() != 1) throw DomainError("laguerre_oracle: needs M = 1");
  const int nu = model.nu.front();
  const LaguerreFunctions a = laguerre_functions(model.N, nu, std::exp(x));
  const LaguerreFunctions b = laguerre_functions(model.N, nu, std::exp(y));
  double sum = 0.0;
  for (int k = 0; k < model.N; ++k) {
    sum += a.value[k] * b.value[k] * std::exp(a.log_scale[k] + b.log_scale[k] + 0.5 * (x + y));
  }
  return sum;
}

}  // namespace ginprod::kernel
