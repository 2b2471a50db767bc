#pragma once

#include <functional>
#include <span>

namespace ginprod::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive 61-point Gauss-Kronrod on [a, b].
// With abs_tol_per_unit > 0 a panel is also accepted once its error falls
// below abs_tol_per_unit times its width; integrands carrying rounding noise
// near a zero otherwise never meet a purely relative test.
Estimate gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                       double rel_tol = 1e-13, unsigned max_depth = 18,
                       double abs_tol_per_unit = 0.0);

// 20-point Gauss-Legendre rule on [-1, 1], nodes in ascending order.
std::span<const double> legendre_nodes();
std::span<const double> legendre_weights();

}  // namespace ginprod::quad
