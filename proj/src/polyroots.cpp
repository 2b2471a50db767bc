#include "ginprod/polyroots.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ginprod/errors.hpp"

namespace ginprod {

cplx poly_eval(std::span<const cplx> coeffs, cplx z) {
  cplx acc = 0.0;
  for (const cplx& c : coeffs) acc = acc * z + c;
  return acc;
}

cplx poly_derivative_eval(std::span<const cplx> coeffs, cplx z) {
  const std::size_t degree = coeffs.size() - 1;
  cplx acc = 0.0;
  for (std::size_t i = 0; i < degree; ++i) {
    acc = acc * z + coeffs[i] * static_cast<double>(degree - i);
  }
  return acc;
}

cplx polish_root(std::span<const cplx> coeffs, cplx root, int max_iter) {
  cplx best = root;
  double best_res = std::abs(poly_eval(coeffs, root));
  cplx z = root;
  for (int it = 0; it < max_iter && best_res > 0.0; ++it) {
    const cplx d = poly_derivative_eval(coeffs, z);
    if (d == cplx(0.0)) break;
    z -= poly_eval(coeffs, z) / d;
    const double res = std::abs(poly_eval(coeffs, z));
    if (!(res < best_res)) break;
    best = z;
    best_res = res;
  }
  return best;
}

std::vector<cplx> poly_roots(std::span<const cplx> coeffs) {
  if (coeffs.size() < 2 || coeffs.front() == cplx(0.0)) {
    throw DomainError("poly_roots: need degree >= 1 with nonzero leading coefficient");
  }
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n == 1) return {-coeffs[1] / coeffs[0]};

  // Rescale W = s V so the roots have magnitude near one; tiny constant
  // terms otherwise push the eigenvalue iteration into subnormals.
  double scale = 1.0;
  if (coeffs.back() != cplx(0.0)) {
    scale = std::pow(std::abs(coeffs.back() / coeffs.front()), 1.0 / n);
    if (!std::isfinite(scale) || scale == 0.0) scale = 1.0;
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  double power = 1.0;
  for (int j = 0; j < n; ++j) {
    power /= scale;
    companion(0, j) = -coeffs[j + 1] / coeffs[0] * power;
  }
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
  solver.setMaxIterations(100 * n);
  solver.compute(companion, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("poly_roots: companion eigenvalue iteration did not converge");
  }
  std::vector<cplx> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = polish_root(coeffs, scale * solver.eigenvalues()[i]);
  return roots;
}

}  // namespace ginprod
