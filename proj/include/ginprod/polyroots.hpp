#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ginprod {

using cplx = std::complex<double>;

// Coefficients are ordered from the highest power down to the constant term.
cplx poly_eval(std::span<const cplx> coeffs, cplx z);
cplx poly_derivative_eval(std::span<const cplx> coeffs, cplx z);

// All roots, via eigenvalues of the companion matrix followed by Newton
// polishing. The leading coefficient must be nonzero.
std::vector<cplx> poly_roots(std::span<const cplx> coeffs);

// Newton polish of a single root; keeps the iterate with the smallest residual.
cplx polish_root(std::span<const cplx> coeffs, cplx root, int max_iter = 8);

}  // namespace ginprod
