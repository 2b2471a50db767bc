#pragma once

#include <complex>
#include <vector>

namespace ginprod::stieltjes {

using cplx = std::complex<double>;

// Limiting ratios y_l = lim N/N_l, one per factor; stored ascending.
class GeneralParams {
 public:
  explicit GeneralParams(std::vector<double> ratios);

  int M() const { return static_cast<int>(ratios_.size()); }
  const std::vector<double>& ratios() const { return ratios_; }

 private:
  std::vector<double> ratios_;
};

struct StieltjesValue {
  cplx z;
  cplx G;
  double residual = 0.0;
};

// 1 - zG + G prod_l (1 - y_l + z y_l G)
cplx resolvent_residual(const GeneralParams& p, cplx z, cplx G);

// Coefficients of the resolvent polynomial in G, highest power first.
std::vector<cplx> resolvent_polynomial(const GeneralParams& p, cplx z);

// Above this modulus the physical root is simply the one nearest 1/z.
double tracking_radius(const GeneralParams& p);

// Physical branch, continued from the G ~ 1/z regime along a vertical path.
// G(z) = int rho(x)/(z - x) dx, so Im G has the sign opposite to Im z.
StieltjesValue solve_G(const GeneralParams& p, cplx z);

// -Im G(x + i eps)/pi, Richardson-extrapolated over eps = 1e-3, 5e-4, 2.5e-4.
double density_from_inversion(const GeneralParams& p, double x);

// m_0..m_K of the limiting law from the formal 1/z expansion.
std::vector<double> moments_series(const GeneralParams& p, int K);

struct NumericSupport {
  double lower = 0.0;
  double upper = 0.0;
};

// Smallest interval containing every grid point where the inverted density
// exceeds `threshold`. Grid spans (0, tracking radius / 10].
NumericSupport numeric_support(const GeneralParams& p, int grid_points = 4000,
                               double threshold = 1e-6);

}  // namespace ginprod::stieltjes
