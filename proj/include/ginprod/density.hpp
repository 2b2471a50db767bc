#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace ginprod::density {

using cplx = std::complex<double>;

// Equal-ratio limiting model: M factors, every ratio N/N_l -> y.
class ModelParams {
 public:
  ModelParams(int factors, double ratio);

  int M() const { return factors_; }
  double y() const { return ratio_; }
  // 1/y - 1, the offset appearing throughout the parametrization.
  double excess() const { return 1.0 / ratio_ - 1.0; }
  bool square() const { return ratio_ == 1.0; }

 private:
  int factors_;
  double ratio_;
};

// Where an angle sits relative to the parametrization of the law.
//  kLeading:  W = r e^{i theta} with r > 0, covers [x_mid, x_plus).
//  kTrailing: r < 0, conjugate-reflected root, covers (x_minus, x_mid].
//  kSpurious: discriminant >= 0 but the root is not the physical one.
//  kInadmissible: discriminant < 0.
enum class AngleBranch { kLeading, kTrailing, kSpurious, kInadmissible };

struct ThetaSample {
  double theta = 0.0;
  double discriminant = 0.0;
  double r = 0.0;
  double x = 0.0;
  double rho = 0.0;
  bool admissible = false;  // on the leading or trailing branch
  AngleBranch branch = AngleBranch::kInadmissible;
};

struct SpectralSupport {
  double x_minus = 0.0;
  double x_plus = 0.0;
};

struct ResolventRoot {
  cplx z;
  cplx W;
  cplx G;
  double residual = 0.0;
};

struct SaddleData {
  double theta = 0.0;
  cplx q;
  cplx g_value;
  cplx g_prime;
  cplx g_double_prime;
};

struct DensityPoint {
  double x = 0.0;
  double rho = 0.0;
  bool near_edge = false;
  bool has_root = false;
  ResolventRoot root;
};

double discriminant(const ModelParams& p, double theta);

// End of the leading branch: the first zero of the discriminant, or
// pi/(M+1) when y = 1. The trailing branch is [pi - critical_angle, pi).
double critical_angle(const ModelParams& p);
AngleBranch classify_angle(const ModelParams& p, double theta);

// Signed r(theta). The square root carries the sign of sin(M theta), which
// keeps r continuous on both branches for every M.
double radial(const ModelParams& p, double theta);
std::pair<double, double> endpoints_r(const ModelParams& p);

double x_of_theta(const ModelParams& p, double theta);
double rho_of_theta(const ModelParams& p, double theta);
// Never throws for theta in (0, pi); non-admissible samples carry NaN fields.
ThetaSample sample_theta(const ModelParams& p, double theta);

SpectralSupport support_edges(const ModelParams& p);

// Root of y^M (W + 1 - 1/y) W^M = (W - 1/y) z with Im W > 0 and smallest
// argument, for real z inside the support.
ResolventRoot resolvent_root(const ModelParams& p, double z);
cplx resolvent_residual(const ModelParams& p, cplx z, cplx W);

DensityPoint evaluate_density(const ModelParams& p, double x);
double density_at(const ModelParams& p, double x);

double theta_of_x(const ModelParams& p, double x0);

double cdf(const ModelParams& p, double x);
// Same as cdf() at every point of an ascending sequence, integrated
// piecewise between consecutive points.
std::vector<double> cdf_sorted(const ModelParams& p, std::span<const double> xs);
double moment(const ModelParams& p, int k);

SaddleData saddle(const ModelParams& p, double theta);

}  // namespace ginprod::density
