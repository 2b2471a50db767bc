#pragma once

#include <optional>
#include <vector>

#include "ginprod/density.hpp"

namespace ginprod::kernel {

// N = N_0 is the smallest dimension; factor j has N_j = N + nu_j.
struct FiniteModel {
  int N = 1;
  std::vector<int> nu;

  FiniteModel(int n, std::vector<int> extra);
  int M() const { return static_cast<int>(nu.size()); }
  // N_0..N_M
  std::vector<int> dims() const;
};

enum class Accumulation {
  kAuto,       // double when the observed cancellation allows it, MPFR otherwise
  kDouble,     // compensated double; PrecisionError when the loss is too large
  kExtended,   // MPFR at a precision fitted to the loss
};

enum class ExecPolicy { kParallel, kSerial };

struct ContourConfig {
  // Abscissa of the s-line. Unset: real part of the saddle of the Gamma
  // ratio, moved to the nearest half-integer below 1/2 when it falls there.
  std::optional<double> c;
  // Truncation height. Unset: found by scanning the integrand magnitude.
  std::optional<double> T;
  int panels = 16;        // initial composite Gauss-Legendre panels on [0, T]
  int max_panels = 8192;
  double tol = 1e-10;     // relative change between panel doublings
  double abs_floor = 1e-6;  // values below this are converged in absolute terms
  Accumulation accumulation = Accumulation::kAuto;
  ExecPolicy policy = ExecPolicy::kParallel;
};

struct KernelEvaluation {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  double abs_error_estimate = 0.0;
  // Contour actually used.
  double c = 0.0;
  double T = 0.0;
  int panels = 0;
  double bits_lost = 0.0;  // worst cancellation seen in the residue sum
};

struct ScaledWindow {
  double theta = 0.0;
  std::vector<double> xi;
  double scale = 0.0;   // N |r sin theta| / pi
  double center = 0.0;  // sum_j log(N + nu_j) + log x(theta)
  std::vector<double> points;
};

double delta_MN(const FiniteModel& model);

// K_{M,N}(x, y) for the log-eigenvalues.
KernelEvaluation kernel_log(const FiniteModel& model, double x, double y,
                            const ContourConfig& cfg = {});

// K(xs[i], ys[j]) on a shared contour; row-major, xs.size() x ys.size().
std::vector<KernelEvaluation> kernel_block(const FiniteModel& model, const std::vector<double>& xs,
                                           const std::vector<double>& ys,
                                           const ContourConfig& cfg = {});

// K(x_i, x_i) for each point, each on its own contour.
std::vector<KernelEvaluation> kernel_diagonal(const FiniteModel& model,
                                              const std::vector<double>& xs,
                                              const ContourConfig& cfg = {});

// Contour abscissa chosen when cfg.c is unset.
double auto_abscissa(const FiniteModel& model, double x, double y);

// M = 1 only: Christoffel-Darboux sum for the Laguerre ensemble with
// weight lambda^nu e^{-lambda}, moved to log coordinates.
double laguerre_oracle(const FiniteModel& model, double x, double y);

// det[K(x_i, x_j)], n <= 8.
double correlation(const FiniteModel& model, const std::vector<double>& points,
                   const ContourConfig& cfg = {});
double determinant(const std::vector<double>& matrix, int n);

// Throws DomainError unless every N/(N + nu_j) equals params.y().
ScaledWindow scaled_points(const FiniteModel& model, const density::ModelParams& params,
                           double theta, const std::vector<double>& xi);

struct SineReport {
  double theta = 0.0;
  std::vector<double> xi;
  std::vector<double> scaled_kernel;  // gauged K~(xi_i, xi_j), row-major
  double sup_pointwise_deviation = 0.0;  // diagnostic only
  double det_pair = 0.0;         // 2x2 determinant at (xi_0, xi_1)
  double det_pair_target = 0.0;  // 1 - sinc^2(xi_1 - xi_0)
  double det_pair_deviation = 0.0;
  double det_full = 0.0;         // determinant over the whole grid
  double det_full_target = 0.0;
  double det_full_deviation = 0.0;
  double diagonal_deviation = 0.0;  // max |K~(xi, xi) - 1|
};

// xi_grid needs at least two entries; the pair determinant uses the first two.
SineReport sine_limit_check(const FiniteModel& model, const density::ModelParams& params,
                            double theta, const std::vector<double>& xi_grid,
                            const ContourConfig& cfg = {});

struct CorollaryReport {
  double theta = 0.0;
  double center = 0.0;
  double kernel_value = 0.0;
  double normalized = 0.0;  // K(center, center) / (N x(theta))
  double rho = 0.0;
  double relative_deviation = 0.0;
};

CorollaryReport corollary_density_check(const FiniteModel& model,
                                        const density::ModelParams& params, double theta,
                                        const ContourConfig& cfg = {});

struct MassReport {
  double mass = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int evaluations = 0;
};

// Integral of K(x, x) over a window widened until both ends are negligible.
MassReport total_mass_report(const FiniteModel& model, const ContourConfig& cfg = {});
double total_mass(const FiniteModel& model, const ContourConfig& cfg = {});

}  // namespace ginprod::kernel
