#include "ginprod/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "ginprod/errors.hpp"
#include "ginprod/quadrature.hpp"
#include "ginprod/specfun.hpp"

namespace ginprod::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

void require_consistent(const FiniteModel& model, const density::ModelParams& params) {
  if (model.M() != params.M()) throw DomainError("model and limiting parameters disagree on M");
  for (int v : model.nu) {
    const double y = static_cast<double>(model.N) / (model.N + v);
    if (std::abs(y - params.y()) > 1e-9) {
      throw DomainError("limiting ratio y = " + std::to_string(params.y()) +
                        " does not match N/(N + nu) = " + std::to_string(y));
    }
  }
}

std::vector<double> sine_matrix(const std::vector<double>& xi) {
  const std::size_t n = xi.size();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = specfun::sinc_pi(xi[i] - xi[j]);
  }
  return m;
}

}  // namespace

double delta_MN(const FiniteModel& model) {
  double acc = 0.0;
  for (int d : model.dims()) acc += 1.0 / d;
  return acc;
}

double determinant(const std::vector<double>& matrix, int n) {
  if (n < 0 || matrix.size() != static_cast<std::size_t>(n) * n) {
    throw DomainError("determinant: matrix size does not match n");
  }
  if (n == 0) return 1.0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      matrix.data(), n, n);
  return m.fullPivLu().determinant();
}

double correlation(const FiniteModel& model, const std::vector<double>& points, const ContourConfig& cfg) {
  const int n = static_cast<int>(points.size());
  if (n < 1 || n > 8) throw DomainError("correlation: need 1 to 8 points");
  const auto block = kernel_block(model, points, points, cfg);
  std::vector<double> m(block.size());
  for (std::size_t k = 0; k < block.size(); ++k) m[k] = block[k].value;
  return determinant(m, n);
}

ScaledWindow scaled_points(const FiniteModel& model, const density::ModelParams& params, double theta,
                           const std::vector<double>& xi) {
  require_consistent(model, params);
  const double r = density::radial(params, theta);
  const double x = density::x_of_theta(params, theta);
  ScaledWindow w;
  w.theta = theta;
  w.xi = xi;
  w.scale = model.N * std::abs(r * std::sin(theta)) / kPi;
  w.center = std::log(x);
  for (int v : model.nu) w.center += std::log(static_cast<double>(model.N + v));
  w.points.reserve(xi.size());
  for (double t : xi) w.points.push_back(w.center + t / w.scale);
  return w;
}

SineReport sine_limit_check(const FiniteModel& model, const density::ModelParams& params, double theta,
                            const std::vector<double>& xi_grid, const ContourConfig& cfg) {
  if (xi_grid.size() < 2 || xi_grid.size() > 8) throw DomainError("sine_limit_check: need 2 to 8 grid points");
  const ScaledWindow w = scaled_points(model, params, theta, xi_grid);
  const double r = density::radial(params, theta);
  const double gauge_rate = kPi * (std::cos(theta) / std::sin(theta) - 1.0 / (params.y() * r * std::sin(theta)));
  const auto block = kernel_block(model, w.points, w.points, cfg);

  const std::size_t n = xi_grid.size();
  SineReport rep;
  rep.theta = theta;
  rep.xi = xi_grid;
  rep.scaled_kernel.resize(n * n);
  std::vector<double> raw(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = block[i * n + j].value / w.scale;
      raw[i * n + j] = k;
      rep.scaled_kernel[i * n + j] = std::exp(-gauge_rate * (xi_grid[i] - xi_grid[j])) * k;
      const double dev = std::abs(rep.scaled_kernel[i * n + j] - specfun::sinc_pi(xi_grid[i] - xi_grid[j]));
      rep.sup_pointwise_deviation = std::max(rep.sup_pointwise_deviation, dev);
    }
    rep.diagonal_deviation = std::max(rep.diagonal_deviation, std::abs(raw[i * n + i] - 1.0));
  }
  const std::vector<double> pair{raw[0], raw[1], raw[n], raw[n + 1]};
  rep.det_pair = determinant(pair, 2);
  const double s = specfun::sinc_pi(xi_grid[1] - xi_grid[0]);
  rep.det_pair_target = 1.0 - s * s;
  rep.det_pair_deviation = std::abs(rep.det_pair - rep.det_pair_target);
  rep.det_full = determinant(raw, static_cast<int>(n));
  rep.det_full_target = determinant(sine_matrix(xi_grid), static_cast<int>(n));
  rep.det_full_deviation = std::abs(rep.det_full - rep.det_full_target);
  return rep;
}

CorollaryReport corollary_density_check(const FiniteModel& model, const density::ModelParams& params,
                                        double theta, const ContourConfig& cfg) {
  const ScaledWindow w = scaled_points(model, params, theta, {0.0});
  CorollaryReport rep;
  rep.theta = theta;
  rep.center = w.center;
  rep.kernel_value = kernel_log(model, w.center, w.center, cfg).value;
  rep.normalized = rep.kernel_value / (model.N * density::x_of_theta(params, theta));
  rep.rho = density::rho_of_theta(params, theta);
  rep.relative_deviation = std::abs(rep.normalized - rep.rho) / rep.rho;
  return rep;
}

MassReport total_mass_report(const FiniteModel& model, const ContourConfig& cfg) {
  double center = 0.0;
  for (int v : model.nu) center += std::log(static_cast<double>(model.N + v));
  MassReport rep;
  int evaluations = 0;
  auto diag = [&](double x) {
    ++evaluations;
    return kernel_log(model, x, x, cfg).value;
  };
  // Ends are negligible once K there is far below the mass per unit length.
  const double edge_limit = 1e-7 * model.N;
  constexpr double kWiden = 5.0;
  constexpr int kMaxWiden = 40;
  rep.lower = center - 10.0;
  rep.upper = center + 10.0;
  for (int i = 0; std::abs(diag(rep.lower)) > edge_limit; ++i) {
    if (i == kMaxWiden) throw NumericalError("total_mass: left tail never became negligible");
    rep.lower -= kWiden;
  }
  for (int i = 0; std::abs(diag(rep.upper)) > edge_limit; ++i) {
    if (i == kMaxWiden) throw NumericalError("total_mass: right tail never became negligible");
    rep.upper += kWiden;
  }
  // Composite Gauss-Legendre; K(x, x) is smooth, so halving the panel width
  // once is enough to confirm the sum.
  const auto nodes = quad::legendre_nodes();
  const auto weights = quad::legendre_weights();
  auto composite = [&](int panels) {
    const double half = (rep.upper - rep.lower) / (2.0 * panels);
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = rep.lower + (2.0 * p + 1.0) * half;
      for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * diag(mid + half * nodes[i]);
    }
    return acc * half;
  };
  int panels = static_cast<int>(std::ceil(rep.upper - rep.lower));
  double previous = composite(panels);
  for (int level = 0;; ++level) {
    panels *= 2;
    rep.mass = composite(panels);
    if (std::abs(rep.mass - previous) <= 1e-8 * model.N) break;
    if (level == 4) throw NumericalError("total_mass: composite rule did not settle");
    previous = rep.mass;
  }
  rep.evaluations = evaluations;
  return rep;
}

double total_mass(const FiniteModel& model, const ContourConfig& cfg) {
  return total_mass_report(model, cfg).mass;
}

}  // namespace ginprod::kernel
