#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ginprod/errors.hpp"
#include "ginprod/kernel.hpp"
#include "ginprod/polyroots.hpp"
#include "ginprod/quadrature.hpp"
#include "ginprod/specfun.hpp"
#include "multiprec.hpp"

namespace ginprod::kernel {

namespace {

using cplx = std::complex<double>;
using specfun::LogComplex;
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Guard bits kept above the measured cancellation.
constexpr long kGuardBits = 96;
constexpr long kMinBits = 128;

double required_bits(double tol) { return std::log2(1.0 / tol) + 8.0; }

// log F_y(s) = -y s + sum_j log Gamma(s + N_j) - log Gamma(s)
cplx log_gamma_factor(const std::vector<int>& dims, double y, cplx s) {
  cplx acc = -y * s - specfun::log_gamma(s);
  for (int d : dims) acc += specfun::log_gamma(s + static_cast<double>(d));
  return acc;
}

double truncation_cap(const FiniteModel& model, double tol) {
  // e^{-M pi T / 2} (2 + T)^{(M+1)(N + max nu)} = tol / 10, largest root.
  const double M = model.M();
  const int max_nu = model.nu.empty() ? 0 : *std::max_element(model.nu.begin(), model.nu.end());
  const double power = (M + 1.0) * (model.N + max_nu);
  auto g = [&](double T) { return -M * kPi * T / 2.0 + power * std::log(2.0 + T) - std::log(tol / 10.0); };
  double lo = 1.0;
  double hi = 2.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

// Per-x residue sum with its chosen accumulation.
struct SumChannel {
  detail::ResidueSum sum;
  bool use_double = false;
  long bits = kMinBits;
};

struct NodeValue {
  LogComplex value;
  double bits_lost = 0.0;
  bool failed = false;  // double accumulation could not meet tol
};

NodeValue eval_sum(const SumChannel& ch, cplx s, double tol, Accumulation mode) {
  NodeValue out;
  if (ch.use_double) {
    const detail::SumValue v = ch.sum.evaluate_double(s);
    if (v.bits_lost + required_bits(tol) <= 52.0) {
      out.value = v.value;
      out.bits_lost = v.bits_lost;
      return out;
    }
    if (mode == Accumulation::kDouble) {
      out.value = v.value;
      out.bits_lost = v.bits_lost;
      out.failed = true;
      return out;
    }
  }
  long bits = ch.bits;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const detail::SumValue v = ch.sum.evaluate_mp(s, bits);
    if (v.bits_lost + kGuardBits / 2 <= static_cast<double>(bits) || !std::isfinite(v.bits_lost)) {
      out.value = v.value;
      out.bits_lost = v.bits_lost;
      return out;
    }
    bits = static_cast<long>(std::ceil(v.bits_lost)) + kGuardBits;
  }
  throw PrecisionError("residue sum: cancellation exceeds every attempted precision",
                       static_cast<double>(bits) * std::log10(2.0));
}

// High-precision probe used while scanning for T.
detail::SumValue probe_sum(const detail::ResidueSum& sum, cplx s) {
  // Only the magnitude matters here; double is plenty when little cancels.
  const detail::SumValue quick = sum.evaluate_double(s);
  if (quick.bits_lost <= 24.0) return quick;
  long bits = kMinBits * 2;
  for (;;) {
    const detail::SumValue v = sum.evaluate_mp(s, bits);
    if (v.bits_lost + 64 <= static_cast<double>(bits) || !std::isfinite(v.bits_lost) ||
        bits > (1L << 20)) {
      return v;
    }
    bits = static_cast<long>(std::ceil(v.bits_lost)) + 2 * kGuardBits;
  }
}

void check_abscissa(const FiniteModel& model, double c) {
  if (!(c > -model.N)) throw DomainError("contour: c must exceed -N");
  if (c <= 0.0 && c == std::floor(c)) throw DomainError("contour: c must avoid the poles at -k");
}

struct Plan {
  double c = 0.5;
  double T = 0.0;
  double truncation_estimate = 0.0;  // integrand magnitude bound beyond T
};

Plan make_plan(const FiniteModel& model, std::vector<SumChannel>& channels,
               const std::vector<double>& ys, const ContourConfig& cfg, double c) {
  const std::vector<int> dims = model.dims();
  const double M = model.M();
  Plan plan;
  plan.c = c;
  double P = M * (c - 0.5);
  for (int d : dims) P += d;
  const double tau_env = std::max(1.0, 2.0 * P / (M * kPi));
  // The closed-form cap is loose for large N but tight for tiny ones.
  const double cap = cfg.T ? *cfg.T : std::max(truncation_cap(model, cfg.tol), 4.0 * tau_env + 64.0 / M);
  const double step = std::max(0.25, tau_env / 64.0);
  const double log_tol = std::log(cfg.tol);

  std::vector<double> worst_bits(channels.size(), 0.0);
  double peak = -std::numeric_limits<double>::infinity();
  int quiet = 0;
  double tau = 0.0;
  double last = 0.0;
  for (;;) {
    const cplx s(c, tau);
    double here = -std::numeric_limits<double>::infinity();
    std::vector<double> log_f(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) log_f[j] = log_gamma_factor(dims, ys[j], s).real();
    for (std::size_t i = 0; i < channels.size(); ++i) {
      const detail::SumValue v = probe_sum(channels[i].sum, s);
      if (std::isfinite(v.bits_lost)) worst_bits[i] = std::max(worst_bits[i], v.bits_lost);
      for (double lf : log_f) here = std::max(here, lf + v.value.log_magnitude);
    }
    peak = std::max(peak, here);
    last = here;
    if (cfg.T) {
      if (tau >= cap) break;
      tau = std::min(cap, tau + step);
      continue;
    }
    quiet = (tau >= tau_env && here < peak + log_tol - 8.0) ? quiet + 1 : 0;
    if (quiet >= 3) break;
    if (tau >= cap) {
      throw ContourConfigError("contour: integrand still significant at the truncation cap T = " +
                               std::to_string(cap));
    }
    tau = std::min(cap, tau + step);
  }
  plan.T = tau;
  // Beyond T the modulus decays at least like e^{-M pi tau / 2}.
  plan.truncation_estimate = std::exp(last) * 2.0 / (M * kPi) / kPi;
  if (cfg.T && last > peak + log_tol) {
    throw ContourConfigError("contour: truncation bound not met at the configured T = " +
                             std::to_string(*cfg.T));
  }

  for (std::size_t i = 0; i < channels.size(); ++i) {
    const double need = worst_bits[i] + required_bits(cfg.tol);
    switch (cfg.accumulation) {
      case Accumulation::kDouble:
        if (need > 52.0) {
          throw PrecisionError("residue sum loses " + std::to_string(worst_bits[i] * std::log10(2.0)) +
                                   " digits; use the extended accumulation mode",
                               worst_bits[i] * std::log10(2.0));
        }
        channels[i].use_double = true;
        break;
      case Accumulation::kAuto:
        channels[i].use_double = need <= 52.0;
        break;
      case Accumulation::kExtended:
        channels[i].use_double = false;
        break;
    }
    const long bits = std::max(kMinBits, static_cast<long>(std::ceil(worst_bits[i])) + kGuardBits);
    channels[i].bits = (bits + 63) / 64 * 64;
    if (!channels[i].use_double) channels[i].sum.prepare(channels[i].bits);
  }
  return plan;
}

}  // namespace

FiniteModel::FiniteModel(int n, std::vector<int> extra) : N(n), nu(std::move(extra)) {
  if (N < 1) throw DomainError("FiniteModel: N must be >= 1");
  if (nu.empty()) throw DomainError("FiniteModel: need at least one factor (M >= 1)");
  for (int v : nu) {
    if (v < 0) throw DomainError("FiniteModel: every nu_j must be >= 0");
  }
}

std::vector<int> FiniteModel::dims() const {
  std::vector<int> d{N};
  for (int v : nu) d.push_back(N + v);
  return d;
}

namespace {

// log of F_y(c) sum_k |A_k / (c + k)| on the real axis: the integrand scale
// before any cancellation. Off the bulk the contour goes where this is least.
double real_axis_scale(const std::vector<int>& dims, double x, double y, double c) {
  const int n = dims.front();
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(n);
  for (int k = 0; k < n; ++k) {
    double l = -k * x - std::lgamma(k + 1.0) - std::log(std::abs(c + k));
    for (int d : dims) l -= std::lgamma(static_cast<double>(d - k));
    logs[k] = l;
    top = std::max(top, l);
  }
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return top + std::log(acc) + log_gamma_factor(dims, y, cplx(c, 0.0)).real();
}

}  // namespace

double auto_abscissa(const FiniteModel& model, double x, double y) {
  const std::vector<int> dims = model.dims();
  const int M = model.M();
  const double N = model.N;
  // Leading-order saddle: s = N q with (q + 1) prod_l (1 + y_l q) = x_s q.
  double log_scale = 0.0;
  for (int l = 1; l <= M; ++l) log_scale += std::log(static_cast<double>(dims[l]));
  const double xs = std::exp(y - log_scale);
  std::vector<cplx> asc{1.0, 1.0};
  double mean_ratio = 0.0;
  for (int l = 1; l <= M; ++l) {
    const double yl = N / dims[l];
    mean_ratio += yl / M;
    std::vector<cplx> next(asc.size() + 1, 0.0);
    for (std::size_t k = 0; k < asc.size(); ++k) {
      next[k] += asc[k];
      next[k + 1] += yl * asc[k];
    }
    asc = std::move(next);
  }
  asc[1] -= xs;
  std::vector<cplx> coeffs(asc.rbegin(), asc.rend());

  std::vector<cplx> roots;
  if (std::isfinite(xs) && xs > 0.0) roots = poly_roots(coeffs);
  const cplx* pick = nullptr;
  for (const cplx& q : roots) {
    if (q.imag() <= 1e-8 * std::abs(q)) continue;
    if (pick == nullptr || std::arg(q + 1.0 / mean_ratio) < std::arg(*pick + 1.0 / mean_ratio)) pick = &q;
  }
  if (pick != nullptr) {
    cplx s = N * *pick;
    bool converged = false;
    for (int it = 0; it < 60 && !converged; ++it) {
      cplx phi = -specfun::digamma(s) - y;
      cplx dphi = -specfun::trigamma(s);
      for (int d : dims) {
        phi += specfun::digamma(s + static_cast<double>(d));
        dphi += specfun::trigamma(s + static_cast<double>(d));
      }
      cplx step = phi / dphi;
      if (std::abs(step) > 0.5 * std::abs(s)) step *= 0.5 * std::abs(s) / std::abs(step);
      s -= step;
      if (s.real() <= -N + 0.5) break;
      converged = std::abs(step) <= 1e-12 * (1.0 + std::abs(s));
    }
    if (converged && std::isfinite(s.real()) && std::abs(s.imag()) > 1e-6 * (1.0 + std::abs(s))) {
      double c = s.real();
      if (c < 0.5) c = std::max(std::floor(c) + 0.5, -N + 0.5);
      return c;
    }
  }

  // No complex saddle: x is outside the bulk.
  double best_c = 0.5;
  double best = real_axis_scale(dims, x, y, best_c);
  auto consider = [&](double c) {
    const double v = real_axis_scale(dims, x, y, c);
    if (std::isfinite(v) && v < best) {
      best = v;
      best_c = c;
    }
  };
  for (int k = 1; k <= model.N; ++k) consider(0.5 - k);
  for (double c = 1.0; c <= 8.0 * N * M + 8.0; c *= 1.25) consider(c);
  return best_c;
}

std::vector<KernelEvaluation> kernel_block(const FiniteModel& model, const std::vector<double>& xs,
                                           const std::vector<double>& ys, const ContourConfig& cfg) {
  if (xs.empty() || ys.empty()) return {};
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw DomainError("contour: tol must lie in (0, 1)");
  if (cfg.panels < 1 || cfg.max_panels < cfg.panels) throw DomainError("contour: bad panel counts");
  if (cfg.T && !(*cfg.T > 0.0)) throw DomainError("contour: T must be positive");
  const std::vector<int> dims = model.dims();

  double c;
  if (cfg.c) {
    c = *cfg.c;
  } else {
    const double x_mid = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double y_mid = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    c = auto_abscissa(model, x_mid, y_mid);
  }
  check_abscissa(model, c);

  std::vector<SumChannel> channels;
  channels.reserve(xs.size());
  for (double x : xs) channels.push_back({detail::ResidueSum(dims, x)});
  const Plan plan = make_plan(model, channels, ys, cfg, c);

  const auto nodes = quad::legendre_nodes();
  const auto weights = quad::legendre_weights();
  const int per_panel = static_cast<int>(nodes.size());
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  const std::size_t pairs = nx * ny;

  std::vector<double> previous(pairs, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> current(pairs, 0.0);
  std::vector<double> l1(pairs, 0.0);
  double worst_bits = 0.0;
  int panels = std::max(cfg.panels, static_cast<int>(std::ceil(plan.T / 16.0)));
  panels = std::min(panels, cfg.max_panels);

  for (;;) {
    const int count = panels * per_panel;
    const double half = plan.T / (2.0 * panels);
    std::vector<NodeValue> sums(count * nx);
    std::vector<LogComplex> factors(count * ny);
    bool failed = false;
    std::string failure;

    auto evaluate_node = [&](int n) {
      const int panel = n / per_panel;
      const double mid = (2.0 * panel + 1.0) * half;
      const cplx s(plan.c, mid + half * nodes[n % per_panel]);
      for (std::size_t i = 0; i < nx; ++i) sums[n * nx + i] = eval_sum(channels[i], s, cfg.tol, cfg.accumulation);
      for (std::size_t j = 0; j < ny; ++j) factors[n * ny + j] = LogComplex::from_log(log_gamma_factor(dims, ys[j], s));
    };

    if (cfg.policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
      for (int n = 0; n < count; ++n) {
        try {
          evaluate_node(n);
        } catch (const std::exception& e) {
#pragma omp critical(ginprod_kernel_failure)
          {
            failed = true;
            failure = e.what();
          }
        }
      }
      if (failed) throw NumericalError(failure);
    } else {
      for (int n = 0; n < count; ++n) evaluate_node(n);
    }

    // Serial, fixed-order reduction keeps parallel and serial runs identical.
    for (int n = 0; n < count; ++n) {
      for (std::size_t i = 0; i < nx; ++i) {
        const NodeValue& v = sums[n * nx + i];
        if (v.failed) {
          throw PrecisionError("residue sum loses " + std::to_string(v.bits_lost * std::log10(2.0)) +
                                   " digits at a quadrature node; use the extended accumulation mode",
                               v.bits_lost * std::log10(2.0));
        }
        if (std::isfinite(v.bits_lost)) worst_bits = std::max(worst_bits, v.bits_lost);
      }
    }
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        double scale = -std::numeric_limits<double>::infinity();
        for (int n = 0; n < count; ++n) {
          scale = std::max(scale, sums[n * nx + i].value.log_magnitude + factors[n * ny + j].log_magnitude);
        }
        double acc = 0.0;
        double acc_abs = 0.0;
        if (std::isfinite(scale)) {
          for (int n = 0; n < count; ++n) {
            const LogComplex& sv = sums[n * nx + i].value;
            const LogComplex& fv = factors[n * ny + j];
            const double mag = std::exp(sv.log_magnitude + fv.log_magnitude - scale);
            const double w = weights[n % per_panel];
            acc += w * mag * std::cos(sv.phase + fv.phase);
            acc_abs += w * mag;
          }
        }
        const double factor = std::isfinite(scale) ? std::exp(scale) * half / kPi : 0.0;
        current[i * ny + j] = acc * factor;
        l1[i * ny + j] = acc_abs * factor;
      }
    }

    bool done = true;
    for (std::size_t k = 0; k < pairs; ++k) {
      if (std::isnan(previous[k])) {
        done = false;
        break;
      }
      const double change = std::abs(current[k] - previous[k]);
      const double target = std::max({cfg.tol * std::abs(current[k]), cfg.tol * cfg.abs_floor,
                                      256.0 * kEps * l1[k]});
      if (change > target) {
        done = false;
        break;
      }
    }
    if (done) break;
    if (panels * 2 > cfg.max_panels) {
      throw ContourConfigError("contour: quadrature did not settle within " +
                               std::to_string(cfg.max_panels) + " panels");
    }
    previous = current;
    panels *= 2;
  }

  std::vector<KernelEvaluation> out(pairs);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t k = i * ny + j;
      KernelEvaluation& e = out[k];
      e.x = xs[i];
      e.y = ys[j];
      e.value = current[k];
      e.abs_error_estimate = std::abs(current[k] - previous[k]) + plan.truncation_estimate +
                             256.0 * kEps * l1[k];
      e.c = plan.c;
      e.T = plan.T;
      e.panels = panels;
      e.bits_lost = worst_bits;
    }
  }
  return out;
}

KernelEvaluation kernel_log(const FiniteModel& model, double x, double y, const ContourConfig& cfg) {
  return kernel_block(model, {x}, {y}, cfg).front();
}

std::vector<KernelEvaluation> kernel_diagonal(const FiniteModel& model, const std::vector<double>& xs,
                                              const ContourConfig& cfg) {
  std::vector<KernelEvaluation> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(kernel_log(model, x, x, cfg));
  return out;
}

}  // namespace ginprod::kernel
