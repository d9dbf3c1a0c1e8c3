#pragma once

// Distributed-delay characteristic function
//     f(lambda) = lambda - a - int_0^tau M(theta) exp(-lambda theta) dtheta
// evaluated by composite Gauss-Legendre quadrature with panel doubling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qpoly/error.hpp"

namespace qpoly {

using Complex = std::complex<double>;
using KernelFn = std::function<Complex(double)>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendreRule compute_gauss_legendre(int n) {
  // Legendre P_n and its derivative at x via the three-term recurrence.
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Cached rule for n nodes; safe to call concurrently.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(compute_gauss_legendre(n));
  return *slot;
}

/// Piecewise-linear interpolant of a sample table theta_0 < ... < theta_{m-1}.
inline KernelFn tabulated_kernel(std::vector<double> theta, std::vector<Complex> values) {
  if (theta.size() != values.size() || theta.size() < 2)
    throw InvalidArgument("kernel table needs at least two (theta, value) samples of equal count");
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (!(theta[i] > theta[i - 1])) throw InvalidArgument("kernel table theta must be strictly increasing");
  auto th = std::make_shared<const std::vector<double>>(std::move(theta));
  auto vs = std::make_shared<const std::vector<Complex>>(std::move(values));
  return [th, vs](double x) -> Complex {
    const auto& t = *th;
    const auto& v = *vs;
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - t[lo]) / (t[hi] - t[lo]);
    return (1.0 - w) * v[lo] + w * v[hi];
  };
}

struct DistributedSystem {
  Complex a;
  double tau = 1.0;
  KernelFn kernel;

  void validate() const {
    if (!std::isfinite(tau) || !(tau > 0.0)) throw InvalidArgument("distributed horizon tau must be > 0");
    if (!kernel) throw InvalidArgument("distributed system has no kernel");
  }
};

struct QuadratureConfig {
  double rel_tol = 1e-12;
  int max_panels = 4096;
  int nodes_per_panel = 16;

  void validate() const {
    if (!(rel_tol > 0.0)) throw InvalidArgument("quadrature rel_tol must be > 0");
    if (max_panels < 1) throw InvalidArgument("quadrature max_panels must be >= 1");
    if (nodes_per_panel < 2) throw InvalidArgument("quadrature nodes_per_panel must be >= 2");
  }
};

namespace detail {

inline Complex pairwise_sum(std::span<const Complex> xs) {
  if (xs.size() <= 8) {
    Complex s = 0.0;
    for (const auto& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// int_0^tau theta^power M(theta) exp(-lambda theta) dtheta on `panels` equal panels.
inline Complex composite_integral(const DistributedSystem& sys, Complex lambda, int power,
                                  int panels, const GaussLegendreRule& rule) {
  const double h = sys.tau / panels;
  std::vector<Complex> contributions(static_cast<std::size_t>(panels));
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    Complex s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double theta = mid + 0.5 * h * rule.nodes[i];
      Complex g = sys.kernel(theta) * std::exp(-lambda * theta);
      if (power == 1) g *= theta;
      s += rule.weights[i] * g;
    }
    contributions[static_cast<std::size_t>(p)] = 0.5 * h * s;
  }
  return pairwise_sum(contributions);
}

inline Complex adaptive_integral(const DistributedSystem& sys, Complex lambda, int power,
                                 const QuadratureConfig& cfg) {
  sys.validate();
  cfg.validate();
  const GaussLegendreRule& rule = gauss_legendre(cfg.nodes_per_panel);
  const double oscillation = std::abs(lambda) * sys.tau / (2.0 * std::numbers::pi);
  int panels = static_cast<int>(std::min<double>(std::ceil(oscillation) + 1.0, cfg.max_panels));
  Complex previous = composite_integral(sys, lambda, power, panels, rule);
  while (2 * panels <= cfg.max_panels) {
    panels *= 2;
    const Complex current = composite_integral(sys, lambda, power, panels, rule);
    if (std::abs(current - previous) <= cfg.rel_tol * (1.0 + std::abs(current))) return current;
    previous = current;
  }
  throw ConvergenceError("distributed quadrature did not converge within " +
                         std::to_string(cfg.max_panels) + " panels");
}

}  // namespace detail

inline Complex evaluate_distributed(const DistributedSystem& sys, Complex lambda,
                                    const QuadratureConfig& cfg = {}) {
  return lambda - sys.a - detail::adaptive_integral(sys, lambda, 0, cfg);
}

/// f'(lambda) = 1 + int_0^tau theta M(theta) exp(-lambda theta) dtheta.
inline Complex derivative_distributed(const DistributedSystem& sys, Complex lambda,
                                      const QuadratureConfig& cfg = {}) {
  return 1.0 + detail::adaptive_integral(sys, lambda, 1, cfg);
}

struct KernelCheck {
  bool nonzero = false;
  double sup_estimate = 0.0;  // max |M| over the grid
  double threshold = 0.0;
  int grid_points = 0;
};

/// Sampled verdict on whether M vanishes identically. A kernel that happens to
/// vanish at every grid point is reported as zero.
inline KernelCheck kernel_nonzero_check(const DistributedSystem& sys, int grid_points = 256) {
  sys.validate();
  if (grid_points < 16) throw InvalidArgument("kernel_nonzero_check needs grid_points >= 16");
  KernelCheck k;
  k.grid_points = grid_points;
  for (int i = 0; i < grid_points; ++i) {
    const double theta = sys.tau * i / (grid_points - 1);
    k.sup_estimate = std::max(k.sup_estimate, std::abs(sys.kernel(theta)));
  }
  k.threshold = 1e-12 * (1.0 + k.sup_estimate);
  k.nonzero = k.sup_estimate > k.threshold;
  return k;
}

}  // namespace qpoly
