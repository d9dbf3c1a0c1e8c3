#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qpoly/distributed.hpp"
#include "qpoly/rootfinder.hpp"

using namespace qpoly;
using qpoly::testing::random_point;
using qpoly::testing::rel_err;

namespace {

DistributedSystem constant_kernel(Complex c, Complex a = 0.0, double tau = 1.0) {
  return {a, tau, [c](double) { return c; }};
}

Complex closed_form_unit_kernel(Complex lambda, Complex a, double tau) {
  if (lambda == Complex{}) return -a - tau;
  return lambda - a - (1.0 - std::exp(-lambda * tau)) / lambda;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto& rule = gauss_legendre(16);
  ASSERT_EQ(rule.nodes.size(), 16u);
  for (int k = 0; k <= 31; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    EXPECT_NEAR(s, exact, 1e-14) << "k=" << k;
  }
  EXPECT_EQ(&gauss_legendre(16), &rule);
}

TEST(EvaluateDistributed, Examples) {
  const auto zero = constant_kernel(0.0, Complex(3, 4));
  EXPECT_EQ(evaluate_distributed(zero, Complex(1, 1)), Complex(-2, -3));
  const auto unit = constant_kernel(1.0);
  EXPECT_NEAR(std::abs(evaluate_distributed(unit, 1.0) - std::exp(-1.0)), 0.0, 1e-14);
  const auto shifted = constant_kernel(1.0, Complex(0.5, -2));
  EXPECT_LT(std::abs(evaluate_distributed(shifted, 0.0) - (-Complex(0.5, -2) - 1.0)), 1e-14);
}

TEST(DerivativeDistributed, Examples) {
  EXPECT_EQ(derivative_distributed(constant_kernel(0.0), Complex(2, 7)), Complex(1.0));
  EXPECT_NEAR(std::abs(derivative_distributed(constant_kernel(1.0), 0.0) - 1.5), 0.0, 1e-14);
}

TEST(DistributedProperties, QuadratureMatchesClosedForm) {
  std::mt19937_64 rng(50);
  for (double tau : {1.0, 0.3, 2.5}) {
    const Complex a(0.25, -0.5);
    const auto sys = constant_kernel(1.0, a, tau);
    EXPECT_LE(rel_err(evaluate_distributed(sys, 0.0), closed_form_unit_kernel(0.0, a, tau)), 1e-10);
    for (int i = 0; i < 50; ++i) {
      const Complex lambda = random_point(rng, 30.0);
      EXPECT_LE(rel_err(evaluate_distributed(sys, lambda), closed_form_unit_kernel(lambda, a, tau)), 1e-10)
          << "tau=" << tau << " lambda=" << lambda;
    }
  }
}

TEST(DistributedProperties, LinearInTheKernel) {
  std::mt19937_64 rng(51);
  const double tau = 1.7;
  const KernelFn m1 = [](double t) { return Complex(std::cos(3 * t), t * t); };
  const KernelFn m2 = [](double t) { return Complex(std::exp(-t), 0.0); };
  const Complex c1(0.5, 2), c2(-1.25, 0.5);
  const DistributedSystem s1{0.0, tau, m1}, s2{0.0, tau, m2};
  const DistributedSystem combo{0.0, tau, [&](double t) { return c1 * m1(t) + c2 * m2(t); }};
  for (int i = 0; i < 20; ++i) {
    const Complex lambda = random_point(rng, 15.0);
    // f(lambda) = lambda - Q, so Q = lambda - f
    const Complex q1 = lambda - evaluate_distributed(s1, lambda), q2 = lambda - evaluate_distributed(s2, lambda);
    const Complex q = lambda - evaluate_distributed(combo, lambda);
    EXPECT_LE(rel_err(q, c1 * q1 + c2 * q2), 1e-10);
  }
}

TEST(DistributedProperties, DerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(52);
  const DistributedSystem sys{Complex(1, -1), 2.0, [](double t) { return Complex(1.0 + t, std::sin(t)); }};
  for (int i = 0; i < 20; ++i) {
    const Complex lambda = random_point(rng, 10.0);
    const double h = 1e-6;
    const Complex fd = (evaluate_distributed(sys, lambda + h) - evaluate_distributed(sys, lambda - h)) / (2 * h);
    EXPECT_LE(rel_err(derivative_distributed(sys, lambda), fd), 1e-6) << lambda;
  }
}

TEST(DistributedProperties, ZeroKernelHasTheSingleRootA) {
  const Complex a(3, 4);
  const auto sys = constant_kernel(0.0, a);
  const auto target = make_target(sys, QuadratureConfig{});
  const auto rep = find_roots(target, Region{-7, 13, -6, 14}, FindOptions{});
  EXPECT_EQ(rep.count.count, 1);
  ASSERT_EQ(rep.roots.size(), 1u);
  EXPECT_LT(std::abs(rep.roots[0].location - a), 1e-10);
}

TEST(TabulatedKernel, InterpolatesLinearly) {
  const auto k = tabulated_kernel({0.0, 1.0, 2.0}, {0.0, Complex(2, 2), 4.0});
  EXPECT_EQ(k(0.5), Complex(1, 1));
  EXPECT_EQ(k(1.5), Complex(3, 1));
  EXPECT_EQ(k(-1.0), Complex(0.0));
  EXPECT_EQ(k(3.0), Complex(4.0));
  EXPECT_THROW(tabulated_kernel({0.0}, {1.0}), InvalidArgument);
  EXPECT_THROW(tabulated_kernel({0.0, 0.0}, {1.0, 1.0}), InvalidArgument);
}

TEST(KernelCheck, Examples) {
  EXPECT_FALSE(kernel_nonzero_check(constant_kernel(0.0)).nonzero);
  const DistributedSystem square{0.0, 1.0, [](double t) { return Complex(t * t); }};
  const auto k = kernel_nonzero_check(square);
  EXPECT_TRUE(k.nonzero);
  EXPECT_DOUBLE_EQ(k.sup_estimate, 1.0);
  EXPECT_THROW(kernel_nonzero_check(square, 8), InvalidArgument);
}

TEST(KernelCheck, AliasingHazardOnCoarseGrid) {
  // sin(15 pi theta / tau) vanishes at all 16 grid points theta_i = tau i / 15
  const double tau = 2.0;
  const DistributedSystem sys{0.0, tau, [tau](double t) { return Complex(std::sin(15 * std::numbers::pi * t / tau)); }};
  EXPECT_FALSE(kernel_nonzero_check(sys, 16).nonzero);
  EXPECT_TRUE(kernel_nonzero_check(sys, 256).nonzero);
}

TEST(EvaluateDistributed, ReportsNonConvergence) {
  const auto sys = constant_kernel(1.0);
  QuadratureConfig cfg;
  cfg.max_panels = 2;
  cfg.nodes_per_panel = 2;
  EXPECT_THROW(evaluate_distributed(sys, Complex(0, 200), cfg), ConvergenceError);
  cfg = QuadratureConfig{};
  cfg.rel_tol = 0.0;
  EXPECT_THROW(evaluate_distributed(sys, 1.0, cfg), InvalidArgument);
  EXPECT_THROW(evaluate_distributed(DistributedSystem{0.0, -1.0, sys.kernel}, 1.0), InvalidArgument);
}
