#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qpoly/quasipoly.hpp"

using namespace qpoly;
using qpoly::testing::random_point;
using qpoly::testing::rel_err;

namespace {

const ComplexPolynomial kLambda({0.0, 1.0});

QuasiPolynomial term(long sigma, ComplexPolynomial p) { return QuasiPolynomial::term(Exponent::integer(sigma), std::move(p)); }

QuasiPolynomial random_quasi(std::mt19937_64& rng, bool exact_sigmas, double sigma_max = 5.0) {
  std::uniform_int_distribution<int> nterms(1, 4), deg(0, 3), num(0, 10), den(1, 2);
  std::uniform_real_distribution<double> c(-1.0, 1.0), s(0.0, sigma_max);
  std::vector<ExponentTerm> raw;
  const int k = nterms(rng);
  for (int t = 0; t < k; ++t) {
    std::vector<Complex> coeffs(deg(rng) + 1);
    for (auto& x : coeffs) x = {c(rng), c(rng)};
    Exponent e = exact_sigmas ? Exponent::exact({Rational(num(rng), den(rng))}, std::vector<double>{1.0})
                              : Exponent::numeric(s(rng));
    if (exact_sigmas && e.real_value() > sigma_max) e = Exponent::integer(0);
    raw.push_back({e, ComplexPolynomial(coeffs)});
  }
  return normalize(raw);
}

}  // namespace

TEST(ComplexPolynomial, TrimsTrailingZerosAndReportsDegree) {
  EXPECT_TRUE(ComplexPolynomial({0.0, 0.0}).is_zero());
  EXPECT_EQ(ComplexPolynomial({1.0, 2.0, 0.0}).degree(), 1);
  EXPECT_EQ(ComplexPolynomial().degree(), -1);
  const ComplexPolynomial p({1.0, -3.0, 2.0});
  EXPECT_EQ(p.evaluate(2.0), Complex(3.0));
  EXPECT_EQ(p.derivative(), ComplexPolynomial({-3.0, 4.0}));
}

TEST(Normalize, CancellationGivesZero) {
  auto q = normalize({{Exponent::integer(1), kLambda}, {Exponent::integer(1), -kLambda}});
  EXPECT_TRUE(q.is_zero());
}

TEST(Normalize, MergesEqualExponents) {
  auto q = normalize({{Exponent{}, ComplexPolynomial({1.0})}, {Exponent{}, kLambda}});
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.terms()[0].poly, ComplexPolynomial({1.0, 1.0}));
}

TEST(Normalize, SortsAscending) {
  auto q = normalize({{Exponent::integer(2), ComplexPolynomial({1.0})}, {Exponent::integer(1), kLambda}});
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q.terms()[0].sigma.real_value(), 1.0);
  EXPECT_EQ(q.terms()[1].sigma.real_value(), 2.0);
}

TEST(Normalize, ExactPathIgnoresRoundingFloatPathUsesTolerance) {
  const std::vector<double> basis{std::sqrt(2.0)};
  // exactly equal coordinates merge regardless of the float values
  auto exact = normalize({{Exponent::exact({Rational(1, 3)}, basis), kLambda},
                          {Exponent::exact({Rational(1, 3)}, basis), kLambda}});
  EXPECT_EQ(exact.size(), 1u);
  // distinct rationals stay distinct even when numerically close
  auto distinct = normalize({{Exponent::exact({Rational(1000000000000LL, 1000000000001LL)}, std::vector<double>{1.0}), kLambda},
                             {Exponent::integer(1), kLambda}});
  EXPECT_EQ(distinct.size(), 2u);
  auto floats = normalize({{Exponent::numeric(1.0), kLambda}, {Exponent::numeric(1.0 + 1e-14), kLambda}});
  EXPECT_EQ(floats.size(), 1u);
  auto apart = normalize({{Exponent::numeric(1.0), kLambda}, {Exponent::numeric(1.0 + 1e-9), kLambda}});
  EXPECT_EQ(apart.size(), 2u);
  EXPECT_THROW(normalize({}, -1.0), InvalidArgument);
}

TEST(Add, IdentityAndCancellation) {
  const auto p = term(0, kLambda) + term(1, ComplexPolynomial({1.0}));
  EXPECT_EQ(add(p, QuasiPolynomial{}), p);
  EXPECT_EQ(add(term(0, kLambda), term(1, ComplexPolynomial({1.0}))).size(), 2u);
  EXPECT_EQ(add(p, term(1, ComplexPolynomial({-1.0}))), term(0, kLambda));
}

TEST(Multiply, SquareOfLambdaMinusExp) {
  const auto p = term(0, kLambda) - term(1, ComplexPolynomial({1.0}));
  const auto sq = multiply(p, p);
  const auto expected = normalize({{Exponent{}, ComplexPolynomial({0.0, 0.0, 1.0})},
                                   {Exponent::integer(1), ComplexPolynomial({0.0, -2.0})},
                                   {Exponent::integer(2), ComplexPolynomial({1.0})}});
  EXPECT_EQ(sq, expected);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(rng, 5.0);
    const Complex direct = (z - std::exp(-z)) * (z - std::exp(-z));
    EXPECT_LT(rel_err(evaluate(sq, z), direct), 1e-12);
  }
  EXPECT_EQ(multiply(p, QuasiPolynomial::polynomial({1.0})), p);
  EXPECT_TRUE(multiply(p, QuasiPolynomial{}).is_zero());
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(term(0, kLambda), Complex(2, 1)), Complex(2, 1));
  const auto p = term(0, kLambda) + term(1, ComplexPolynomial({std::numbers::pi / 2}));
  EXPECT_LT(std::abs(evaluate(p, Complex(0, std::numbers::pi / 2))), 1e-15);
  EXPECT_NEAR(std::abs(evaluate(term(2, ComplexPolynomial({1.0})), std::log(2.0)) - 0.25), 0.0, 1e-15);
}

TEST(Evaluate, LogAbsMatchesDirectAndSurvivesOverflow) {
  const auto p = term(0, kLambda) + term(3, ComplexPolynomial({2.0, 1.0}));
  const Complex z(-20, 3);
  EXPECT_NEAR(log_abs(p, z), std::log(std::abs(evaluate(p, z))), 1e-12);
  // exp(3 * 400) overflows a double; the log-domain value does not
  EXPECT_NEAR(log_abs(p, Complex(-400, 0)), 1200.0 + std::log(398.0), 1e-9);
}

TEST(Derivative, Examples) {
  EXPECT_EQ(derivative(term(1, ComplexPolynomial({1.0}))), term(1, ComplexPolynomial({-1.0})));
  EXPECT_EQ(derivative(term(2, kLambda)), term(2, ComplexPolynomial({1.0, -2.0})));
}

TEST(Derivative, MatchesCentralFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_quasi(rng, rep % 2 == 0, 2.0);
    const auto dp = derivative(p);
    for (int i = 0; i < 10; ++i) {
      const Complex z = random_point(rng, 2.0);
      const double h = 1e-6;
      const Complex fd = (evaluate(p, z + h) - evaluate(p, z - h)) / (2 * h);
      const Complex exact = evaluate(dp, z);
      EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST(Admissibility, Examples) {
  EXPECT_FALSE(is_admissible(QuasiPolynomial::polynomial({1.0, 3.0, 1.0})));
  EXPECT_TRUE(is_admissible(term(0, kLambda) + term(1, ComplexPolynomial({1.0}))));
  EXPECT_FALSE(is_admissible(term(1, ComplexPolynomial({1.0, 1.0}))));
  EXPECT_THROW(is_admissible(QuasiPolynomial::term(Exponent::numeric(Complex(1, 1)), kLambda) + term(0, kLambda)),
               ComplexExponentError);
}

TEST(ReduceToPolynomial, Examples) {
  EXPECT_EQ(reduce_to_polynomial(term(3, ComplexPolynomial({-1.0, 0.0, 1.0}))), ComplexPolynomial({-1.0, 0.0, 1.0}));
  EXPECT_EQ(reduce_to_polynomial(QuasiPolynomial::polynomial({5.0, 1.0})), ComplexPolynomial({5.0, 1.0}));
  EXPECT_THROW(reduce_to_polynomial(term(0, kLambda) + term(1, ComplexPolynomial({1.0}))), AdmissibleError);
  EXPECT_THROW(reduce_to_polynomial(QuasiPolynomial{}), ZeroQuasiPolynomial);
}

TEST(PrincipalTerm, Examples) {
  EXPECT_TRUE(has_principal_term(term(0, kLambda) + term(1, ComplexPolynomial({1.0}))));
  EXPECT_FALSE(has_principal_term(QuasiPolynomial::polynomial({1.0}) + term(1, kLambda)));
  EXPECT_TRUE(has_principal_term(QuasiPolynomial::polynomial({0.0, 0.0, 1.0})));
  EXPECT_THROW(has_principal_term(QuasiPolynomial{}), ZeroQuasiPolynomial);
}

TEST(GrowthOrder, LambdaPlusExpIsOrderOne) {
  const auto p = term(0, kLambda) + term(1, ComplexPolynomial({1.0}));
  const auto g = estimate_growth_order(p, {10, 20, 40, 80}, 256);
  EXPECT_GE(g.fitted_order, 0.8);
  EXPECT_LE(g.fitted_order, 1.1);
  ASSERT_EQ(g.max_log_abs.size(), 4u);
}

TEST(GrowthOrder, PureExponential) {
  const auto g = estimate_growth_order(term(2, ComplexPolynomial({1.0})), {10, 20, 40}, 128);
  EXPECT_GE(g.fitted_order, 0.9);
  EXPECT_LE(g.fitted_order, 1.1);
  EXPECT_NEAR(g.max_log_abs[0], 20.0, 1e-9);
}

TEST(GrowthOrder, CubicOnDecadeRadii) {
  // M(R) = 3 ln R exactly, so the fitted slope is the least-squares slope of
  // ln(3 ln R) against ln R: 0.238560627360 for R = 10, 100, 1000. The slope
  // tends to zero only like 1 / ln R, so these radii do not reach 0.2.
  const auto g = estimate_growth_order(QuasiPolynomial::polynomial({0.0, 0.0, 0.0, 1.0}), {10, 100, 1000}, 128);
  EXPECT_NEAR(g.fitted_order, 0.238560627360, 1e-9);
  const auto wide = estimate_growth_order(QuasiPolynomial::polynomial({0.0, 0.0, 0.0, 1.0}), {1e3, 1e4, 1e5, 1e6}, 128);
  EXPECT_LE(wide.fitted_order, 0.2);
}

TEST(GrowthOrder, RejectsBadInput) {
  EXPECT_THROW(estimate_growth_order(QuasiPolynomial{}, {10, 20}, 64), ZeroQuasiPolynomial);
  const auto p = QuasiPolynomial::polynomial({1.0, 1.0});
  EXPECT_THROW(estimate_growth_order(p, {10}, 64), InvalidArgument);
  EXPECT_THROW(estimate_growth_order(p, {20, 10}, 64), InvalidArgument);
  EXPECT_THROW(estimate_growth_order(p, {5, 10}, 64), InvalidArgument);
  EXPECT_THROW(estimate_growth_order(p, {10, 20}, 32), InvalidArgument);
}

TEST(QuasiPolynomialProperties, RingHomomorphismAtPoints) {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_quasi(rng, rep % 2 == 0);
    const auto q = random_quasi(rng, rep % 3 == 0);
    const auto s = add(p, q);
    const auto m = multiply(p, q);
    for (int i = 0; i < 20; ++i) {
      const Complex z = random_point(rng, 10.0);
      const Complex fp = evaluate(p, z), fq = evaluate(q, z);
      // rounding is relative to the sum of monomial moduli, not to the value
      const double sp = magnitude_scale(p, z), sq = magnitude_scale(q, z);
      EXPECT_LE(std::abs(evaluate(s, z) - (fp + fq)), 1e-12 * (sp + sq));
      EXPECT_LE(std::abs(evaluate(m, z) - fp * fq), 1e-12 * sp * sq);
    }
  }
}

TEST(QuasiPolynomialProperties, NormalizeIsIdempotent) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = random_quasi(rng, rep % 2 == 0);
    EXPECT_EQ(normalize(p.terms()), p);
  }
}

TEST(QuasiPolynomialProperties, DerivativeIsLinear) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_quasi(rng, true);
    const auto q = random_quasi(rng, true);
    const auto lhs = derivative(add(p, q));
    const auto rhs = add(derivative(p), derivative(q));
    ASSERT_EQ(lhs.size(), rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      EXPECT_TRUE(lhs.terms()[i].sigma.same_as(rhs.terms()[i].sigma));
      const auto d = lhs.terms()[i].poly - rhs.terms()[i].poly;
      for (const auto& c : d.coeffs()) EXPECT_LE(std::abs(c), 1e-12);
    }
  }
}

TEST(QuasiPolynomialProperties, OrderOneGrowthBound) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_quasi(rng, false, 5.0);
    for (int i = 0; i < 50; ++i) {
      const double r = 100.0 + 30.0 * std::uniform_real_distribution<double>(0, 1)(rng);
      const Complex z = std::polar(r, std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng));
      EXPECT_LE(log_abs(p, z), std::pow(r, 1.5));
    }
  }
}

TEST(QuasiPolynomialProperties, AdmissibleIffNoReduction) {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = random_quasi(rng, rep % 2 == 0);
    if (p.is_zero()) continue;
    bool reduced = true;
    try {
      reduce_to_polynomial(p);
    } catch (const AdmissibleError&) {
      reduced = false;
    }
    EXPECT_EQ(!is_admissible(p), reduced);
  }
}
