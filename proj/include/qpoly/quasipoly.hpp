#pragma once

// Quasi-polynomials: finite sums  sum_i p_i(lambda) * exp(-sigma_i * lambda)
// with complex polynomials p_i and pairwise distinct exponent coefficients
// sigma_i. Real sigmas may carry exact rational coordinates over a basis of
// incommensurable reals; those are compared exactly when merging terms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpoly/error.hpp"
#include "qpoly/polynomial.hpp"
#include "qpoly/rational.hpp"

namespace qpoly {

inline constexpr double kSigmaMergeTol = 1e-12;

/// Exponent coefficient sigma of a term p(lambda) exp(-sigma lambda).
class Exponent {
 public:
  /// Exact zero.
  Exponent() = default;

  static Exponent integer(long k) {
    Exponent e;
    if (k != 0) e.coords_ = {Rational(k)};
    e.value_ = static_cast<double>(k);
    return e;
  }

  /// sigma = sum_m coords[m] * basis_values[m].
  static Exponent exact(std::vector<Rational> coords, std::span<const double> basis_values) {
    if (coords.size() > basis_values.size())
      throw InvalidArgument("exponent has more coordinates than basis values");
    Exponent e;
    double v = 0.0;
    for (std::size_t m = 0; m < coords.size(); ++m) v += to_double(coords[m]) * basis_values[m];
    e.value_ = v;
    e.coords_ = std::move(coords);
    while (!e.coords_.empty() && e.coords_.back() == 0) e.coords_.pop_back();
    return e;
  }

  static Exponent numeric(Complex v) {
    Exponent e;
    e.exact_ = false;
    e.value_ = v;
    return e;
  }

  bool is_exact() const { return exact_; }
  bool is_real() const { return value_.imag() == 0.0; }
  bool is_zero() const { return exact_ ? coords_.empty() : value_ == Complex{}; }
  Complex value() const { return value_; }
  double real_value() const { return value_.real(); }

  /// Exact coordinates with trailing zeros stripped (exact exponents only).
  const std::vector<Rational>& coords() const { return coords_; }

  friend Exponent operator+(const Exponent& a, const Exponent& b) {
    Exponent e;
    e.value_ = a.value_ + b.value_;
    if (a.exact_ && b.exact_) {
      e.coords_ = add_coords(a.coords_, b.coords_);
    } else {
      e.exact_ = false;
    }
    return e;
  }

  /// Exact comparison when both sides are exact, relative tolerance otherwise.
  bool same_as(const Exponent& o, double tol = kSigmaMergeTol) const {
    if (exact_ && o.exact_) return coords_ == o.coords_;
    const double scale = 1.0 + std::max(std::abs(value_), std::abs(o.value_));
    return std::abs(value_ - o.value_) <= tol * scale;
  }

  /// Total order used for sorting terms: by real value, then imaginary part,
  /// then exact coordinates.
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.value_.real() != b.value_.real()) return a.value_.real() < b.value_.real();
    if (a.value_.imag() != b.value_.imag()) return a.value_.imag() < b.value_.imag();
    if (a.exact_ != b.exact_) return a.exact_;
    return std::lexicographical_compare(a.coords_.begin(), a.coords_.end(), b.coords_.begin(),
                                        b.coords_.end());
  }

  friend bool operator==(const Exponent&, const Exponent&) = default;

  std::string to_string() const {
    if (exact_ && coords_.size() <= 1) return qpoly::to_string(coords_.empty() ? Rational(0) : coords_[0]);
    if (exact_) {
      std::string s = "[";
      for (std::size_t i = 0; i < coords_.size(); ++i)
        s += (i ? ", " : "") + qpoly::to_string(coords_[i]);
      return s + "]";
    }
    if (is_real()) return std::to_string(value_.real());
    return "(" + std::to_string(value_.real()) + ", " + std::to_string(value_.imag()) + ")";
  }

 private:
  bool exact_ = true;
  Complex value_{};
  std::vector<Rational> coords_;
};

/// One summand poly(lambda) * exp(-sigma * lambda).
struct ExponentTerm {
  Exponent sigma;
  ComplexPolynomial poly;

  friend bool operator==(const ExponentTerm&, const ExponentTerm&) = default;
};

class QuasiPolynomial;
QuasiPolynomial normalize(std::vector<ExponentTerm> raw_terms, double sigma_merge_tol = kSigmaMergeTol);

/// Immutable quasi-polynomial in canonical form: distinct exponents, nonzero
/// polynomial parts, sorted ascending by exponent. The empty term list is zero.
class QuasiPolynomial {
 public:
  QuasiPolynomial() = default;

  static QuasiPolynomial polynomial(ComplexPolynomial p) {
    return normalize({ExponentTerm{Exponent{}, std::move(p)}});
  }

  static QuasiPolynomial term(Exponent sigma, ComplexPolynomial p) {
    return normalize({ExponentTerm{std::move(sigma), std::move(p)}});
  }

  const std::vector<ExponentTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool all_real() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const ExponentTerm& t) { return t.sigma.is_real(); });
  }

  /// Polynomial part of the term with exponent sigma, zero if absent.
  ComplexPolynomial part(const Exponent& sigma) const {
    for (const auto& t : terms_)
      if (t.sigma.same_as(sigma)) return t.poly;
    return {};
  }

  int max_degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, t.poly.degree());
    return d;
  }

  friend bool operator==(const QuasiPolynomial&, const QuasiPolynomial&) = default;

 private:
  friend QuasiPolynomial normalize(std::vector<ExponentTerm>, double);
  std::vector<ExponentTerm> terms_;
};

/// Merges terms with matching exponents, drops zero polynomial parts and sorts.
inline QuasiPolynomial normalize(std::vector<ExponentTerm> raw_terms, double sigma_merge_tol) {
  if (!(sigma_merge_tol >= 0.0)) throw InvalidArgument("sigma_merge_tol must be >= 0");
  std::vector<ExponentTerm> merged;
  merged.reserve(raw_terms.size());
  for (auto& t : raw_terms) {
    if (t.poly.is_zero()) continue;
    auto hit = std::find_if(merged.begin(), merged.end(), [&](const ExponentTerm& m) {
      return m.sigma.same_as(t.sigma, sigma_merge_tol);
    });
    if (hit == merged.end()) {
      merged.push_back(std::move(t));
    } else {
      hit->poly += t.poly;
    }
  }
  std::erase_if(merged, [](const ExponentTerm& t) { return t.poly.is_zero(); });
  std::stable_sort(merged.begin(), merged.end(),
                   [](const ExponentTerm& a, const ExponentTerm& b) { return a.sigma < b.sigma; });
  QuasiPolynomial q;
  q.terms_ = std::move(merged);
  return q;
}

inline QuasiPolynomial add(const QuasiPolynomial& p, const QuasiPolynomial& q) {
  std::vector<ExponentTerm> raw = p.terms();
  raw.insert(raw.end(), q.terms().begin(), q.terms().end());
  return normalize(std::move(raw));
}

inline QuasiPolynomial negate(const QuasiPolynomial& p) {
  std::vector<ExponentTerm> raw = p.terms();
  for (auto& t : raw) t.poly = -t.poly;
  return normalize(std::move(raw));
}

inline QuasiPolynomial multiply(const QuasiPolynomial& p, const QuasiPolynomial& q) {
  std::vector<ExponentTerm> raw;
  raw.reserve(p.size() * q.size());
  for (const auto& a : p.terms())
    for (const auto& b : q.terms()) raw.push_back({a.sigma + b.sigma, a.poly * b.poly});
  return normalize(std::move(raw));
}

inline QuasiPolynomial operator+(const QuasiPolynomial& p, const QuasiPolynomial& q) { return add(p, q); }
inline QuasiPolynomial operator-(const QuasiPolynomial& p, const QuasiPolynomial& q) {
  return add(p, negate(q));
}
inline QuasiPolynomial operator-(const QuasiPolynomial& p) { return negate(p); }
inline QuasiPolynomial operator*(const QuasiPolynomial& p, const QuasiPolynomial& q) {
  return multiply(p, q);
}

inline Complex evaluate(const QuasiPolynomial& p, Complex lambda) {
  Complex acc = 0.0;
  for (const auto& t : p.terms()) acc += t.poly.evaluate(lambda) * std::exp(-t.sigma.value() * lambda);
  return acc;
}

/// log|p(lambda)| computed without forming exp of large arguments; -inf at a zero.
inline double log_abs(const QuasiPolynomial& p, Complex lambda) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : p.terms()) top = std::max(top, (-t.sigma.value() * lambda).real());
  if (!std::isfinite(top)) return -std::numeric_limits<double>::infinity();
  Complex acc = 0.0;
  for (const auto& t : p.terms())
    acc += t.poly.evaluate(lambda) * std::exp(-t.sigma.value() * lambda - top);
  return std::log(std::abs(acc)) + top;
}

/// Sum of the moduli of all monomials c k lambda^k exp(-sigma lambda); used as
/// the natural magnitude against which |p(lambda)| is judged small.
inline double magnitude_scale(const QuasiPolynomial& p, Complex lambda) {
  double acc = 0.0;
  const double r = std::abs(lambda);
  for (const auto& t : p.terms())
    acc += t.poly.abs_bound(r) * std::exp((-t.sigma.value() * lambda).real());
  return acc;
}

inline QuasiPolynomial derivative(const QuasiPolynomial& p) {
  std::vector<ExponentTerm> raw;
  raw.reserve(p.size());
  for (const auto& t : p.terms())
    raw.push_back({t.sigma, t.poly.derivative() - t.sigma.value() * t.poly});
  return normalize(std::move(raw));
}

inline bool is_admissible(const QuasiPolynomial& p) {
  if (!p.all_real()) throw ComplexExponentError("is_admissible");
  return p.size() >= 2;
}

/// For a non-admissible nonzero p = poly(lambda) exp(-sigma lambda), returns poly.
inline ComplexPolynomial reduce_to_polynomial(const QuasiPolynomial& p) {
  if (p.is_zero()) throw ZeroQuasiPolynomial("reduce_to_polynomial");
  if (p.size() == 1) return p.terms().front().poly;
  if (!p.all_real()) throw ComplexExponentError("reduce_to_polynomial");
  throw AdmissibleError();
}

/// Pontryagin principal term: a single term carrying both the largest degree
/// and the largest growth exponent s = -sigma. Terms are sorted ascending in
/// sigma, so that is the first term.
inline bool has_principal_term(const QuasiPolynomial& p) {
  if (p.is_zero()) throw ZeroQuasiPolynomial("has_principal_term");
  if (!p.all_real()) throw ComplexExponentError("has_principal_term");
  return p.terms().front().poly.degree() == p.max_degree();
}

struct GrowthEstimate {
  std::vector<double> radii;
  std::vector<double> max_log_abs;
  double fitted_order = 0.0;
  int samples_per_circle = 0;
};

inline constexpr double kLogAbsFloor = 1e-300;

/// Empirical order: slope of log M(R) against log R, M(R) = max_{|lambda|=R} log|f|.
inline GrowthEstimate estimate_growth_order(const QuasiPolynomial& p, std::vector<double> radii,
                                            int samples_per_circle) {
  if (p.is_zero()) throw ZeroQuasiPolynomial("estimate_growth_order");
  if (radii.size() < 2) throw InvalidArgument("estimate_growth_order: need at least two radii");
  if (samples_per_circle < 64) throw InvalidArgument("estimate_growth_order: samples_per_circle < 64");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 10.0) || !std::isfinite(radii[i]))
      throw InvalidArgument("estimate_growth_order: radii must be finite and >= 10");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InvalidArgument("estimate_growth_order: radii must be strictly increasing");
  }

  GrowthEstimate g;
  g.radii = std::move(radii);
  g.samples_per_circle = samples_per_circle;
  const double floor = std::log(kLogAbsFloor);
  for (double r : g.radii) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples_per_circle; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / samples_per_circle;
      best = std::max(best, std::max(floor, log_abs(p, std::polar(r, theta))));
    }
    g.max_log_abs.push_back(best);
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < g.radii.size(); ++i) {
    if (g.max_log_abs[i] > 1.0) {
      xs.push_back(std::log(g.radii[i]));
      ys.push_back(std::log(g.max_log_abs[i]));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    g.fitted_order = std::max(0.0, sxy / sxx);
  }
  return g;
}

}  // namespace qpoly
