#pragma once

// Characteristic quasi-polynomials det(lambda I - A - sum_j B_j exp(-tau_j lambda))
// of linear constant-delay systems, expanded symbolically by minors, plus the
// coefficient conditions checked on them (trace of B, Z-independence of delays).

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "qpoly/error.hpp"
#include "qpoly/matrix.hpp"
#include "qpoly/quasipoly.hpp"
#include "qpoly/rational.hpp"

namespace qpoly {

inline constexpr std::size_t kMaxDeterminantDim = 8;

/// Real delays tau_1 < ... < tau_k. Either exact, as rational coordinates over
/// a declared basis of incommensurable positive reals, or numeric only.
class DelaySpec {
 public:
  DelaySpec() = default;

  static DelaySpec over_basis(std::vector<std::string> labels, std::vector<double> basis_values,
                              std::vector<std::vector<Rational>> coords) {
    if (labels.size() != basis_values.size())
      throw InvalidArgument("delay basis: labels and values differ in length");
    if (basis_values.empty()) throw InvalidArgument("delay basis is empty");
    for (double b : basis_values)
      if (!std::isfinite(b) || !(b > 0.0))
        throw InvalidArgument("delay basis values must be positive and finite");
    DelaySpec s;
    s.labels_ = std::move(labels);
    s.basis_ = std::move(basis_values);
    for (auto& row : coords) {
      if (row.size() != s.basis_.size())
        throw InvalidArgument("delay coordinates do not match the basis size");
      double v = 0.0;
      for (std::size_t m = 0; m < row.size(); ++m) v += to_double(row[m]) * s.basis_[m];
      s.values_.push_back(v);
    }
    s.coords_ = std::move(coords);
    s.check_increasing();
    return s;
  }

  static DelaySpec numeric(std::vector<double> values) {
    DelaySpec s;
    s.values_ = std::move(values);
    for (double v : s.values_)
      if (!std::isfinite(v)) throw InvalidArgument("delays must be finite");
    s.check_increasing();
    return s;
  }

  bool is_exact() const { return !basis_.empty(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  const std::vector<double>& basis_values() const { return basis_; }
  const std::vector<std::vector<Rational>>& coords() const { return coords_; }

  /// Exponent of exp(-tau_j lambda).
  Exponent exponent(std::size_t j) const {
    if (is_exact()) return Exponent::exact(coords_[j], basis_);
    return Exponent::numeric(values_[j]);
  }

  friend bool operator==(const DelaySpec&, const DelaySpec&) = default;

 private:
  void check_increasing() const {
    if (values_.empty()) throw InvalidArgument("at least one delay is required");
    for (std::size_t j = 1; j < values_.size(); ++j)
      if (!(values_[j] > values_[j - 1]))
        throw InvalidArgument("delays must be strictly increasing");
  }

  std::vector<std::string> labels_;
  std::vector<double> basis_;
  std::vector<std::vector<Rational>> coords_;
  std::vector<double> values_;
};

/// x'(t) = A x(t) + sum_j B_j x(t - tau_j). A complex single delay is allowed
/// for the one-delay path only.
struct DelaySystem {
  ComplexMatrix A;
  std::vector<ComplexMatrix> Bs;
  std::variant<DelaySpec, Complex> delays;

  std::size_t dim() const { return A.dim(); }

  void validate() const {
    if (A.dim() == 0) throw InvalidArgument("system dimension must be >= 1");
    if (Bs.empty()) throw InvalidArgument("at least one delayed coefficient matrix is required");
    for (const auto& B : Bs)
      if (B.dim() != A.dim()) throw InvalidArgument("dimension mismatch between A and B_j");
    const std::size_t k = std::holds_alternative<Complex>(delays) ? 1 : std::get<DelaySpec>(delays).size();
    if (k != Bs.size()) throw InvalidArgument("number of delays does not match number of B_j");
  }
};

namespace detail {

/// Laplace expansion along rows with memoised minors over column subsets.
/// With alternate_signs = false the permanent is computed instead.
template <typename Ring>
Ring expand_by_minors(const std::vector<Ring>& entries, std::size_t n, bool alternate_signs,
                      const Ring& one) {
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<Ring> minor(full + 1);
  minor[0] = one;
  std::vector<std::size_t> order(full);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [](std::size_t a, std::size_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (std::size_t mask : order) {
    const std::size_t row = n - static_cast<std::size_t>(std::popcount(mask));
    Ring acc{};
    int position = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(mask & (std::size_t{1} << c))) continue;
      const Ring& entry = entries[row * n + c];
      const Ring& sub = minor[mask & ~(std::size_t{1} << c)];
      if (!entry.is_zero() && !sub.is_zero()) {
        Ring prod = entry * sub;
        acc = (alternate_signs && (position % 2 == 1)) ? acc - prod : acc + prod;
      }
      ++position;
    }
    minor[mask] = std::move(acc);
  }
  return minor[full];
}

inline QuasiPolynomial abs_coefficients(const QuasiPolynomial& p) {
  std::vector<ExponentTerm> raw;
  for (const auto& t : p.terms()) raw.push_back({t.sigma, t.poly.abs()});
  return normalize(std::move(raw));
}

/// Determinant of a matrix of quasi-polynomials. Coefficients that are at the
/// rounding level of the sum of moduli of their contributing products are
/// cleared, so cancellations that are exact in real arithmetic stay exact.
inline QuasiPolynomial quasi_determinant(const std::vector<QuasiPolynomial>& entries,
                                         std::size_t n) {
  const QuasiPolynomial one = QuasiPolynomial::polynomial({1.0});
  QuasiPolynomial det = expand_by_minors(entries, n, true, one);
  std::vector<QuasiPolynomial> abs_entries;
  abs_entries.reserve(entries.size());
  for (const auto& e : entries) abs_entries.push_back(abs_coefficients(e));
  const QuasiPolynomial bound = expand_by_minors(abs_entries, n, false, one);

  const double factor = 4.0 * static_cast<double>((n + 1) * (n + 1)) *
                        std::numeric_limits<double>::epsilon();
  std::vector<ExponentTerm> raw;
  for (const auto& t : det.terms()) {
    const ComplexPolynomial b = bound.part(t.sigma);
    std::vector<double> tol(b.coeffs().size());
    for (std::size_t k = 0; k < tol.size(); ++k) tol[k] = factor * b.coeffs()[k].real();
    raw.push_back({t.sigma, t.poly.pruned(tol)});
  }
  return normalize(std::move(raw));
}

}  // namespace detail

/// Characteristic function in the rescaled variable mu = tau * lambda.
struct RescaledCharacteristic {
  QuasiPolynomial f;
  Complex tau;

  /// Root mu of f maps to the root mu / tau of the original equation.
  Complex to_original(Complex mu) const { return mu / tau; }
};

/// det(mu I - tau A - exp(-mu) tau B); its roots mu give lambda = mu / tau.
inline RescaledCharacteristic build_characteristic_single(const DelaySystem& sys) {
  sys.validate();
  if (sys.Bs.size() != 1) throw InvalidArgument("single-delay construction needs exactly one delay");
  const Complex tau = std::holds_alternative<Complex>(sys.delays)
                          ? std::get<Complex>(sys.delays)
                          : Complex(std::get<DelaySpec>(sys.delays).values().front());
  if (tau == Complex{}) throw InvalidArgument("delay tau must be nonzero");

  const std::size_t n = sys.dim();
  const ComplexMatrix& B = sys.Bs.front();
  std::vector<QuasiPolynomial> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      entries.push_back(normalize({
          {Exponent{}, ComplexPolynomial({-tau * sys.A(i, j), i == j ? 1.0 : 0.0})},
          {Exponent::integer(1), ComplexPolynomial({-tau * B(i, j)})},
      }));
    }
  }
  if (n > kMaxDeterminantDim) throw InvalidArgument("dimension exceeds determinant limit of 8");
  return {detail::quasi_determinant(entries, n), tau};
}

/// det(lambda I - A - sum_j B_j exp(-tau_j lambda)) for real delays.
inline QuasiPolynomial build_characteristic_multi(const DelaySystem& sys) {
  sys.validate();
  if (!std::holds_alternative<DelaySpec>(sys.delays))
    throw InvalidArgument("multi-delay construction needs real delays");
  if (sys.dim() > kMaxDeterminantDim) throw InvalidArgument("dimension exceeds determinant limit of 8");
  const DelaySpec& spec = std::get<DelaySpec>(sys.delays);
  const std::size_t n = sys.dim();

  std::vector<Exponent> exps;
  for (std::size_t l = 0; l < spec.size(); ++l) exps.push_back(spec.exponent(l));

  std::vector<QuasiPolynomial> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<ExponentTerm> raw;
      raw.push_back({Exponent{}, ComplexPolynomial({-sys.A(i, j), i == j ? 1.0 : 0.0})});
      for (std::size_t l = 0; l < spec.size(); ++l)
        raw.push_back({exps[l], ComplexPolynomial({-sys.Bs[l](i, j)})});
      entries.push_back(normalize(std::move(raw)));
    }
  }
  return detail::quasi_determinant(entries, n);
}

struct TraceCheck {
  Complex trace;
  double threshold = 0.0;
  bool nonzero = false;
};

inline TraceCheck check_trace_condition(const ComplexMatrix& B) {
  TraceCheck t;
  t.trace = B.trace();
  t.threshold = 1e-14 * B.frobenius_norm();
  t.nonzero = std::abs(t.trace) > t.threshold;
  return t;
}

enum class Independence { independent, dependent, unknown };

inline const char* to_string(Independence s) {
  switch (s) {
    case Independence::independent: return "independent";
    case Independence::dependent: return "dependent";
    case Independence::unknown: return "unknown";
  }
  return "unknown";
}

struct IndependenceVerdict {
  Independence status = Independence::unknown;
  std::vector<BigInt> witness;  // nonempty iff dependent
};

/// Decides Z-linear independence of the delays from their exact basis
/// coordinates. Dependent verdicts carry a coprime integer witness beta with
/// sum_j beta_j tau_j = 0, first nonzero entry positive, smallest in l1 norm
/// among the reduced kernel basis vectors.
inline IndependenceVerdict check_delay_independence(const DelaySpec& spec) {
  IndependenceVerdict verdict;
  if (!spec.is_exact()) return verdict;
  const std::size_t k = spec.size();
  const std::size_t m = spec.basis_values().size();

  // rows = basis index, columns = delays
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(k));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t r = 0; r < m; ++r) t[r][j] = spec.coords()[j][r];

  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < k && row < m; ++col) {
    std::size_t p = row;
    while (p < m && t[p][col] == 0) ++p;
    if (p == m) continue;
    std::swap(t[p], t[row]);
    const Rational inv = 1 / t[row][col];
    for (auto& x : t[row]) x *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || t[r][col] == 0) continue;
      const Rational f = t[r][col];
      for (std::size_t c = 0; c < k; ++c) t[r][c] -= f * t[row][c];
    }
    pivot_cols.push_back(col);
    ++row;
  }

  std::vector<std::vector<BigInt>> kernel;
  for (std::size_t free = 0; free < k; ++free) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
    std::vector<Rational> v(k);
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) v[pivot_cols[i]] = -t[i][free];

    BigInt lcm = 1;
    for (const auto& q : v) {
      const BigInt d = boost::multiprecision::denominator(q);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    std::vector<BigInt> ints(k);
    BigInt g = 0;
    for (std::size_t j = 0; j < k; ++j) {
      ints[j] = boost::multiprecision::numerator(Rational(v[j] * lcm));
      g = boost::multiprecision::gcd(g, abs(ints[j]));
    }
    const auto first = std::find_if(ints.begin(), ints.end(), [](const BigInt& x) { return x != 0; });
    const int sign = (*first < 0) ? -1 : 1;
    for (auto& x : ints) x = x / g * sign;
    kernel.push_back(std::move(ints));
  }

  if (kernel.empty()) {
    verdict.status = Independence::independent;
    return verdict;
  }
  auto l1 = [](const std::vector<BigInt>& v) {
    BigInt s = 0;
    for (const auto& x : v) s += abs(x);
    return s;
  };
  verdict.status = Independence::dependent;
  verdict.witness = *std::min_element(kernel.begin(), kernel.end(),
                                      [&](const auto& a, const auto& b) { return l1(a) < l1(b); });
  return verdict;
}

struct ExpansionReport {
  int n = 0;
  Complex leading_exponential_coeff;  // degree n-1 coefficient of the sigma = 1 part
  Complex expected;                   // -tr(B)
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool trace_law_holds = false;
  int last_exponent = 0;  // largest sigma carrying a nonzero polynomial part
};

/// Checks f = lambda^n + a_1(lambda) e^{-lambda} + ... with a_1 led by -tr(B)
/// at degree n-1. Expects f from build_characteristic_single with tau = 1.
inline ExpansionReport verify_expansion_structure(const DelaySystem& sys, const QuasiPolynomial& f) {
  sys.validate();
  if (sys.Bs.size() != 1) throw InvalidArgument("expansion structure applies to one delay");
  const Complex tau = std::holds_alternative<Complex>(sys.delays)
                          ? std::get<Complex>(sys.delays)
                          : Complex(std::get<DelaySpec>(sys.delays).values().front());
  if (tau != Complex(1.0)) throw InvalidArgument("expansion structure expects tau = 1");

  ExpansionReport r;
  r.n = static_cast<int>(sys.dim());
  const ComplexPolynomial principal = f.part(Exponent{});
  if (principal.degree() != r.n || std::abs(principal.leading() - 1.0) > 1e-12)
    throw Error("characteristic function lacks a monic degree-n part at sigma = 0");

  const ComplexMatrix& B = sys.Bs.front();
  r.expected = -B.trace();
  r.leading_exponential_coeff = f.part(Exponent::integer(1))[static_cast<std::size_t>(r.n - 1)];
  r.abs_error = std::abs(r.leading_exponential_coeff - r.expected);
  r.tolerance = 1e-9 * std::max(std::abs(r.expected), B.frobenius_norm());
  r.trace_law_holds = r.abs_error <= r.tolerance;
  for (const auto& t : f.terms())
    r.last_exponent = std::max(r.last_exponent, static_cast<int>(std::lround(t.sigma.real_value())));
  return r;
}

}  // namespace qpoly
