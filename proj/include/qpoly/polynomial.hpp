#pragma once

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <vector>

namespace qpoly {

using Complex = std::complex<double>;

/// Dense polynomial with complex coefficients stored in ascending degree.
/// The highest stored coefficient is always nonzero; the zero polynomial has
/// no coefficients at all.
class ComplexPolynomial {
 public:
  ComplexPolynomial() = default;
  ComplexPolynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) { trim(); }
  explicit ComplexPolynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    trim();
  }

  static ComplexPolynomial constant(Complex c) { return ComplexPolynomial({c}); }

  static ComplexPolynomial monomial(std::size_t degree, Complex c = 1.0) {
    std::vector<Complex> v(degree + 1, 0.0);
    v[degree] = c;
    return ComplexPolynomial(std::move(v));
  }

  bool is_zero() const { return coeffs_.empty(); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const std::vector<Complex>& coeffs() const { return coeffs_; }

  Complex operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Complex{}; }

  Complex leading() const { return coeffs_.empty() ? Complex{} : coeffs_.back(); }

  Complex evaluate(Complex z) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Sum of |c_k| |z|^k, an upper bound for |p(z)|.
  double abs_bound(double r) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  ComplexPolynomial derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return ComplexPolynomial(std::move(d));
  }

  /// Coefficientwise modulus.
  ComplexPolynomial abs() const {
    std::vector<Complex> v(coeffs_.size());
    std::transform(coeffs_.begin(), coeffs_.end(), v.begin(),
                   [](Complex c) { return Complex(std::abs(c), 0.0); });
    return ComplexPolynomial(std::move(v));
  }

  ComplexPolynomial& operator+=(const ComplexPolynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
  }

  ComplexPolynomial& operator-=(const ComplexPolynomial& o) { return *this += -o; }

  ComplexPolynomial& operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
  }

  ComplexPolynomial operator-() const {
    ComplexPolynomial r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend ComplexPolynomial operator+(ComplexPolynomial a, const ComplexPolynomial& b) {
    return a += b;
  }
  friend ComplexPolynomial operator-(ComplexPolynomial a, const ComplexPolynomial& b) {
    return a -= b;
  }
  friend ComplexPolynomial operator*(ComplexPolynomial a, Complex s) { return a *= s; }
  friend ComplexPolynomial operator*(Complex s, ComplexPolynomial a) { return a *= s; }

  friend ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Complex> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return ComplexPolynomial(std::move(out));
  }

  friend bool operator==(const ComplexPolynomial&, const ComplexPolynomial&) = default;

  /// Zeroes coefficient k wherever |c_k| <= tol[k]; tol shorter than the
  /// coefficient list leaves the remaining coefficients untouched.
  ComplexPolynomial pruned(const std::vector<double>& tol) const {
    std::vector<Complex> v = coeffs_;
    for (std::size_t k = 0; k < v.size() && k < tol.size(); ++k)
      if (std::abs(v[k]) <= tol[k]) v[k] = 0.0;
    return ComplexPolynomial(std::move(v));
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
  }

  std::vector<Complex> coeffs_;
};

}  // namespace qpoly
