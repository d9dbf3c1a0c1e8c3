#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qpoly/error.hpp"

namespace qpoly {

/// Square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  ComplexMatrix(std::size_t n, std::vector<std::complex<double>> row_major)
      : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n * n) throw InvalidArgument("matrix data does not match dimension");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return n_; }

  std::complex<double>& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const std::complex<double>& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  const std::vector<std::complex<double>>& data() const { return data_; }

  std::complex<double> trace() const {
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& c : data_) s += std::norm(c);
    return std::sqrt(s);
  }

  ComplexMatrix scaled(std::complex<double> s) const {
    ComplexMatrix m = *this;
    for (auto& c : m.data_) c *= s;
    return m;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::complex<double>> data_;
};

}  // namespace qpoly
