#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qpoly {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on caller-supplied data (bad dimensions, bad tolerances, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The zero quasi-polynomial was passed to an operation that needs a nonzero one.
class ZeroQuasiPolynomial : public Error {
 public:
  ZeroQuasiPolynomial(const std::string& op)
      : Error(op + ": the zero quasi-polynomial is not accepted") {}
};

/// A reduction to an ordinary polynomial was requested for an admissible quasi-polynomial.
class AdmissibleError : public Error {
 public:
  AdmissibleError()
      : Error("quasi-polynomial is admissible: no reduction to a polynomial exists") {}
};

/// Complex exponent coefficients where a real one is required.
class ComplexExponentError : public Error {
 public:
  ComplexExponentError(const std::string& op)
      : Error(op + ": requires all exponent coefficients to be real") {}
};

/// Iterative procedure did not meet its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Winding number could not be computed because |f| is tiny on the contour.
class BoundaryProximityError : public Error {
 public:
  BoundaryProximityError(std::complex<double> where, double magnitude)
      : Error("|f| = " + std::to_string(magnitude) + " near contour point (" +
              std::to_string(where.real()) + ", " + std::to_string(where.imag()) + ")"),
        where_(where), magnitude_(magnitude) {}

  std::complex<double> where() const { return where_; }
  double magnitude() const { return magnitude_; }

 private:
  std::complex<double> where_;
  double magnitude_;
};

/// Edge subdivision hit its depth limit before the phase increments became small.
class DepthExceededError : public Error {
 public:
  DepthExceededError(std::complex<double> where)
      : Error("edge subdivision depth exceeded near (" + std::to_string(where.real()) + ", " +
              std::to_string(where.imag()) + ")"),
        where_(where) {}

  std::complex<double> where() const { return where_; }

 private:
  std::complex<double> where_;
};

/// Function value was NaN or infinite.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

}  // namespace qpoly
