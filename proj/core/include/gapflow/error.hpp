#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace gapflow {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that violate a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not deliver a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Evaluation at a point where the quantity is singular (pole, band edge).
class SingularEvaluation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Adaptive quadrature gave up; carries the best estimate it had.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, std::complex<double> estimate,
                  double error_bound)
      : NumericalError(what), estimate_(estimate), error_bound_(error_bound) {}

  std::complex<double> estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  std::complex<double> estimate_;
  double error_bound_;
};

}  // namespace gapflow
