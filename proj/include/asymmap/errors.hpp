#pragma once

#include <stdexcept>
#include <string>

namespace asymmap {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a transform or operator.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure (root bracketing, fixed point, solver) did not converge.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The spectral law yields a non-positive R-transform value.
class DegenerateEnsembleError : public Error {
 public:
  using Error::Error;
};

/// Quadrature refinement disagreed beyond the accuracy budget.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// A linear system could not be factorized.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Invalid model, penalty or configuration values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be valid by construction was not; indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace asymmap
