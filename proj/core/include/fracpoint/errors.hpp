#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracpoint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point lies on the boundary of, or outside, the open unit square.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Inconsistent sizes or parameters (grid too coarse, mismatched grids, bad exponents).
class ConfigurationError : public Error {
public:
  using Error::Error;
};

/// A structural assumption on the nonlinearity or reaction coefficient failed
/// (monotonicity, finiteness).
class AssumptionViolation : public Error {
public:
  using Error::Error;
};

/// Linear algebra breakdown (factorization of a system that should be SPD failed).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Newton did not converge. Carries the residual history for diagnostics.
class SolverError : public Error {
public:
  SolverError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
  std::vector<double> residuals_;
};

/// A ratio probe was asked to divide by a zero-length difference.
class UndefinedRatioError : public Error {
public:
  using Error::Error;
};

}  // namespace fracpoint
