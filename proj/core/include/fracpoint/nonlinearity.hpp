#pragma once

#include "fracpoint/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fracpoint {

/// Reaction term a(x, u) of the state equation with its first and second
/// u-derivatives. Admissible nonlinearities are C^2 in u, monotone
/// (du >= 0) and locally bounded together with their derivatives.
struct Nonlinearity {
  using Fn = std::function<double(Point, double)>;

  std::string name;
  Fn value;
  Fn du;
  Fn duu;
  /// Polynomial of degree <= 3 in u: products with K-mode fields stay resolved on M = 4K.
  bool polynomial = false;
  /// d2a/du2 vanishes identically.
  bool affine = false;
};

namespace nonlinearities {

Nonlinearity zero();
/// gamma * u with gamma >= 0.
Nonlinearity linear(double gamma);
Nonlinearity cubic();
/// e^u - 1.
Nonlinearity exponential();
/// u + arctan(u).
Nonlinearity arctan_saturated();

/// Every built-in nonlinearity, with default parameters.
std::vector<Nonlinearity> registry();

/// Lookup by name ("zero", "linear", "cubic", "exponential", "arctan").
/// `gamma` is only read by "linear". Throws ConfigurationError for unknown names.
Nonlinearity by_name(const std::string& name, double gamma = 1.0);

}  // namespace nonlinearities

/// Monotonicity tolerance: du >= -kMonotoneTolerance is accepted as du >= 0.
inline constexpr double kMonotoneTolerance = 1e-13;

/// Samples a, da/du and d2a/du2 on `samples` x `samples` grid points crossed with
/// `samples` values of u in [u_min, u_max]. Throws AssumptionViolation on a negative
/// derivative or a non-finite value.
void validate_nonlinearity(const Nonlinearity& a, double u_min, double u_max, int samples = 9);

enum class Derivative { value, du, duu };

/// Pointwise evaluation on the grid carrying `u`.
GridFunction evaluate_on_grid(const Nonlinearity& a, const GridFunction& u, Derivative which);

}  // namespace fracpoint
