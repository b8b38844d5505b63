#include "fracpoint/nonlinearity.hpp"

#include "fracpoint/errors.hpp"

#include <cmath>
#include <sstream>

namespace fracpoint {

namespace nonlinearities {

Nonlinearity zero() {
  Nonlinearity a;
  a.name = "zero";
  a.value = [](Point, double) { return 0.0; };
  a.du = [](Point, double) { return 0.0; };
  a.duu = [](Point, double) { return 0.0; };
  a.polynomial = true;
  a.affine = true;
  return a;
}

Nonlinearity linear(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw AssumptionViolation("linear nonlinearity needs a finite gamma >= 0");
  }
  Nonlinearity a;
  a.name = "linear";
  a.value = [gamma](Point, double u) { return gamma * u; };
  a.du = [gamma](Point, double) { return gamma; };
  a.duu = [](Point, double) { return 0.0; };
  a.polynomial = true;
  a.affine = true;
  return a;
}

Nonlinearity cubic() {
  Nonlinearity a;
  a.name = "cubic";
  a.value = [](Point, double u) { return u * u * u; };
  a.du = [](Point, double u) { return 3.0 * u * u; };
  a.duu = [](Point, double u) { return 6.0 * u; };
  a.polynomial = true;
  return a;
}

Nonlinearity exponential() {
  Nonlinearity a;
  a.name = "exponential";
  a.value = [](Point, double u) { return std::expm1(u); };
  a.du = [](Point, double u) { return std::exp(u); };
  a.duu = [](Point, double u) { return std::exp(u); };
  return a;
}

Nonlinearity arctan_saturated() {
  Nonlinearity a;
  a.name = "arctan";
  a.value = [](Point, double u) { return u + std::atan(u); };
  a.du = [](Point, double u) { return 1.0 + 1.0 / (1.0 + u * u); };
  a.duu = [](Point, double u) {
    const double d = 1.0 + u * u;
    return -2.0 * u / (d * d);
  };
  return a;
}

std::vector<Nonlinearity> registry() {
  return {zero(), linear(1.0), cubic(), exponential(), arctan_saturated()};
}

Nonlinearity by_name(const std::string& name, double gamma) {
  if (name == "zero") return zero();
  if (name == "linear") return linear(gamma);
  if (name == "cubic") return cubic();
  if (name == "exponential") return exponential();
  if (name == "arctan") return arctan_saturated();
  throw ConfigurationError("unknown nonlinearity '" + name +
                           "' (expected zero, linear, cubic, exponential or arctan)");
}

}  // namespace nonlinearities

void validate_nonlinearity(const Nonlinearity& a, double u_min, double u_max, int samples) {
  if (!a.value || !a.du || !a.duu) {
    throw ConfigurationError("nonlinearity '" + a.name + "' is missing a derivative");
  }
  if (samples < 2 || !(u_min <= u_max)) throw ConfigurationError("bad sampling box for nonlinearity check");
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const Point x{(i + 0.5) / samples, (j + 0.5) / samples};
      for (int k = 0; k < samples; ++k) {
        const double u = u_min + (u_max - u_min) * k / (samples - 1);
        const double v = a.value(x, u);
        const double d1 = a.du(x, u);
        const double d2 = a.duu(x, u);
        if (!std::isfinite(v) || !std::isfinite(d1) || !std::isfinite(d2)) {
          std::ostringstream msg;
          msg << "nonlinearity '" << a.name << "' is not finite at u = " << u;
          throw AssumptionViolation(msg.str());
        }
        if (d1 < -kMonotoneTolerance) {
          std::ostringstream msg;
          msg << "nonlinearity '" << a.name << "' is decreasing at u = " << u << " (da/du = " << d1 << ")";
          throw AssumptionViolation(msg.str());
        }
      }
    }
  }
}

GridFunction evaluate_on_grid(const Nonlinearity& a, const GridFunction& u, Derivative which) {
  const Nonlinearity::Fn& fn = which == Derivative::value ? a.value : which == Derivative::du ? a.du : a.duu;
  const int cells = u.cells();
  GridFunction out = GridFunction::zero(cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) out.values(i, j) = fn(GridFunction::node(cells, i, j), u.values(i, j));
  return out;
}

}  // namespace fracpoint
