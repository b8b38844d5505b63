#pragma once

// Reference control problems shared by the verification tier, the acceptance suite
// and the command-line tool.

#include "fracpoint/control.hpp"

namespace fracpoint::fixtures {

enum class Kind {
  /// a == 0: strictly convex reduced cost.
  linear,
  /// a(u) = u^3 with a nonzero forcing.
  cubic,
  /// a(u) = u^3 with targets far above the reachable states, so the upper bound binds.
  active_bound,
};

const char* name(Kind kind);

/// Observation points shared by all fixtures.
std::vector<Point> observation_points();

/// s = 0.75, theta = 0.5, M = 4K, alpha = 0.1, bounds [-1, 1]. With `one_dof` the
/// controls are restricted to constants.
ControlProblem make(Kind kind, int modes = 8, bool one_dof = false);

/// f = 0, a == 0, every target 0: q = 0 is the unique minimizer.
ControlProblem matched(int modes = 8);

}  // namespace fracpoint::fixtures
