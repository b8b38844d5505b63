#include "fracpoint/fixtures.hpp"

namespace fracpoint::fixtures {

const char* name(Kind kind) {
  switch (kind) {
    case Kind::linear:
      return "linear";
    case Kind::cubic:
      return "cubic";
    case Kind::active_bound:
      return "active-bound";
  }
  return "unknown";
}

std::vector<Point> observation_points() { return {{0.25, 0.3}, {0.7, 0.55}, {0.45, 0.8}}; }

namespace {

ControlProblem base(int modes, Nonlinearity a, GridFunction f, std::vector<double> targets, bool one_dof) {
  const EigenBasis basis(modes, 0.75, 0.5);
  const int cells = basis.default_grid();
  ControlProblem prob{basis, std::move(f), 0.1, -1.0, 1.0, {}, std::move(a)};
  const auto points = observation_points();
  for (std::size_t k = 0; k < points.size(); ++k) prob.observations.push_back({points[k], targets[k]});
  if (one_dof) prob.space = ControlSpace::constants(cells);
  return prob;
}

}  // namespace

ControlProblem make(Kind kind, int modes, bool one_dof) {
  const int cells = 4 * modes;
  switch (kind) {
    case Kind::linear:
      return base(modes, nonlinearities::zero(), GridFunction::zero(cells), {0.05, -0.04, 0.03}, one_dof);
    case Kind::cubic:
      return base(modes, nonlinearities::cubic(), GridFunction::constant(cells, 3.0), {0.3, 0.1, 0.45}, one_dof);
    case Kind::active_bound:
      return base(modes, nonlinearities::cubic(), GridFunction::zero(cells), {2.0, 2.0, 2.0}, one_dof);
  }
  return base(modes, nonlinearities::zero(), GridFunction::zero(cells), {0.0, 0.0, 0.0}, one_dof);
}

ControlProblem matched(int modes) {
  return base(modes, nonlinearities::zero(), GridFunction::zero(4 * modes), {0.0, 0.0, 0.0}, false);
}

}  // namespace fracpoint::fixtures
