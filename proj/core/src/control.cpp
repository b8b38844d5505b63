#include "fracpoint/control.hpp"

#include "fracpoint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace fracpoint {

// ---------------------------------------------------------------------------
// Control space

ControlSpace ControlSpace::piecewise_constant(Eigen::MatrixXi labels, int regions) {
  if (regions < 1) throw ConfigurationError("a partition needs at least one region");
  if (labels.rows() != labels.cols() || labels.size() == 0) {
    throw ConfigurationError("partition labels must cover a square grid");
  }
  std::vector<int> counts(regions, 0);
  for (Eigen::Index k = 0; k < labels.size(); ++k) {
    const int r = labels.data()[k];
    if (r < 0 || r >= regions) throw ConfigurationError("partition label out of range");
    ++counts[r];
  }
  if (std::ranges::find(counts, 0) != counts.end()) throw ConfigurationError("partition has an empty region");
  ControlSpace space;
  space.labels_ = std::move(labels);
  space.regions_ = regions;
  return space;
}

ControlSpace ControlSpace::constants(int cells) {
  return piecewise_constant(Eigen::MatrixXi::Zero(cells, cells), 1);
}

ControlSpace ControlSpace::halves(int cells) {
  if (cells < 2) throw ConfigurationError("halves partition needs at least two cells");
  Eigen::MatrixXi labels(cells, cells);
  for (int i = 0; i < cells; ++i) labels.row(i).setConstant(2 * i < cells ? 0 : 1);
  return piecewise_constant(std::move(labels), 2);
}

std::vector<double> ControlSpace::coordinates(const GridFunction& g) const {
  if (is_full()) throw ConfigurationError("the full control space has no region coordinates");
  if (g.cells() != labels_.rows()) throw ConfigurationError("grid function does not match the partition");
  std::vector<double> sums(regions_, 0.0);
  std::vector<int> counts(regions_, 0);
  for (Eigen::Index k = 0; k < labels_.size(); ++k) {
    sums[labels_.data()[k]] += g.values.data()[k];
    ++counts[labels_.data()[k]];
  }
  for (int r = 0; r < regions_; ++r) sums[r] /= counts[r];
  return sums;
}

GridFunction ControlSpace::expand(const std::vector<double>& values, int cells) const {
  if (is_full()) throw ConfigurationError("the full control space has no region coordinates");
  if (static_cast<int>(values.size()) != regions_ || cells != labels_.rows()) {
    throw ConfigurationError("region values do not match the partition");
  }
  GridFunction g = GridFunction::zero(cells);
  for (Eigen::Index k = 0; k < labels_.size(); ++k) g.values.data()[k] = values[labels_.data()[k]];
  return g;
}

GridFunction ControlSpace::project(const GridFunction& g) const {
  if (is_full()) return g;
  return expand(coordinates(g), g.cells());
}

GridFunction random_direction(const ControlSpace& space, int cells, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  if (space.is_full()) {
    GridFunction g = GridFunction::zero(cells);
    for (Eigen::Index k = 0; k < g.values.size(); ++k) g.values.data()[k] = normal(rng);
    return g;
  }
  std::vector<double> values(space.regions());
  for (double& v : values) v = normal(rng);
  return space.expand(values, cells);
}

// ---------------------------------------------------------------------------
// Problem data

void ControlProblem::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigurationError("alpha must be a positive number");
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw ConfigurationError("control bounds must be finite with lower < upper");
  }
  if (forcing.cells() < basis.min_grid()) {
    throw ConfigurationError("quadrature grid has " + std::to_string(forcing.cells()) +
                             " cells; the basis needs at least " + std::to_string(basis.min_grid()));
  }
  for (std::size_t a = 0; a < observations.size(); ++a) {
    require_interior(observations[a].point, "observation point");
    if (!std::isfinite(observations[a].target)) throw ConfigurationError("observation target is not finite");
    for (std::size_t b = 0; b < a; ++b) {
      if (observations[a].point.x == observations[b].point.x && observations[a].point.y == observations[b].point.y) {
        throw ConfigurationError("observation points must be pairwise distinct");
      }
    }
  }
  if (!nonlinearity.value || !nonlinearity.du || !nonlinearity.duu) {
    throw ConfigurationError("control problem has no nonlinearity");
  }
  if (!space.is_full() && space.labels().rows() != forcing.cells()) {
    throw ConfigurationError("control partition does not match the quadrature grid");
  }
}

ControlEvaluation evaluate_control(const GridFunction& q, const ControlProblem& prob) {
  ControlEvaluation out;
  out.control = q;
  out.state = solve_semilinear(prob.forcing + q, prob.nonlinearity, prob.basis, prob.newton);
  double misfit = 0.0;
  out.misfits.reserve(prob.observations.size());
  for (const auto& obs : prob.observations) {
    const double r = out.state.state.value_at(obs.point) - obs.target;
    out.misfits.push_back(r);
    misfit += r * r;
  }
  out.cost = 0.5 * misfit + 0.5 * prob.alpha * l2_inner(q, q);
  return out;
}

namespace {

MeasureRHS misfit_measure(const std::vector<PointObservation>& observations, const std::vector<double>& misfits) {
  MeasureRHS mu;
  mu.atoms.reserve(observations.size());
  for (std::size_t k = 0; k < observations.size(); ++k) mu.atoms.push_back({observations[k].point, misfits[k]});
  return mu;
}

ReactionOperator linearized_operator(const EigenBasis& basis, const GridFunction& c) {
  if (c.max_abs() == 0.0) return ReactionOperator(basis);
  return ReactionOperator(basis, c);
}

}  // namespace

Sensitivity::Sensitivity(const ControlProblem& prob, ControlEvaluation evaluation)
    : alpha_(prob.alpha),
      observations_(prob.observations),
      nonlinearity_(prob.nonlinearity),
      evaluation_(std::move(evaluation)),
      table_(prob.basis.modes(), prob.cells()),
      state_grid_(table_.synthesize(evaluation_.state.state)),
      second_derivative_grid_(evaluate_on_grid(nonlinearity_, state_grid_, Derivative::duu)),
      operator_(linearized_operator(prob.basis, evaluate_on_grid(nonlinearity_, state_grid_, Derivative::du))),
      adjoint_(solve_linear(operator_, misfit_measure(observations_, evaluation_.misfits), prob.basis)),
      adjoint_grid_(table_.synthesize(adjoint_.solution)) {}

GridFunction Sensitivity::gradient() const { return adjoint_grid_ + alpha_ * evaluation_.control; }

SpectralField Sensitivity::linearized(const GridFunction& w) const {
  return operator_.solve({table_.analyze(w).coeffs});
}

double Sensitivity::hessian(const GridFunction& w1, const GridFunction& w2) const {
  return hessian(w1, linearized(w1), w2, linearized(w2));
}

double Sensitivity::hessian(const GridFunction& w1, const SpectralField& phi1, const GridFunction& w2,
                            const SpectralField& phi2) const {
  double value = alpha_ * l2_inner(w1, w2);
  if (!nonlinearity_.affine) {
    GridFunction weight = second_derivative_grid_;
    weight.values.array() *= table_.synthesize(phi1).values.array() * table_.synthesize(phi2).values.array();
    value -= l2_inner(weight, adjoint_grid_);
  }
  for (const auto& obs : observations_) value += phi1.value_at(obs.point) * phi2.value_at(obs.point);
  return value;
}

SpectralField state(const GridFunction& q, const ControlProblem& prob) {
  return solve_semilinear(prob.forcing + q, prob.nonlinearity, prob.basis, prob.newton).state;
}

double reduced_cost(const GridFunction& q, const ControlProblem& prob) { return evaluate_control(q, prob).cost; }

LinearSolveReport adjoint(const GridFunction& q, const SpectralField& u, const ControlProblem& prob) {
  if (q.cells() != prob.cells()) throw ConfigurationError("control does not live on the problem grid");
  std::vector<double> misfits;
  misfits.reserve(prob.observations.size());
  for (const auto& obs : prob.observations) misfits.push_back(u.value_at(obs.point) - obs.target);
  const GridFunction c = evaluate_on_grid(prob.nonlinearity, synthesize(u, prob.cells()), Derivative::du);
  return solve_linear(linearized_operator(prob.basis, c), misfit_measure(prob.observations, misfits), prob.basis);
}

GridFunction reduced_gradient(const GridFunction& q, const ControlProblem& prob) {
  return Sensitivity(prob, evaluate_control(q, prob)).gradient();
}

GridFunction project_admissible(const GridFunction& v, const ControlProblem& prob) {
  return GridFunction(v.values.cwiseMax(prob.lower).cwiseMin(prob.upper));
}

double hessian_form(const GridFunction& q, const GridFunction& w1, const GridFunction& w2,
                    const ControlProblem& prob) {
  return Sensitivity(prob, evaluate_control(q, prob)).hessian(w1, w2);
}

// ---------------------------------------------------------------------------
// Projected gradient

double fixed_point_residual(const GridFunction& q, const GridFunction& d, double step, const ControlProblem& prob) {
  return l2_norm(q - project_admissible(q - step * d, prob));
}

namespace {

double active_fraction(const GridFunction& q, const ControlProblem& prob) {
  const double tau = 1e-8 * (prob.upper - prob.lower);
  const auto active = ((q.values.array() - prob.lower) <= tau) || ((prob.upper - q.values.array()) <= tau);
  return static_cast<double>(active.count()) / static_cast<double>(q.values.size());
}

// Relative slack on the Armijo test: cost differences below it are round-off from
// the inner Newton solves.
constexpr double kCostNoise = 1e-12;

}  // namespace

OptimizeResult optimize(const ControlProblem& prob, const GridFunction& initial, const OptimizeOptions& options) {
  prob.validate();
  if (initial.cells() != prob.cells()) throw ConfigurationError("initial control does not live on the problem grid");

  OptimizeResult out;
  GridFunction q = project_admissible(prob.space.project(initial), prob);
  auto sens = std::make_unique<Sensitivity>(prob, evaluate_control(q, prob));
  double last_step = 0.0;

  for (int k = 0;; ++k) {
    const double cost = sens->evaluation().cost;
    const GridFunction d = prob.space.project(sens->gradient());
    const double residual = fixed_point_residual(q, d, 1.0, prob);
    const double scaled = fixed_point_residual(q, d, 1.0 / prob.alpha, prob);
    out.history.records.push_back({k, cost, residual, last_step, active_fraction(q, prob)});
    out.residual = residual;

    if (std::max(residual, scaled) <= options.tolerance) {
      out.converged = true;
      out.message = "converged";
      break;
    }
    if (k >= options.max_iterations) {
      out.message = "maximum number of iterations reached";
      break;
    }

    double step = 1.0 / prob.alpha;
    std::unique_ptr<Sensitivity> next;
    for (int b = 0; b <= options.max_backtracks && !next; ++b, step *= 0.5) {
      GridFunction trial = project_admissible(q - step * d, prob);
      const GridFunction delta = trial - q;
      const double moved = l2_inner(delta, delta);
      try {
        ControlEvaluation eval = evaluate_control(trial, prob);
        const double slack = kCostNoise * (1.0 + std::abs(cost));
        if (eval.cost <= cost - (options.sigma / step) * moved + slack) {
          next = std::make_unique<Sensitivity>(prob, std::move(eval));
          last_step = step;
        }
      } catch (const SolverError&) {
        // Too long a step for Newton: shorten it.
      }
    }
    if (!next) {
      out.message = "line search failed";
      break;
    }
    sens = std::move(next);
    q = sens->evaluation().control;
  }
  out.control = std::move(q);
  return out;
}

// ---------------------------------------------------------------------------
// Optimality certification

Tolerances Tolerances::standard(const GridFunction& d, const ControlProblem& prob) {
  return {1e-6 * (1.0 + d.max_abs()), 1e-8 * (prob.upper - prob.lower)};
}

ConeMembership critical_cone_membership(const GridFunction& q, const GridFunction& d, const GridFunction& h,
                                        const ControlProblem& prob, const Tolerances& tol) {
  ConeMembership out;
  const int cells = q.cells();
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const double hv = h.values(i, j);
      if (std::abs(d.values(i, j)) > tol.gradient && hv != 0.0) {
        out.violations.push_back({i, j, ConeViolationKind::nonzero_on_strongly_active});
      }
      if (q.values(i, j) - prob.lower <= tol.active && hv < -tol.gradient) {
        out.violations.push_back({i, j, ConeViolationKind::negative_at_lower});
      }
      if (prob.upper - q.values(i, j) <= tol.active && hv > tol.gradient) {
        out.violations.push_back({i, j, ConeViolationKind::positive_at_upper});
      }
    }
  }
  out.member = out.violations.empty();
  return out;
}

GridFunction project_to_critical_cone(const GridFunction& q, const GridFunction& d, const GridFunction& h,
                                      const ControlProblem& prob, const Tolerances& tol) {
  GridFunction out = h;
  const int cells = q.cells();
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      double& v = out.values(i, j);
      if (std::abs(d.values(i, j)) > tol.gradient) v = 0.0;
      if (q.values(i, j) - prob.lower <= tol.active) v = std::max(v, 0.0);
      if (prob.upper - q.values(i, j) <= tol.active) v = std::min(v, 0.0);
    }
  }
  return out;
}

double OptimalityReport::min_second_order() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& sample : second_order_samples) out = std::min(out, sample.value);
  return out;
}

OptimalityReport stationarity_report(const GridFunction& q, const ControlProblem& prob,
                                     const ReportOptions& options) {
  prob.validate();
  const Sensitivity sens(prob, evaluate_control(q, prob));
  const int cells = prob.cells();

  OptimalityReport report;
  report.cost = sens.evaluation().cost;
  report.gradient = prob.space.project(sens.gradient());
  const GridFunction& d = report.gradient;
  report.tolerances = Tolerances::standard(d, prob);
  const Tolerances& tol = report.tolerances;

  const GridFunction p = prob.space.project(sens.adjoint_grid());
  report.fixed_point_residual = l2_norm(q - project_admissible((-1.0 / prob.alpha) * p, prob));

  int lower = 0, upper = 0, strong = 0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const double qv = q.values(i, j);
      const double dv = d.values(i, j);
      if (std::abs(dv) > tol.gradient) ++strong;
      if (qv - prob.lower <= tol.active) {
        ++lower;
        if (dv < -tol.gradient) ++report.sign_violations.lower;
      } else if (prob.upper - qv <= tol.active) {
        ++upper;
        if (dv > tol.gradient) ++report.sign_violations.upper;
      } else if (std::abs(dv) > tol.gradient) {
        ++report.sign_violations.interior;
      }
    }
  }
  const double total = static_cast<double>(cells) * cells;
  report.active_sets = {lower / total, upper / total, (total - lower - upper) / total, strong / total};

  for (int k = 0; k < options.directions; ++k) {
    GridFunction h = project_to_critical_cone(q, d, random_direction(prob.space, cells, options.seed + k), prob, tol);
    const double norm = l2_norm(h);
    if (norm == 0.0) {
      ++report.degenerate_directions;
      continue;
    }
    h *= 1.0 / norm;
    report.second_order_samples.push_back({"direction-" + std::to_string(k), sens.hessian(h, h), l2_inner(h, h)});
  }

  report.growth_radius = options.growth_radius * (prob.upper - prob.lower);
  report.growth_estimate = std::numeric_limits<double>::infinity();
  for (int k = 0; k < options.growth_samples; ++k) {
    GridFunction h = random_direction(prob.space, cells, options.seed + 7919 + k);
    h *= 1.0 / l2_norm(h);
    const double radius = report.growth_radius * std::ldexp(1.0, -(k % 4));
    const GridFunction trial = project_admissible(q + radius * h, prob);
    const GridFunction delta = trial - q;
    const double moved = l2_inner(delta, delta);
    if (moved == 0.0) continue;
    const double rise = reduced_cost(trial, prob) - report.cost;
    report.growth_estimate = std::min(report.growth_estimate, rise / (0.5 * moved));
    ++report.growth_samples;
  }
  return report;
}

double hessian_lipschitz_probe(const GridFunction& q1, const GridFunction& q2, const GridFunction& w,
                               const ControlProblem& prob) {
  const double distance = l2_norm(q1 - q2);
  const double size = l2_inner(w, w);
  if (distance == 0.0) throw UndefinedRatioError("Hessian Lipschitz probe needs two different controls");
  if (size == 0.0) throw UndefinedRatioError("Hessian Lipschitz probe needs a nonzero direction");
  const double h1 = hessian_form(q1, w, w, prob);
  const double h2 = hessian_form(q2, w, w, prob);
  return std::abs(h1 - h2) / (distance * size);
}

}  // namespace fracpoint
