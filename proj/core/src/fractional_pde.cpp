#include "fracpoint/fractional_pde.hpp"

#include "fracpoint/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fracpoint {

namespace {

Eigen::Map<const Eigen::VectorXd> flat(const Eigen::MatrixXd& m) { return {m.data(), m.size()}; }

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int modes) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), modes, modes);
}

void require_modes(int have, const EigenBasis& basis, const char* what) {
  if (have != basis.modes()) {
    throw ConfigurationError(std::string(what) + " has " + std::to_string(have) + " modes, basis has " +
                             std::to_string(basis.modes()));
  }
}

void require_monotone(const GridFunction& c, const char* what) {
  if (c.values.size() > 0 && c.min() < -kMonotoneTolerance) {
    std::ostringstream msg;
    msg << what << " is negative (min " << c.min() << "); the reaction coefficient must be >= 0";
    throw AssumptionViolation(msg.str());
  }
}

}  // namespace

double MeasureRHS::total_variation() const {
  double sum = 0.0;
  for (const auto& atom : atoms) sum += std::abs(atom.weight);
  return sum;
}

DualLoad dirac_load(const MeasureRHS& mu, const EigenBasis& basis) {
  const int k = basis.modes();
  DualLoad load = DualLoad::zero(k);
  for (const auto& atom : mu.atoms) {
    require_interior(atom.point, "Dirac atom");
    Eigen::VectorXd sx(k), sy(k);
    for (int m = 0; m < k; ++m) {
      sx(m) = std::sin((m + 1) * std::numbers::pi * atom.point.x);
      sy(m) = std::sin((m + 1) * std::numbers::pi * atom.point.y);
    }
    load.coeffs += (2.0 * atom.weight) * sx * sy.transpose();
  }
  return load;
}

DualLoad grid_load(const GridFunction& g, const EigenBasis& basis) { return {analyze(g, basis).coeffs}; }

DualLoad field_load(const SpectralField& w) { return {w.coeffs}; }

Eigen::MatrixXd assemble_reaction_matrix(const GridFunction& c, const EigenBasis& basis) {
  require_monotone(c, "reaction coefficient");
  const int k = basis.modes();
  const SineTable table(k, c.cells());
  const Eigen::MatrixXd& s = table.matrix();
  const int cells = c.cells();

  // Separable quadrature: the x- and y-sums factor through products of 1-D sines.
  Eigen::MatrixXd pairs(cells, k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) pairs.col(a + b * k) = s.col(a).cwiseProduct(s.col(b));
  const Eigen::MatrixXd q = pairs.transpose() * c.values * pairs;

  const double area = 1.0 / (static_cast<double>(cells) * cells);
  Eigen::MatrixXd out(k * k, k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int cy = 0; cy < k; ++cy)
        for (int d = 0; d < k; ++d) out(a + cy * k, b + d * k) = area * q(a + b * k, cy + d * k);
  return out;
}

ReactionOperator::ReactionOperator(const EigenBasis& basis)
    : modes_(basis.modes()), symbol_(basis.fractional_symbol()) {}

ReactionOperator::ReactionOperator(const EigenBasis& basis, const GridFunction& reaction)
    : modes_(basis.modes()), symbol_(basis.fractional_symbol()) {
  Eigen::MatrixXd a = assemble_reaction_matrix(reaction, basis);
  a.diagonal() += flat(symbol_.matrix());
  factor_.compute(a);
  if (factor_.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of the Galerkin operator failed");
  }
  matrix_ = std::move(a);
}

SpectralField ReactionOperator::solve(const DualLoad& load) const {
  if (load.modes() != modes_) throw ConfigurationError("load and operator disagree on mode count");
  if (diagonal()) return SpectralField((load.coeffs.array() / symbol_).matrix());
  const Eigen::VectorXd x = factor_.solve(flat(load.coeffs));
  return SpectralField(unflatten(x, modes_));
}

DualLoad ReactionOperator::apply(const SpectralField& w) const {
  if (w.modes() != modes_) throw ConfigurationError("field and operator disagree on mode count");
  if (diagonal()) return {(w.coeffs.array() * symbol_).matrix()};
  const Eigen::VectorXd y = *matrix_ * flat(w.coeffs);
  return {unflatten(y, modes_)};
}

namespace {

LinearSolveReport finish_report(SpectralField solution, const DualLoad& load, std::optional<double> measure_norm,
                                const EigenBasis& basis) {
  LinearSolveReport report;
  report.solution = std::move(solution);
  report.rhs_dual_norm = hr_norm(SpectralField(load.coeffs), -(basis.s() + basis.theta()));
  report.measure_norm = measure_norm;
  report.solution_norm = hr_norm(report.solution, basis.s() - basis.theta());
  const double data = measure_norm.value_or(report.rhs_dual_norm);
  report.stability_ratio = report.solution_norm / std::max(data, std::numeric_limits<double>::min());
  return report;
}

}  // namespace

LinearSolveReport solve_linear(const GridFunction& reaction, const MeasureRHS& mu, const EigenBasis& basis) {
  const DualLoad load = dirac_load(mu, basis);
  const ReactionOperator op(basis, reaction);
  return finish_report(op.solve(load), load, mu.total_variation(), basis);
}

LinearSolveReport solve_linear(const ReactionOperator& op, const MeasureRHS& mu, const EigenBasis& basis) {
  const DualLoad load = dirac_load(mu, basis);
  return finish_report(op.solve(load), load, mu.total_variation(), basis);
}

LinearSolveReport solve_linear(const GridFunction& reaction, const DualLoad& load, const EigenBasis& basis) {
  require_modes(load.modes(), basis, "load");
  const ReactionOperator op(basis, reaction);
  return finish_report(op.solve(load), load, std::nullopt, basis);
}

DualLoad semilinear_residual(const SpectralField& u, const GridFunction& forcing, const Nonlinearity& a,
                             const EigenBasis& basis) {
  require_modes(u.modes(), basis, "state");
  const SineTable table(basis.modes(), forcing.cells());
  const GridFunction u_grid = table.synthesize(u);
  const GridFunction rhs = forcing - evaluate_on_grid(a, u_grid, Derivative::value);
  return {(u.coeffs.array() * basis.fractional_symbol()).matrix() - table.analyze(rhs).coeffs};
}

SemilinearSolution solve_semilinear(const GridFunction& forcing, const Nonlinearity& a, const EigenBasis& basis,
                                    const NewtonOptions& options) {
  const int k = basis.modes();
  const SineTable table(k, forcing.cells());
  const Eigen::MatrixXd load = table.analyze(forcing).coeffs;
  const Eigen::ArrayXXd& symbol = basis.fractional_symbol();

  auto residual = [&](const SpectralField& u, GridFunction& u_grid) {
    u_grid = table.synthesize(u);
    const GridFunction reaction = evaluate_on_grid(a, u_grid, Derivative::value);
    return Eigen::MatrixXd((u.coeffs.array() * symbol).matrix() + table.analyze(reaction).coeffs - load);
  };

  // Initial guess: drop the u-dependence of the reaction term.
  const GridFunction a_at_zero = evaluate_on_grid(a, GridFunction::zero(forcing.cells()), Derivative::value);
  SemilinearSolution out;
  out.state = SpectralField(((load - table.analyze(a_at_zero).coeffs).array() / symbol).matrix());

  GridFunction u_grid;
  Eigen::MatrixXd r = residual(out.state, u_grid);
  double r_norm = r.norm();
  out.residuals.push_back(r_norm);

  if (!std::isfinite(r_norm)) throw SolverError("Newton residual is not finite", out.residuals);
  while (r_norm > options.tolerance) {
    if (out.iterations >= options.max_iterations) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << options.max_iterations << " iterations (residual " << r_norm << ")";
      throw SolverError(msg.str(), out.residuals);
    }
    const GridFunction c = evaluate_on_grid(a, u_grid, Derivative::du);
    if (c.min() < -kMonotoneTolerance) {
      std::ostringstream msg;
      msg << "da/du(x, u) < 0 along the Newton iteration (min " << c.min() << ")";
      throw AssumptionViolation(msg.str());
    }
    const ReactionOperator jacobian(basis, c);
    const SpectralField step = jacobian.solve({-r});

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      SpectralField trial = out.state + t * step;
      GridFunction trial_grid;
      Eigen::MatrixXd trial_r = residual(trial, trial_grid);
      const double trial_norm = trial_r.norm();
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * t) * r_norm) {
        out.state = std::move(trial);
        u_grid = std::move(trial_grid);
        r = std::move(trial_r);
        r_norm = trial_norm;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    out.residuals.push_back(r_norm);
    if (!accepted) {
      std::ostringstream msg;
      msg << "Newton line search stalled at residual " << r_norm;
      throw SolverError(msg.str(), out.residuals);
    }
  }
  return out;
}

SpectralField solve_linearized(const SpectralField& u, const GridFunction& w, const Nonlinearity& a,
                               const EigenBasis& basis) {
  require_modes(u.modes(), basis, "state");
  const SineTable table(basis.modes(), w.cells());
  const GridFunction c = evaluate_on_grid(a, table.synthesize(u), Derivative::du);
  const ReactionOperator op(basis, c);
  return op.solve({table.analyze(w).coeffs});
}

SpectralField solve_second(const SpectralField& u, const SpectralField& phi1, const SpectralField& phi2,
                           const Nonlinearity& a, const EigenBasis& basis, int cells) {
  require_modes(u.modes(), basis, "state");
  const SineTable table(basis.modes(), cells);
  const GridFunction u_grid = table.synthesize(u);
  const GridFunction c = evaluate_on_grid(a, u_grid, Derivative::du);
  GridFunction source = evaluate_on_grid(a, u_grid, Derivative::duu);
  source.values.array() *= table.synthesize(phi1).values.array() * table.synthesize(phi2).values.array();
  const ReactionOperator op(basis, c);
  return op.solve({-table.analyze(source).coeffs});
}

double lipschitz_probe(const GridFunction& f1, const GridFunction& f2, const Nonlinearity& a,
                       const EigenBasis& basis, const NewtonOptions& options) {
  const double data = l2_norm(f1 - f2);
  if (data == 0.0) throw UndefinedRatioError("Lipschitz probe needs two different forcings");
  const SpectralField u1 = solve_semilinear(f1, a, basis, options).state;
  const SpectralField u2 = solve_semilinear(f2, a, basis, options).state;
  const SpectralField diff = u1 - u2;
  const double sup = synthesize(diff, f1.cells()).max_abs();
  return (hr_norm(diff, 2.0 * basis.s()) + sup) / data;
}

}  // namespace fracpoint
