#pragma once

// Pointwise-tracking optimal control of the fractional semilinear state equation
// with box constraints a <= q <= b:
//
//   j(q) = 1/2 sum_z (S(q)(z) - u_z)^2 + alpha/2 ||q||^2,   S(q) = u solves
//   (-Delta)^s u + a(., u) = f + q.
//
// Controls are grid values at the quadrature midpoints, so the L2 projection onto
// the admissible box is pointwise clipping.

#include "fracpoint/fractional_pde.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracpoint {

struct PointObservation {
  Point point;
  double target = 0.0;
};

/// The space controls live in: every grid value free, or piecewise constant on a
/// labeled partition of the grid (used for low-dimensional oracle checks).
class ControlSpace {
public:
  static ControlSpace full() { return ControlSpace(); }
  /// labels(i, j) in [0, regions) assigns each cell to a region.
  static ControlSpace piecewise_constant(Eigen::MatrixXi labels, int regions);
  /// One degree of freedom: constant controls.
  static ControlSpace constants(int cells);
  /// Two degrees of freedom: constants on x < 1/2 and x > 1/2.
  static ControlSpace halves(int cells);

  bool is_full() const noexcept { return regions_ == 0; }
  /// Number of degrees of freedom, or 0 for the full grid.
  int regions() const noexcept { return regions_; }
  const Eigen::MatrixXi& labels() const noexcept { return labels_; }

  /// L2-orthogonal projection onto the space (region averages).
  GridFunction project(const GridFunction& g) const;
  /// Region values -> grid function.
  GridFunction expand(const std::vector<double>& values, int cells) const;
  /// Grid function -> region averages.
  std::vector<double> coordinates(const GridFunction& g) const;

private:
  ControlSpace() = default;

  Eigen::MatrixXi labels_;
  int regions_ = 0;
};

struct ControlProblem {
  EigenBasis basis;
  GridFunction forcing;
  double alpha = 1.0;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<PointObservation> observations;
  Nonlinearity nonlinearity;
  ControlSpace space = ControlSpace::full();
  NewtonOptions newton{};

  int cells() const noexcept { return forcing.cells(); }
  /// alpha > 0, finite a < b, interior and pairwise distinct observation points, grid
  /// fine enough for the basis, partition matching the grid. Throws ConfigurationError
  /// or DomainError.
  void validate() const;
};

/// State, misfits u(z) - u_z and cost at one control.
struct ControlEvaluation {
  GridFunction control;
  SemilinearSolution state;
  std::vector<double> misfits;
  double cost = 0.0;
};

ControlEvaluation evaluate_control(const GridFunction& q, const ControlProblem& prob);

/// Adjoint state and the linearized operator at one control; supplies gradients
/// and Hessian-vector forms without refactorizing.
class Sensitivity {
public:
  Sensitivity(const ControlProblem& prob, ControlEvaluation evaluation);

  const ControlEvaluation& evaluation() const noexcept { return evaluation_; }
  const LinearSolveReport& adjoint() const noexcept { return adjoint_; }
  const GridFunction& adjoint_grid() const noexcept { return adjoint_grid_; }

  /// Riesz representative p + alpha q on the grid (full space).
  GridFunction gradient() const;
  /// phi_w = S'(q) w.
  SpectralField linearized(const GridFunction& w) const;
  /// j''(q)(w1, w2) via the adjoint characterization.
  double hessian(const GridFunction& w1, const GridFunction& w2) const;
  double hessian(const GridFunction& w1, const SpectralField& phi1, const GridFunction& w2,
                 const SpectralField& phi2) const;

private:
  double alpha_;
  std::vector<PointObservation> observations_;
  Nonlinearity nonlinearity_;
  ControlEvaluation evaluation_;
  SineTable table_;
  GridFunction state_grid_;
  GridFunction second_derivative_grid_;
  ReactionOperator operator_;
  LinearSolveReport adjoint_;
  GridFunction adjoint_grid_;
};

SpectralField state(const GridFunction& q, const ControlProblem& prob);
double reduced_cost(const GridFunction& q, const ControlProblem& prob);
/// Solves the adjoint equation at u = S(q): Dirac sources weighted by the misfits.
LinearSolveReport adjoint(const GridFunction& q, const SpectralField& u, const ControlProblem& prob);
GridFunction reduced_gradient(const GridFunction& q, const ControlProblem& prob);
GridFunction project_admissible(const GridFunction& v, const ControlProblem& prob);
double hessian_form(const GridFunction& q, const GridFunction& w1, const GridFunction& w2,
                    const ControlProblem& prob);

struct OptimizeOptions {
  double tolerance = 1e-9;
  int max_iterations = 500;
  /// Armijo parameter.
  double sigma = 1e-4;
  int max_backtracks = 50;
};

struct DescentRecord {
  int iteration = 0;
  double cost = 0.0;
  double residual = 0.0;
  double step = 0.0;
  double active_fraction = 0.0;
};

struct DescentHistory {
  std::vector<DescentRecord> records;
};

struct OptimizeResult {
  GridFunction control;
  DescentHistory history;
  bool converged = false;
  /// ||q - P(q - d)||_{L2} at the returned control.
  double residual = 0.0;
  std::string message;
};

/// fixed-point residual ||q - P(q - t d)||_{L2} for step t, with d the gradient
/// projected onto the control space.
double fixed_point_residual(const GridFunction& q, const GridFunction& d, double step, const ControlProblem& prob);

/// Projected gradient with Armijo backtracking along the projection arc.
OptimizeResult optimize(const ControlProblem& prob, const GridFunction& initial, const OptimizeOptions& options = {});

struct Tolerances {
  /// |d| > tau_d counts as d != 0.
  double gradient = 0.0;
  /// |q - a| <= tau_act counts as q = a.
  double active = 0.0;

  /// tau_d = 1e-6 (1 + ||d||_inf), tau_act = 1e-8 (b - a).
  static Tolerances standard(const GridFunction& d, const ControlProblem& prob);
};

enum class ConeViolationKind { nonzero_on_strongly_active, negative_at_lower, positive_at_upper };

struct ConeViolation {
  int i = 0;
  int j = 0;
  ConeViolationKind kind{};
};

struct ConeMembership {
  bool member = true;
  std::vector<ConeViolation> violations;
};

ConeMembership critical_cone_membership(const GridFunction& q, const GridFunction& d, const GridFunction& h,
                                        const ControlProblem& prob, const Tolerances& tol);

/// Projects a direction into the discrete critical cone: zero where |d| > tau_d,
/// nonnegative on the lower active set, nonpositive on the upper one.
GridFunction project_to_critical_cone(const GridFunction& q, const GridFunction& d, const GridFunction& h,
                                      const ControlProblem& prob, const Tolerances& tol);

struct SignViolations {
  int interior = 0;
  int lower = 0;
  int upper = 0;

  int total() const noexcept { return interior + lower + upper; }
};

struct SecondOrderSample {
  std::string label;
  double value = 0.0;
  double norm_squared = 0.0;
};

struct ActiveSetFractions {
  double lower = 0.0;
  double upper = 0.0;
  double inactive = 0.0;
  /// Points where |d| > tau_d: directions in the critical cone vanish there.
  double strongly_active = 0.0;
};

struct OptimalityReport {
  /// p + alpha q, projected onto the control space.
  GridFunction gradient;
  double cost = 0.0;
  /// ||q - P(-p / alpha)||_{L2} (projected onto the control space).
  double fixed_point_residual = 0.0;
  Tolerances tolerances;
  SignViolations sign_violations;
  ActiveSetFractions active_sets;
  std::vector<SecondOrderSample> second_order_samples;
  /// Directions that vanished after projection into the critical cone.
  int degenerate_directions = 0;
  /// min over sampled admissible q of (j(q) - j(q_bar)) / (||q - q_bar||^2 / 2).
  double growth_estimate = 0.0;
  double growth_radius = 0.0;
  int growth_samples = 0;

  double min_second_order() const;
};

struct ReportOptions {
  int directions = 64;
  std::uint64_t seed = 20240611;
  int growth_samples = 32;
  /// Perturbation radius (L2) of the growth probe, relative to b - a.
  double growth_radius = 1e-2;
};

OptimalityReport stationarity_report(const GridFunction& q, const ControlProblem& prob,
                                     const ReportOptions& options = {});

/// |j''(q1)(w,w) - j''(q2)(w,w)| / (||q1 - q2|| ||w||^2).
double hessian_lipschitz_probe(const GridFunction& q1, const GridFunction& q2, const GridFunction& w,
                               const ControlProblem& prob);

/// Standard-normal field in the control space (white noise on the full grid).
GridFunction random_direction(const ControlSpace& space, int cells, std::uint64_t seed);

}  // namespace fracpoint
