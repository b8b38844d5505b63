#pragma once

// Galerkin solvers for the spectral fractional Laplacian on the unit square:
//   linear problems  (-Delta)^s p + c p = mu     with Dirac-measure or L2 data,
//   the semilinear state equation  (-Delta)^s u + a(., u) = f + q,
//   and the first/second-order sensitivity equations of the state map.

#include "fracpoint/nonlinearity.hpp"
#include "fracpoint/spectral.hpp"

#include <Eigen/Cholesky>

#include <optional>
#include <vector>

namespace fracpoint {

struct DiracAtom {
  Point point;
  double weight = 0.0;
};

/// Finite combination of Dirac measures sum_z w_z delta_z.
struct MeasureRHS {
  std::vector<DiracAtom> atoms;

  /// Total variation sum_z |w_z|, the exact M(Omega) norm of an atomic measure.
  double total_variation() const;
};

/// Coefficients F_mn = <F, phi_mn> of a functional on the truncated space.
struct DualLoad {
  Eigen::MatrixXd coeffs;

  static DualLoad zero(int modes) { return {Eigen::MatrixXd::Zero(modes, modes)}; }
  int modes() const noexcept { return static_cast<int>(coeffs.rows()); }
};

/// F_mn = sum_z w_z phi_mn(z). Throws DomainError for non-interior atoms.
DualLoad dirac_load(const MeasureRHS& mu, const EigenBasis& basis);
/// F_mn = midpoint quadrature of the integral of g phi_mn.
DualLoad grid_load(const GridFunction& g, const EigenBasis& basis);
/// F_mn = w_mn (identification of L2 fields with functionals).
DualLoad field_load(const SpectralField& w);

/// Midpoint quadrature of the reaction mass matrix int c phi_mn phi_m'n', indexed by
/// the column-major flattening (m-1) + K (n-1). Throws AssumptionViolation when c
/// drops below -kMonotoneTolerance.
Eigen::MatrixXd assemble_reaction_matrix(const GridFunction& c, const EigenBasis& basis);

/// Factorized Galerkin operator diag(lambda^s) + M_c.
class ReactionOperator {
public:
  /// c == 0: the operator is diagonal and solved in closed form.
  explicit ReactionOperator(const EigenBasis& basis);
  ReactionOperator(const EigenBasis& basis, const GridFunction& reaction);

  SpectralField solve(const DualLoad& load) const;
  /// Galerkin residual form: returns coefficients of A w as a load.
  DualLoad apply(const SpectralField& w) const;

  int modes() const noexcept { return modes_; }
  bool diagonal() const noexcept { return !matrix_.has_value(); }

private:
  int modes_;
  Eigen::ArrayXXd symbol_;
  std::optional<Eigen::MatrixXd> matrix_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

struct LinearSolveReport {
  SpectralField solution;
  /// Truncated H^{-s-theta} norm of the load; a lower bound of the true dual norm.
  double rhs_dual_norm = 0.0;
  /// sum |w_z| for measure data, unset for grid/field loads.
  std::optional<double> measure_norm;
  /// ||p||_{H^{s-theta}}.
  double solution_norm = 0.0;
  /// solution_norm / max(measure_norm or rhs_dual_norm, eps).
  double stability_ratio = 0.0;
};

LinearSolveReport solve_linear(const GridFunction& reaction, const MeasureRHS& mu, const EigenBasis& basis);
LinearSolveReport solve_linear(const GridFunction& reaction, const DualLoad& load, const EigenBasis& basis);
/// Same report with an already factorized operator.
LinearSolveReport solve_linear(const ReactionOperator& op, const MeasureRHS& mu, const EigenBasis& basis);

struct NewtonOptions {
  /// Stop when the coefficient-space residual norm drops to this value.
  double tolerance = 1e-11;
  int max_iterations = 50;
  int max_halvings = 20;
};

struct SemilinearSolution {
  SpectralField state;
  /// Residual norm before each Newton step, ending with the accepted final residual.
  std::vector<double> residuals;
  int iterations = 0;
};

/// Galerkin residual R(U) = Lambda^s U + P(a(., u)) - P(forcing).
DualLoad semilinear_residual(const SpectralField& u, const GridFunction& forcing, const Nonlinearity& a,
                             const EigenBasis& basis);

/// Damped Newton solve of the semilinear state equation. The grid of `forcing`
/// is the quadrature grid. Throws SolverError on stagnation or iteration exhaustion
/// and AssumptionViolation if da/du turns negative along the iteration.
SemilinearSolution solve_semilinear(const GridFunction& forcing, const Nonlinearity& a, const EigenBasis& basis,
                                    const NewtonOptions& options = {});

/// phi = S'(q) w: (Lambda^s + M_{a_u(u)}) phi = P(w).
SpectralField solve_linearized(const SpectralField& u, const GridFunction& w, const Nonlinearity& a,
                               const EigenBasis& basis);

/// psi = S''(q)(w1, w2): (Lambda^s + M_{a_u(u)}) psi = -P(a_uu(u) phi1 phi2).
SpectralField solve_second(const SpectralField& u, const SpectralField& phi1, const SpectralField& phi2,
                           const Nonlinearity& a, const EigenBasis& basis, int cells);

/// (||u1 - u2||_{H^{2s}} + max_grid |u1 - u2|) / ||f1 - f2||_{L2}.
double lipschitz_probe(const GridFunction& f1, const GridFunction& f2, const Nonlinearity& a,
                       const EigenBasis& basis, const NewtonOptions& options = {});

}  // namespace fracpoint
