#pragma once

// Independent oracles and finite-difference harnesses. Nothing here reuses the
// dense Galerkin solve it checks: the linear oracle inverts the diagonal symbol
// directly, the manufactured forcing is built from the exact state, and the
// global oracle scans the cost over a grid of admissible controls.

#include "fracpoint/control.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fracpoint {

/// p_mn = F_mn / lambda_mn^s with lambda computed from the closed form.
SpectralField analytic_linear_oracle(const DualLoad& load, double s);
SpectralField analytic_linear_oracle(const MeasureRHS& mu, double s, int modes);

struct ManufacturedForcing {
  GridFunction forcing;
  /// Non-polynomial nonlinearity: a(., u*) is not band-limited on the grid.
  bool aliasing_warning = false;
};

/// f = synthesize(Lambda^s u*) + a(., u*), so that u* solves the Galerkin system.
ManufacturedForcing manufactured_semilinear(const SpectralField& u_star, const Nonlinearity& a,
                                            const EigenBasis& basis, int cells);

struct TaylorTestResult {
  std::vector<double> steps;
  std::vector<double> remainders;
  double slope = 0.0;
  double expected = 0.0;
  double noise_floor = 0.0;
  bool pass = false;
  /// Some remainder sits at or below the noise floor; the slope is not meaningful.
  bool inconclusive = false;
};

/// Default step set {1e-2, 1e-3, 1e-4}.
std::vector<double> default_taylor_steps();

/// Least-squares slope of log |remainder(t)| against log t. Passes iff the slope
/// is within `slope_tolerance` of `expected`. Remainders <= `noise_floor` mark the
/// result inconclusive instead of failing it.
TaylorTestResult taylor_test(const std::function<double(double)>& remainder, double expected,
                             const std::vector<double>& steps = default_taylor_steps(), double noise_floor = 0.0,
                             double slope_tolerance = 0.15);

/// Remainders of the first- and second-order Taylor models of j at q in direction w.
struct DerivativeTaylorPair {
  TaylorTestResult gradient;
  TaylorTestResult hessian;
};

/// Hook for harness self-tests: replaces the Hessian value used by the check.
using HessianOverride = std::function<double(double exact)>;

DerivativeTaylorPair derivative_taylor_tests(const GridFunction& q, const GridFunction& w, const ControlProblem& prob,
                                             const HessianOverride& hessian_override = {});

struct ScaledTaylorPair {
  DerivativeTaylorPair tests;
  /// L2 norm of the direction actually used.
  double direction_norm = 0.0;
};

/// Runs derivative_taylor_tests along `w` rescaled to norm 4, then 16, 64, ... up to
/// `max_norm` until the Hessian remainders clear the round-off floor. Third-order
/// terms scale with the cube of the norm while the floor does not move.
ScaledTaylorPair scaled_taylor_tests(const GridFunction& q, const GridFunction& w, const ControlProblem& prob,
                                     const HessianOverride& hessian_override = {}, double max_norm = 4096.0);

struct GridSearchResult {
  /// Best region values.
  std::vector<double> coordinates;
  GridFunction control;
  double cost = 0.0;
  int evaluations = 0;
};

/// Exhaustive scan of j over the admissible box of a 1- or 2-region control space
/// with spacing `resolution`. Refuses full-grid or >2-region spaces.
GridSearchResult grid_search_oracle(const ControlProblem& prob, double resolution);

/// |sum_z (u(z) - u_z) phi_w(z) - (p, w)| / (1 + |(p, w)|).
double adjoint_identity_check(const GridFunction& q, const GridFunction& w, const ControlProblem& prob);

enum class ProbeStatus { pass, fail, inconclusive };

const char* to_string(ProbeStatus status);

struct ProbeResult {
  std::string name;
  ProbeStatus status = ProbeStatus::pass;
  std::string detail;
  double measured = 0.0;
  double threshold = 0.0;
};

struct VerificationSummary {
  std::vector<ProbeResult> probes;

  int count(ProbeStatus status) const;
  bool passed() const { return count(ProbeStatus::fail) == 0; }
};

struct VerifyOptions {
  double s = 0.75;
  double theta = 0.5;
  int modes = 8;
  std::uint64_t seed = 12345;
  int dirac_configurations = 100;
  int taylor_controls = 2;
  int adjoint_pairs = 10;
  /// Grid-search spacing for the one-dimensional oracle probes.
  double resolution = 1e-3;
  /// Flip the sign of every Hessian value fed to the Taylor tests.
  bool inject_hessian_sign_fault = false;
};

/// Runs the oracle tier: linear oracle agreement, manufactured recovery, Taylor
/// tests for every registry nonlinearity, the adjoint identity and grid-search
/// agreement on the one-dimensional fixtures.
VerificationSummary run_verification_suite(const VerifyOptions& options = {});

}  // namespace fracpoint
