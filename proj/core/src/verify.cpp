#include "fracpoint/verify.hpp"

#include "fracpoint/errors.hpp"
#include "fracpoint/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace fracpoint {

SpectralField analytic_linear_oracle(const DualLoad& load, double s) {
  const int k = load.modes();
  SpectralField p = SpectralField::zero(k);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n) p({m, n}) = load.coeffs(m - 1, n - 1) / std::pow(pi2 * (m * m + n * n), s);
  return p;
}

SpectralField analytic_linear_oracle(const MeasureRHS& mu, double s, int modes) {
  DualLoad load = DualLoad::zero(modes);
  for (const auto& atom : mu.atoms) {
    require_interior(atom.point, "Dirac atom");
    for (int m = 1; m <= modes; ++m)
      for (int n = 1; n <= modes; ++n)
        load.coeffs(m - 1, n - 1) += atom.weight * 2.0 * std::sin(m * std::numbers::pi * atom.point.x) *
                                     std::sin(n * std::numbers::pi * atom.point.y);
  }
  return analytic_linear_oracle(load, s);
}

ManufacturedForcing manufactured_semilinear(const SpectralField& u_star, const Nonlinearity& a,
                                            const EigenBasis& basis, int cells) {
  const SineTable table(basis.modes(), cells);
  const SpectralField lifted((u_star.coeffs.array() * basis.fractional_symbol()).matrix());
  ManufacturedForcing out;
  out.forcing = table.synthesize(lifted) + evaluate_on_grid(a, table.synthesize(u_star), Derivative::value);
  out.aliasing_warning = !a.polynomial;
  return out;
}

std::vector<double> default_taylor_steps() { return {1e-2, 1e-3, 1e-4}; }

TaylorTestResult taylor_test(const std::function<double(double)>& remainder, double expected,
                             const std::vector<double>& steps, double noise_floor, double slope_tolerance) {
  if (steps.size() < 3) throw ConfigurationError("a Taylor test needs at least three step sizes");
  TaylorTestResult out;
  out.steps = steps;
  out.expected = expected;
  out.noise_floor = noise_floor;
  for (double t : steps) {
    const double r = std::abs(remainder(t));
    out.remainders.push_back(r);
    if (!(r > noise_floor)) out.inconclusive = true;
  }
  if (out.inconclusive) {
    out.slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double x = std::log(steps[k]);
    const double y = std::log(out.remainders[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.pass = std::isfinite(out.slope) && std::abs(out.slope - expected) <= slope_tolerance;
  return out;
}

DerivativeTaylorPair derivative_taylor_tests(const GridFunction& q, const GridFunction& w, const ControlProblem& prob,
                                             const HessianOverride& hessian_override) {
  const Sensitivity sens(prob, evaluate_control(q, prob));
  const double j0 = sens.evaluation().cost;
  const double slope = l2_inner(sens.gradient(), w);
  double curvature = sens.hessian(w, w);
  if (hessian_override) curvature = hessian_override(curvature);

  std::map<double, double> shifted;
  auto cost_at = [&](double t) {
    auto it = shifted.find(t);
    if (it == shifted.end()) it = shifted.emplace(t, reduced_cost(q + t * w, prob)).first;
    return it->second;
  };
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(j0));

  DerivativeTaylorPair out;
  out.gradient = taylor_test([&](double t) { return cost_at(t) - j0 - t * slope; }, 2.0, default_taylor_steps(), floor);
  out.hessian = taylor_test([&](double t) { return cost_at(t) - j0 - t * slope - 0.5 * t * t * curvature; }, 3.0,
                            default_taylor_steps(), floor);
  return out;
}

ScaledTaylorPair scaled_taylor_tests(const GridFunction& q, const GridFunction& w, const ControlProblem& prob,
                                     const HessianOverride& hessian_override, double max_norm) {
  const double base = l2_norm(w);
  if (!(base > 0.0)) throw ConfigurationError("Taylor direction must be nonzero");
  ScaledTaylorPair out;
  for (double norm = 4.0;; norm *= 4.0) {
    out.direction_norm = norm;
    out.tests = derivative_taylor_tests(q, (norm / base) * w, prob, hessian_override);
    if (!out.tests.hessian.inconclusive || prob.nonlinearity.affine || 4.0 * norm > max_norm) return out;
  }
}

GridSearchResult grid_search_oracle(const ControlProblem& prob, double resolution) {
  const int dof = prob.space.regions();
  if (dof < 1 || dof > 2) {
    throw ConfigurationError("grid search needs a control space with one or two degrees of freedom");
  }
  if (!(resolution > 0.0)) throw ConfigurationError("grid search resolution must be positive");
  const long points = std::lround(std::floor((prob.upper - prob.lower) / resolution)) + 1;
  auto value = [&](long k) { return std::min(prob.upper, prob.lower + k * resolution); };

  GridSearchResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<double> coords(dof);
  auto visit = [&]() {
    const GridFunction q = prob.space.expand(coords, prob.cells());
    const double cost = reduced_cost(q, prob);
    ++best.evaluations;
    if (cost < best.cost) {
      best.cost = cost;
      best.coordinates = coords;
      best.control = q;
    }
  };
  for (long a = 0; a < points; ++a) {
    coords[0] = value(a);
    if (dof == 1) {
      visit();
      continue;
    }
    for (long b = 0; b < points; ++b) {
      coords[1] = value(b);
      visit();
    }
  }
  return best;
}

double adjoint_identity_check(const GridFunction& q, const GridFunction& w, const ControlProblem& prob) {
  const Sensitivity sens(prob, evaluate_control(q, prob));
  const SpectralField phi = sens.linearized(w);
  double observed = 0.0;
  const auto& misfits = sens.evaluation().misfits;
  for (std::size_t k = 0; k < prob.observations.size(); ++k) observed += misfits[k] * phi.value_at(prob.observations[k].point);
  const double dual = l2_inner(sens.adjoint_grid(), w);
  return std::abs(observed - dual) / (1.0 + std::abs(dual));
}

const char* to_string(ProbeStatus status) {
  switch (status) {
    case ProbeStatus::pass:
      return "pass";
    case ProbeStatus::fail:
      return "fail";
    case ProbeStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

int VerificationSummary::count(ProbeStatus status) const {
  return static_cast<int>(std::ranges::count_if(probes, [status](const ProbeResult& p) { return p.status == status; }));
}

namespace {

ProbeResult threshold_probe(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured <= threshold ? ProbeStatus::pass : ProbeStatus::fail, std::move(detail), measured,
          threshold};
}

GridFunction random_admissible(const ControlProblem& prob, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(prob.lower, prob.upper);
  GridFunction q = GridFunction::zero(prob.cells());
  for (Eigen::Index k = 0; k < q.values.size(); ++k) q.values.data()[k] = uniform(rng);
  return q;
}

void linear_oracle_probes(const VerifyOptions& options, VerificationSummary& out) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coordinate(0.02, 0.98);
  std::normal_distribution<double> weight;
  const EigenBasis basis(options.modes, options.s, options.theta);
  const GridFunction no_reaction = GridFunction::zero(basis.default_grid());
  double worst = 0.0;
  for (int c = 0; c < options.dirac_configurations; ++c) {
    MeasureRHS mu;
    const int atoms = 1 + c % 4;
    for (int a = 0; a < atoms; ++a) mu.atoms.push_back({{coordinate(rng), coordinate(rng)}, weight(rng)});
    const SpectralField dense = solve_linear(no_reaction, mu, basis).solution;
    const SpectralField oracle = analytic_linear_oracle(mu, basis.s(), basis.modes());
    worst = std::max(worst, (dense.coeffs - oracle.coeffs).cwiseAbs().maxCoeff());
  }
  out.probes.push_back(threshold_probe("linear-oracle", worst, 1e-12,
                                       std::to_string(options.dirac_configurations) + " random Dirac configurations"));
}

void manufactured_probes(const VerifyOptions& options, VerificationSummary& out) {
  for (int modes : {4, 8, 16}) {
    const EigenBasis basis(modes, options.s, options.theta);
    SpectralField u_star = SpectralField::zero(modes);
    u_star({1, 1}) = 0.2;
    u_star({2, 2}) = 0.1;
    for (const auto& a : nonlinearities::registry()) {
      const auto manufactured = manufactured_semilinear(u_star, a, basis, basis.default_grid());
      std::string name = "manufactured-" + a.name + "-K" + std::to_string(modes);
      try {
        const auto solution = solve_semilinear(manufactured.forcing, a, basis);
        const double error = (solution.state.coeffs - u_star.coeffs).cwiseAbs().maxCoeff();
        out.probes.push_back(threshold_probe(std::move(name), error, 1e-10,
                                             std::to_string(solution.iterations) + " Newton steps"));
      } catch (const Error& e) {
        out.probes.push_back({std::move(name), ProbeStatus::fail, e.what(), 0.0, 1e-10});
      }
    }
  }
}

ProbeResult taylor_probe(std::string name, const TaylorTestResult& result, bool exact_model) {
  std::ostringstream detail;
  detail << "slope " << result.slope << " (expected " << result.expected << ")";
  ProbeStatus status = result.pass ? ProbeStatus::pass : ProbeStatus::fail;
  if (result.inconclusive) {
    const bool all_floor =
        std::ranges::all_of(result.remainders, [&](double r) { return r <= result.noise_floor; });
    detail.str("");
    detail << "remainder at round-off level";
    status = ProbeStatus::inconclusive;
    if (exact_model && all_floor) {
      status = ProbeStatus::pass;
      detail << " at every step (quadratic cost: the second-order model is exact)";
    }
  }
  return {std::move(name), status, detail.str(), result.slope, 0.15};
}

void taylor_probes(const VerifyOptions& options, VerificationSummary& out) {
  std::mt19937_64 rng(options.seed + 1);
  for (const auto& a : nonlinearities::registry()) {
    ControlProblem prob = fixtures::make(fixtures::Kind::cubic, options.modes);
    prob.basis = EigenBasis(options.modes, options.s, options.theta);
    prob.nonlinearity = a;
    prob.newton.tolerance = 1e-13;
    HessianOverride fault;
    if (options.inject_hessian_sign_fault) fault = [](double h) { return -h; };
    for (int c = 0; c < options.taylor_controls; ++c) {
      const GridFunction q = random_admissible(prob, rng);
      const GridFunction w = random_direction(prob.space, prob.cells(), rng());
      const auto result = scaled_taylor_tests(q, w, prob, fault).tests;
      const std::string suffix = a.name + "-" + std::to_string(c);
      out.probes.push_back(taylor_probe("taylor-gradient-" + suffix, result.gradient, false));
      out.probes.push_back(taylor_probe("taylor-hessian-" + suffix, result.hessian, a.affine));
    }
  }
}

void adjoint_probes(const VerifyOptions& options, VerificationSummary& out) {
  std::mt19937_64 rng(options.seed + 2);
  ControlProblem prob = fixtures::make(fixtures::Kind::cubic, options.modes);
  prob.basis = EigenBasis(options.modes, options.s, options.theta);
  double worst = 0.0;
  for (int k = 0; k < options.adjoint_pairs; ++k) {
    const GridFunction q = random_admissible(prob, rng);
    const GridFunction w = random_direction(prob.space, prob.cells(), rng());
    worst = std::max(worst, adjoint_identity_check(q, w, prob));
  }
  out.probes.push_back(threshold_probe("adjoint-identity", worst, 1e-8,
                                       std::to_string(options.adjoint_pairs) + " random (q, w) pairs"));
}

void grid_search_probes(const VerifyOptions& options, VerificationSummary& out) {
  for (auto kind : {fixtures::Kind::linear, fixtures::Kind::cubic, fixtures::Kind::active_bound}) {
    const ControlProblem prob = fixtures::make(kind, options.modes, true);
    const auto oracle = grid_search_oracle(prob, options.resolution);
    const auto result = optimize(prob, GridFunction::zero(prob.cells()));
    const double control = prob.space.coordinates(result.control).front();
    const double control_gap = std::abs(control - oracle.coordinates.front());
    const double cost_gap = std::abs(reduced_cost(result.control, prob) - oracle.cost);
    const std::string name = std::string("grid-search-") + fixtures::name(kind);
    std::ostringstream detail;
    detail << "optimize " << control << " vs oracle " << oracle.coordinates.front() << ", cost gap " << cost_gap;
    const bool ok = result.converged && control_gap <= 2.0 * options.resolution &&
                    cost_gap <= 1e-6 + options.resolution * options.resolution;
    out.probes.push_back({name, ok ? ProbeStatus::pass : ProbeStatus::fail, detail.str(), control_gap,
                          2.0 * options.resolution});
  }
}

}  // namespace

VerificationSummary run_verification_suite(const VerifyOptions& options) {
  VerificationSummary out;
  linear_oracle_probes(options, out);
  manufactured_probes(options, out);
  taylor_probes(options, out);
  adjoint_probes(options, out);
  grid_search_probes(options, out);
  return out;
}

}  // namespace fracpoint
