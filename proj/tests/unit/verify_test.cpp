// Oracle tier: these checks run before the optimization suite.

#include <fracpoint/errors.hpp>
#include <fracpoint/fixtures.hpp>
#include <fracpoint/verify.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fracpoint;

TEST(LinearOracle, CenterDirac) {
  const SpectralField p = analytic_linear_oracle(MeasureRHS{{{{0.5, 0.5}, 1.0}}}, 0.75, 4);
  EXPECT_NEAR(p({1, 1}), 0.213566283394110664, 1e-15);
  EXPECT_NEAR(p({1, 2}), 0.0, 1e-16);
}

TEST(LinearOracle, UnitLoad) {
  const SpectralField e = SpectralField::unit(5, {2, 3});
  const SpectralField p = analytic_linear_oracle(DualLoad{e.coeffs}, 0.6);
  EXPECT_NEAR(p({2, 3}), std::pow(eigenvalue({2, 3}), -0.6), 1e-16);
  EXPECT_EQ(p.coeffs.cwiseAbs().sum(), std::abs(p({2, 3})));
}

TEST(LinearOracle, AgreesWithTheGalerkinSolve) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(0.01, 0.99), weight(-2.0, 2.0);
  for (double s : {0.6, 0.75, 0.9}) {
    const EigenBasis basis(16, s);
    for (int trial = 0; trial < 20; ++trial) {
      MeasureRHS mu;
      for (int k = 0; k < 1 + trial % 4; ++k) mu.atoms.push_back({{coord(rng), coord(rng)}, weight(rng)});
      const auto solved = solve_linear(GridFunction::zero(64), mu, basis);
      const SpectralField oracle = analytic_linear_oracle(mu, s, 16);
      EXPECT_LT((solved.solution.coeffs - oracle.coeffs).cwiseAbs().maxCoeff(), 1e-12) << "s=" << s;
    }
  }
}

TEST(Manufactured, ZeroStateGivesZeroForcing) {
  const EigenBasis basis(4, 0.75);
  for (const auto& a : nonlinearities::registry()) {
    EXPECT_EQ(manufactured_semilinear(SpectralField::zero(4), a, basis, 16).forcing.max_abs(), 0.0) << a.name;
  }
}

TEST(Manufactured, CubicRecovery) {
  for (int K : {3, 6, 8}) {
    const EigenBasis basis(K, 0.75);
    SpectralField u = 0.3 * SpectralField::unit(K, {1, 1});
    if (K >= 6) u = 0.2 * SpectralField::unit(K, {1, 1}) + 0.1 * SpectralField::unit(K, {2, 2});
    const auto made = manufactured_semilinear(u, nonlinearities::cubic(), basis, 4 * K);
    EXPECT_FALSE(made.aliasing_warning);
    const auto sol = solve_semilinear(made.forcing, nonlinearities::cubic(), basis);
    EXPECT_LT((sol.state.coeffs - u.coeffs).cwiseAbs().maxCoeff(), 1e-10) << "K=" << K;
  }
}

TEST(Manufactured, WarnsForNonPolynomialReaction) {
  const EigenBasis basis(4, 0.75);
  const SpectralField u = 0.3 * SpectralField::unit(4, {1, 1});
  EXPECT_TRUE(manufactured_semilinear(u, nonlinearities::exponential(), basis, 16).aliasing_warning);
  EXPECT_TRUE(manufactured_semilinear(u, nonlinearities::arctan_saturated(), basis, 16).aliasing_warning);
}

TEST(TaylorTest, RecoversPowerLaws) {
  const auto quadratic = taylor_test([](double t) { return 3.0 * t * t; }, 2.0);
  EXPECT_TRUE(quadratic.pass);
  EXPECT_NEAR(quadratic.slope, 2.0, 1e-12);
  const auto cubic = taylor_test([](double t) { return 0.5 * t * t * t + 1e-3 * t * t * t * t; }, 3.0);
  EXPECT_TRUE(cubic.pass);
  EXPECT_FALSE(taylor_test([](double t) { return t * t; }, 3.0).pass);
}

TEST(TaylorTest, ZeroRemainderIsInconclusive) {
  const auto result = taylor_test([](double) { return 0.0; }, 2.0, default_taylor_steps(), 1e-15);
  EXPECT_TRUE(result.inconclusive);
  EXPECT_FALSE(result.pass);
  EXPECT_THROW(taylor_test([](double t) { return t; }, 1.0, {1e-2, 1e-3}), ConfigurationError);
}

TEST(TaylorTest, ReducedCostDerivatives) {
  auto prob = fixtures::make(fixtures::Kind::cubic, 8);
  prob.newton.tolerance = 1e-13;
  const GridFunction q = GridFunction::sample(32, [](Point p) { return 0.5 * std::cos(2 * p.x - p.y); });
  const GridFunction w = random_direction(prob.space, 32, 5);
  const auto scaled = scaled_taylor_tests(q, w, prob);
  EXPECT_TRUE(scaled.tests.gradient.pass) << scaled.tests.gradient.slope;
  EXPECT_TRUE(scaled.tests.hessian.pass) << scaled.tests.hessian.slope;
  EXPECT_GE(scaled.direction_norm, 4.0);
}

TEST(TaylorTest, DetectsAWrongHessian) {
  auto prob = fixtures::make(fixtures::Kind::cubic, 8);
  prob.newton.tolerance = 1e-13;
  const GridFunction q = GridFunction::constant(32, 0.2);
  const GridFunction w = random_direction(prob.space, 32, 6);
  const auto flipped = scaled_taylor_tests(q, w, prob, [](double h) { return -h; });
  EXPECT_TRUE(flipped.tests.gradient.pass);
  EXPECT_FALSE(flipped.tests.hessian.pass);
  EXPECT_FALSE(flipped.tests.hessian.inconclusive);
  EXPECT_NEAR(flipped.tests.hessian.slope, 2.0, 0.15);
}

TEST(GridSearch, MatchedInstanceMinimizesAtZero) {
  auto prob = fixtures::matched(4);
  prob.space = ControlSpace::constants(16);
  const auto result = grid_search_oracle(prob, 1e-2);
  EXPECT_NEAR(result.coordinates[0], 0.0, 1e-12);
  EXPECT_NEAR(result.cost, 0.0, 1e-15);
  EXPECT_EQ(result.evaluations, 201);
}

TEST(GridSearch, OptimizeAgreesOnOneDofCubic) {
  const auto prob = fixtures::make(fixtures::Kind::cubic, 8, true);
  const auto oracle = grid_search_oracle(prob, 1e-3);
  const auto result = optimize(prob, GridFunction::zero(32));
  ASSERT_TRUE(result.converged);
  EXPECT_NEAR(prob.space.coordinates(result.control)[0], oracle.coordinates[0], 2e-3);
}

TEST(GridSearch, ConvexScanIsUnimodal) {
  const auto prob = fixtures::make(fixtures::Kind::linear, 6, true);
  int sign_changes = 0;
  double previous_slope = 0.0;
  double previous = reduced_cost(prob.space.expand({-1.0}, 24), prob);
  for (int k = 1; k <= 100; ++k) {
    const double value = reduced_cost(prob.space.expand({-1.0 + 0.02 * k}, 24), prob);
    const double slope = value - previous;
    if (k > 1 && (slope > 0) != (previous_slope > 0)) ++sign_changes;
    previous_slope = slope;
    previous = value;
  }
  EXPECT_EQ(sign_changes, 1);
}

TEST(GridSearch, TwoRegionScan) {
  auto prob = fixtures::make(fixtures::Kind::cubic, 4);
  prob.space = ControlSpace::halves(16);
  const auto result = grid_search_oracle(prob, 0.05);
  EXPECT_EQ(result.coordinates.size(), 2u);
  EXPECT_EQ(result.evaluations, 41 * 41);
  EXPECT_LE(result.cost, reduced_cost(GridFunction::zero(16), prob));
}

TEST(GridSearch, RefusesLargeSpaces) {
  const auto full = fixtures::make(fixtures::Kind::cubic, 4);
  EXPECT_THROW(grid_search_oracle(full, 0.1), ConfigurationError);
  auto three = full;
  Eigen::MatrixXi labels = Eigen::MatrixXi::Zero(16, 16);
  labels.topRows(5).setConstant(1);
  labels.bottomRows(5).setConstant(2);
  three.space = ControlSpace::piecewise_constant(labels, 3);
  EXPECT_THROW(grid_search_oracle(three, 0.1), ConfigurationError);
  auto one = fixtures::make(fixtures::Kind::cubic, 4, true);
  EXPECT_THROW(grid_search_oracle(one, 0.0), ConfigurationError);
}

TEST(AdjointIdentity, HoldsAcrossReactions) {
  const auto matched = fixtures::matched(6);
  EXPECT_EQ(adjoint_identity_check(GridFunction::zero(24), random_direction(matched.space, 24, 1), matched), 0.0);

  const auto linear = fixtures::make(fixtures::Kind::linear, 6);
  const GridFunction mode = synthesize(SpectralField::unit(6, {2, 1}), 24);
  EXPECT_LE(adjoint_identity_check(GridFunction::zero(24), mode, linear), 1e-12);

  const auto cubic = fixtures::make(fixtures::Kind::cubic, 8);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    GridFunction q = GridFunction::zero(32);
    q.values = q.values.unaryExpr([&](double) { return box(rng); });
    EXPECT_LE(adjoint_identity_check(q, random_direction(cubic.space, 32, rng()), cubic), 1e-8);
  }
}

TEST(VerificationSuite, DefaultOptionsPass) {
  const auto summary = run_verification_suite();
  for (const auto& probe : summary.probes) {
    EXPECT_NE(probe.status, ProbeStatus::fail) << probe.name << ": " << probe.detail;
  }
  EXPECT_TRUE(summary.passed());
  EXPECT_GT(summary.count(ProbeStatus::pass), 20);
}

TEST(VerificationSuite, InjectedHessianFaultFailsTaylorProbes) {
  VerifyOptions options;
  options.inject_hessian_sign_fault = true;
  options.taylor_controls = 1;
  const auto summary = run_verification_suite(options);
  EXPECT_FALSE(summary.passed());
  for (const auto& probe : summary.probes) {
    const bool hessian = probe.name.rfind("taylor-hessian-", 0) == 0;
    EXPECT_EQ(probe.status == ProbeStatus::fail, hessian) << probe.name;
  }
}
