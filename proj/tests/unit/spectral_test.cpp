#include <fracpoint/errors.hpp>
#include <fracpoint/spectral.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fracpoint;

namespace {

constexpr double kPi = std::numbers::pi;
// (2 pi^2)^(3/4) and related constants, evaluated at 30 digits.
constexpr double kLambda11 = 19.7392088021787172376689819998;
constexpr double kLambda11Pow075 = 9.36477410298536055718191431938;
constexpr double kSqrtLambda11 = 4.44288293815836624701588099006;

SpectralField random_field(int modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralField w = SpectralField::zero(modes);
  for (int n = 1; n <= modes; ++n) {
    for (int m = 1; m <= modes; ++m) w({m, n}) = normal(rng);
  }
  return w;
}

}  // namespace

TEST(Eigenvalue, MatchesClosedForm) {
  EXPECT_NEAR(eigenvalue({1, 1}), kLambda11, 1e-13);
  EXPECT_NEAR(eigenvalue({2, 3}), 13.0 * kPi * kPi, 1e-12);
  EXPECT_LT(eigenvalue({1, 1}), eigenvalue({1, 2}));
  EXPECT_THROW(eigenvalue({0, 1}), ConfigurationError);
}

TEST(EvalBasis, CenterValues) {
  EXPECT_NEAR(eval_basis({1, 1}, {0.5, 0.5}), 2.0, 1e-15);
  EXPECT_NEAR(eval_basis({1, 2}, {0.5, 0.5}), 0.0, 1e-15);
}

TEST(EvalBasis, RejectsBoundaryAndExterior) {
  EXPECT_THROW(eval_basis({1, 1}, {0.0, 0.5}), DomainError);
  EXPECT_THROW(eval_basis({1, 1}, {0.5, 1.0}), DomainError);
  EXPECT_THROW(eval_basis({1, 1}, {1.2, 0.5}), DomainError);
  EXPECT_THROW(eval_basis({1, 1}, {0.5, std::nan("")}), DomainError);
}

TEST(EvalBasis, UnitNormUnderQuadrature) {
  const GridFunction phi = synthesize(SpectralField::unit(4, {1, 1}), 16);
  EXPECT_NEAR(l2_inner(phi, phi), 1.0, 1e-12);
}

TEST(EigenBasis, ValidatesExponents) {
  EXPECT_NO_THROW(EigenBasis(4, 0.75, 0.5));
  EXPECT_THROW(EigenBasis(4, 0.5, 0.5), ConfigurationError);
  EXPECT_THROW(EigenBasis(4, 1.0, 0.5), ConfigurationError);
  EXPECT_THROW(EigenBasis(4, 0.75, 0.2), ConfigurationError);
  EXPECT_THROW(EigenBasis(4, 0.75, 0.75), ConfigurationError);
  EXPECT_THROW(EigenBasis(0, 0.75, 0.5), ConfigurationError);
}

TEST(EigenBasis, GridSizes) {
  const EigenBasis basis(6, 0.75);
  EXPECT_EQ(basis.min_grid(), 7);
  EXPECT_EQ(basis.default_grid(), 24);
  EXPECT_NEAR(basis.fractional_symbol()(0, 0), kLambda11Pow075, 1e-12);
}

TEST(Synthesize, ZeroCoefficientsGiveZeroGrid) {
  EXPECT_EQ(synthesize(SpectralField::zero(4), 16).max_abs(), 0.0);
}

TEST(Synthesize, SingleModePeaksNearCenter) {
  const GridFunction phi = synthesize(SpectralField::unit(4, {1, 1}), 16);
  Eigen::Index i = 0, j = 0;
  const double peak = phi.values.maxCoeff(&i, &j);
  EXPECT_GT(peak, 1.98);
  EXPECT_LT(peak, 2.0);
  EXPECT_TRUE(i == 7 || i == 8);
  EXPECT_TRUE(j == 7 || j == 8);
  const Point node = GridFunction::node(16, 3, 11);
  EXPECT_NEAR(phi.values(3, 11), eval_basis({1, 1}, node), 1e-14);
}

TEST(Synthesize, RejectsTooCoarseGrid) {
  EXPECT_THROW(synthesize(SpectralField::zero(8), 8), ConfigurationError);
  EXPECT_NO_THROW(synthesize(SpectralField::zero(8), 9));
}

TEST(Analyze, RecoversSingleMode) {
  const EigenBasis basis(5, 0.75);
  const SpectralField w = analyze(synthesize(SpectralField::unit(5, {1, 1}), 20), basis);
  EXPECT_NEAR((w.coeffs - SpectralField::unit(5, {1, 1}).coeffs).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Analyze, ConstantKillsEvenModes) {
  const EigenBasis basis(4, 0.75);
  const SpectralField w = analyze(GridFunction::constant(64, 1.0), basis);
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      if (m % 2 == 0 || n % 2 == 0) {
        EXPECT_NEAR(w({m, n}), 0.0, 1e-14) << m << "," << n;
      } else {
        // Integral of phi_mn over the square is 8 / (m n pi^2) for odd m, n; the midpoint
        // rule is second-order accurate.
        EXPECT_NEAR(w({m, n}), 8.0 / (m * n * kPi * kPi), 2e-3) << m << "," << n;
      }
    }
  }
}

TEST(Analyze, RoundTripOnBandLimitedData) {
  for (int K : {3, 8, 15}) {
    const EigenBasis basis(K, 0.75);
    const SpectralField w = random_field(K, 17 + K);
    for (int M : {K + 1, 2 * K, 4 * K}) {
      const SpectralField back = analyze(synthesize(w, M), basis);
      EXPECT_LT((back.coeffs - w.coeffs).cwiseAbs().maxCoeff(), 1e-12) << "K=" << K << " M=" << M;
    }
  }
}

TEST(Analyze, RejectsGridMismatch) {
  const EigenBasis basis(8, 0.75);
  EXPECT_THROW(analyze(GridFunction::zero(8), basis), ConfigurationError);
}

TEST(FracPowerApply, SingleMode) {
  const SpectralField e11 = SpectralField::unit(3, {1, 1});
  EXPECT_NEAR(frac_power_apply(e11, 0.75)({1, 1}), kLambda11Pow075, 1e-12);
  const SpectralField w = random_field(3, 5);
  EXPECT_EQ(frac_power_apply(w, 0.0).coeffs, w.coeffs);
}

TEST(FracPowerApply, ComposesAdditively) {
  const SpectralField w = random_field(6, 9);
  const SpectralField back = frac_power_apply(frac_power_apply(w, 0.8), -0.8);
  EXPECT_LT((back.coeffs - w.coeffs).cwiseAbs().maxCoeff(), 1e-12);
  const SpectralField split = frac_power_apply(frac_power_apply(w, 0.3), 0.45);
  const SpectralField joined = frac_power_apply(w, 0.75);
  EXPECT_LT(((split.coeffs - joined.coeffs).array() / joined.coeffs.array()).abs().maxCoeff(), 1e-12);
}

TEST(HrNorm, SingleModeValues) {
  const SpectralField e11 = SpectralField::unit(2, {1, 1});
  EXPECT_NEAR(hr_norm(e11, 1.0), kSqrtLambda11, 1e-13);
  EXPECT_NEAR(hr_norm(e11, -1.0), 1.0 / kSqrtLambda11, 1e-15);
}

TEST(HrNorm, ParsevalAtZero) {
  const SpectralField w = random_field(7, 21);
  const GridFunction g = synthesize(w, 28);
  EXPECT_NEAR(hr_norm(w, 0.0), w.coeffs.norm(), 1e-13);
  EXPECT_NEAR(hr_norm(w, 0.0) * hr_norm(w, 0.0), l2_inner(g, g), 1e-10);
}

TEST(HrNorm, MonotoneInExponent) {
  const SpectralField w = random_field(5, 3);
  double previous = hr_norm(w, -2.0);
  for (double r = -1.5; r <= 2.0; r += 0.5) {
    const double current = hr_norm(w, r);
    EXPECT_GT(current, previous) << "r=" << r;
    previous = current;
  }
}

TEST(L2Inner, OrthonormalityAndArea) {
  const GridFunction a = synthesize(SpectralField::unit(4, {1, 1}), 16);
  const GridFunction b = synthesize(SpectralField::unit(4, {1, 2}), 16);
  EXPECT_NEAR(l2_inner(a, a), 1.0, 1e-12);
  EXPECT_NEAR(l2_inner(a, b), 0.0, 1e-12);
  EXPECT_NEAR(l2_inner(GridFunction::constant(10, 1.0), GridFunction::constant(10, 1.0)), 1.0, 1e-15);
  EXPECT_THROW(l2_inner(a, GridFunction::zero(8)), ConfigurationError);
}

TEST(SpectralField, PointValueMatchesBasisSum) {
  const SpectralField w = random_field(4, 11);
  const Point z{0.31, 0.72};
  double expected = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) expected += w({m, n}) * eval_basis({m, n}, z);
  }
  EXPECT_NEAR(w.value_at(z), expected, 1e-13);
  EXPECT_THROW(w.value_at({0.0, 0.3}), DomainError);
}

TEST(SpectralField, ArithmeticChecksModeCounts) {
  SpectralField a = SpectralField::zero(3);
  EXPECT_THROW(a += SpectralField::zero(4), ConfigurationError);
  EXPECT_THROW(SpectralField::unit(3, {4, 1}), ConfigurationError);
}
