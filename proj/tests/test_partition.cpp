#include <cmath>

#include <gtest/gtest.h>

#include "renorm/partition.hpp"

using namespace renorm;

namespace {
const Spectrum kHarmonic = Spectrum::harmonic();
const Spectrum kSquares(PowerLaw{1, 2});
const Regulator kSharp(SharpCutoff{1});

// E[exp(−a⁴)] for a ~ N(0, 1/2), by direct quadrature in a.
double single_mode_reference() {
  quadrature::Options opt;
  opt.abs_tol = 1e-14;
  opt.initial_panels = 8;
  return quadrature::integrate([](double a) { return std::exp(-a * a * a * a - a * a) / std::sqrt(kPi); }, -8.0,
                               8.0, opt)
      .value;
}
}  // namespace

TEST(Transform, KernelIsNormalized) {
  for (double lambda : {1e-6, 0.3, 1.0, 20.0}) {
    const auto r = gaussian_transform([](double) { return ComplexValue(1.0, 0.0); }, lambda, {}, 0.0);
    EXPECT_NEAR(r.value.real(), 1.0, 1e-12) << lambda;
    EXPECT_EQ(r.value.imag(), 0.0);
  }
}

TEST(Transform, OscillationBudgetIsEnforced) {
  QuadratureConfig q;
  q.max_nodes = 2000;
  try {
    gaussian_transform([](double s) { return std::exp(ComplexValue(0.0, 50.0 * s)); }, 1.0, q, 50.0);
    FAIL() << "expected OscillationBudgetExceeded";
  } catch (const OscillationBudgetExceeded& e) {
    EXPECT_GT(e.required_nodes(), q.max_nodes);
  }
}

TEST(ZN, SmallLambdaLimit) {
  for (std::size_t n : {1u, 10u, 100u}) EXPECT_NEAR(z_n(kHarmonic, 1e-12, n), 1.0, 1e-6) << n;
}

TEST(ZN, SingleModeAgreesWithDirectIntegral) {
  EXPECT_NEAR(z_n(kHarmonic, 1.0, 1), single_mode_reference(), 1e-10);
  EXPECT_NEAR(z_n(kHarmonic, 1.0, 1), 0.772052177852982266, 1e-10);
}

TEST(ZN, DecaysForSpectraOutsideB1) {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double z10 = std::abs(z_n(kHarmonic, lambda, 10));
    const double z1000 = std::abs(z_n(kHarmonic, lambda, 1000));
    EXPECT_LT(z1000, z10) << lambda;
  }
  const double a = std::abs(z_n(kHarmonic, 1.0, 10));
  const double b = std::abs(z_n(kHarmonic, 1.0, 100));
  const double c = std::abs(z_n(kHarmonic, 1.0, 1000));
  EXPECT_LT(b, a);
  EXPECT_LT(c, b);
}

TEST(ZNBound, DominatesZN) {
  for (double lambda : {0.5, 1.0, 2.0})
    for (std::size_t n : {1u, 10u, 100u, 1000u})
      EXPECT_LE(std::abs(z_n(kHarmonic, lambda, n)), z_n_bound(kHarmonic, lambda, n)) << lambda << " " << n;
}

TEST(ZNBound, ClosedForm) {
  const double b2 = 1.6449340668482264365;
  const double h100 = c_n(kHarmonic, 100);
  const double e_abs = 2.0 / std::sqrt(kPi);
  const double expected = (2.0 / h100) * (e_abs / 2 + e_abs * b2 / 2 + 2.0 * b2 / 2);
  EXPECT_NEAR(z_n_bound(kHarmonic, 1.0, 100), expected, 1e-12);
}

TEST(ZNBound, ScalesInverselyWithCn) {
  for (std::size_t n : {10u, 100u, 1000u})
    EXPECT_NEAR(z_n_bound(kHarmonic, 1.0, n) * c_n(kHarmonic, n), z_n_bound(kHarmonic, 1.0, 1) * c_n(kHarmonic, 1),
                1e-12);
}

TEST(ZNBound, NoForcedDecayInsideB1) {
  const double limit = z_n_bound(kSquares, 1.0, 100000);
  EXPECT_GT(limit, 0.5 * z_n_bound(kSquares, 1.0, 1));
}

TEST(MonteCarlo, ZeroCouplingIsExact) {
  const auto r = z_mc_oracle(kHarmonic, 0.0, 5, {1000, 1, 1});
  EXPECT_EQ(r.estimate, 1.0);
  EXPECT_EQ(r.std_error, 0.0);
}

TEST(MonteCarlo, SingleModeWithinThreeSigma) {
  const auto r = z_mc_oracle(kHarmonic, 1.0, 1, {200000, 17, 2});
  EXPECT_LT(std::abs(r.estimate - single_mode_reference()), 3 * r.std_error);
}

TEST(MonteCarlo, AgreesWithQuadratureForSmallN) {
  for (std::size_t n : {2u, 4u, 8u}) {
    const auto r = z_mc_oracle(kHarmonic, 1.0, n, {200000, 23 + n, 4});
    EXPECT_LT(std::abs(r.estimate - z_n(kHarmonic, 1.0, n)), 3 * r.std_error) << n;
  }
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto a = z_mc_oracle(kHarmonic, 0.7, 3, {50000, 5, 1});
  const auto b = z_mc_oracle(kHarmonic, 0.7, 3, {50000, 5, 7});
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto c = z_mc_oracle(kHarmonic, 0.7, 3, {50000, 6, 1});
  EXPECT_NE(a.estimate, c.estimate);
}

TEST(ZRenormalized, EqualsTransformOfRenormalizedPhi) {
  for (double theta : {-1.0, 0.0, 0.8}) {
    const double direct = z_renormalized(kHarmonic, kEulerGamma, 1.0, theta);
    const auto t = z_renormalized_transform(kHarmonic, kEulerGamma, 1.0, theta);
    EXPECT_NEAR(t.value.real(), direct, 1e-8) << theta;
    EXPECT_LT(std::abs(t.value.imag()), 1e-12);
  }
}

TEST(ZRenormalized, FrozenHarmonicValue) {
  const double z = z_renormalized(kHarmonic, kEulerGamma, 1.0, 0.0);
  EXPECT_NEAR(z, 0.686373255579818, 1e-9);
  EXPECT_NE(z, 0.0);
}

TEST(ZRenormalized, SmoothInTheta) {
  auto z = [](double theta) { return z_renormalized(kHarmonic, kEulerGamma, 1.0, theta); };
  auto second = [&](double h) { return (z(h) - 2 * z(0.0) + z(-h)) / (h * h); };
  const double d1 = second(0.1);
  const double d2 = second(0.05);
  EXPECT_NEAR(d1, d2, 0.01 * std::abs(d2) + 1e-6);
}

TEST(ZFlow, SmallLambdaLimit) {
  for (double cutoff : {10.0, 1e3}) EXPECT_NEAR(z_flow({kHarmonic, kSharp, cutoff}, 1e-12, 0.0), 1.0, 1e-6);
}

TEST(ZFlow, ApproachesTheRenormalizedLimit) {
  const double k = kappa(kHarmonic, kSharp);
  const double limit = z_renormalized(kHarmonic, k, 1.0, 0.0);
  double prev = 1.0;
  for (double cutoff : {1e3, 1e4, 1e5}) {
    const double dist = std::abs(z_flow({kHarmonic, kSharp, cutoff}, 1.0, 0.0) - limit);
    EXPECT_LT(dist, prev) << cutoff;
    prev = dist;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(ZFlow, WithoutRenormalizationTheFlowDies) {
  double prev = 1.0;
  for (double cutoff : {1e1, 1e2, 1e3}) {
    const double z = std::abs(z_regularized({kHarmonic, kSharp, cutoff}, 1.0));
    EXPECT_LT(z, prev) << cutoff;
    prev = z;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(ZFlow, InsideB1TheRegularizedFlowSurvives) {
  const double z = z_regularized({kSquares, kSharp, 1e4}, 1.0);
  EXPECT_GT(std::abs(z), 0.1);
}
