#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "renorm/numeric.hpp"
#include "renorm/parallel.hpp"
#include "renorm/quadrature.hpp"
#include "renorm/random.hpp"

using namespace renorm;

TEST(CompensatedSum, RecoversCancelledLowOrderBits) {
  CompensatedSum<> acc;
  acc += 1.0;
  const double tiny = std::ldexp(1.0, -60);
  for (int i = 0; i < 1000; ++i) acc += tiny;
  acc += -1.0;
  EXPECT_EQ(acc.value(), 1000 * tiny);
}

TEST(Interval, ScalingFlipsForNegativeFactor) {
  const Interval a{1.0, 3.0};
  const Interval b = -2.0 * a;
  EXPECT_DOUBLE_EQ(b.lo, -6.0);
  EXPECT_DOUBLE_EQ(b.hi, -2.0);
  EXPECT_DOUBLE_EQ(a.mid(), 2.0);
  EXPECT_DOUBLE_EQ(a.radius(), 1.0);
  EXPECT_TRUE(a.contains(3.0));
  EXPECT_FALSE(a.contains(3.0000001));
}

TEST(Quadrature, PolynomialsAreExactOnOnePanel) {
  quadrature::Options opt;
  const auto r = quadrature::integrate([](double x) { return std::pow(x, 13) - 3 * x * x; }, 0.0, 1.0, opt);
  EXPECT_NEAR(r.value, 1.0 / 14 - 1.0, 1e-15);
  EXPECT_EQ(r.nodes, 15u);
}

TEST(Quadrature, GaussianIntegral) {
  quadrature::Options opt;
  const auto r = quadrature::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0, opt);
  EXPECT_NEAR(r.value, std::sqrt(kPi), 1e-13);
  EXPECT_LE(r.error, std::max(opt.abs_tol, opt.rel_tol * r.value));
}

TEST(Quadrature, ComplexOscillatoryIntegrand) {
  quadrature::Options opt;
  opt.initial_panels = 16;
  const double w = 40.0;
  const auto r = quadrature::integrate([&](double x) { return std::exp(std::complex<double>(0.0, w * x)); }, 0.0, 1.0,
                                       opt);
  const std::complex<double> exact = (std::exp(std::complex<double>(0.0, w)) - 1.0) / std::complex<double>(0.0, w);
  EXPECT_NEAR(std::abs(r.value - exact), 0.0, 1e-13);
}

TEST(Quadrature, EndpointSingularityRefinesAdaptively) {
  quadrature::Options opt;
  opt.abs_tol = 1e-10;
  const auto r = quadrature::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
  EXPECT_GT(r.nodes, 15u);
}

TEST(Quadrature, BudgetExhaustionThrows) {
  quadrature::Options opt;
  opt.max_nodes = 45;
  EXPECT_THROW(quadrature::integrate([](double x) { return std::sin(500.0 * x); }, 0.0, 1.0, opt), QuadratureFailure);
}

TEST(Quadrature, InitialPartitionBeyondBudgetThrows) {
  quadrature::Options opt;
  opt.max_nodes = 100;
  opt.initial_panels = 10;
  EXPECT_THROW(quadrature::integrate([](double) { return 1.0; }, 0.0, 1.0, opt), QuadratureFailure);
}

TEST(CounterRng, IsAPureFunctionOfSeedAndCounter) {
  const CounterRng a(7);
  const CounterRng b(7);
  const CounterRng c(8);
  for (std::uint64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(a.bits(i), b.bits(i));
    EXPECT_NE(a.bits(i), c.bits(i));
    const double u = a.uniform(i);
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(CounterRng, NormalMomentsLookStandard) {
  const CounterRng rng(99);
  const int n = 200000;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(static_cast<std::uint64_t>(i));
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  m2 /= n;
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(ParallelMap, KeepsIndexOrderAndRethrows) {
  const auto out = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                              return 0;
                            }),
               std::runtime_error);
}
