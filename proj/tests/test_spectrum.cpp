#include <cmath>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "renorm/random.hpp"
#include "renorm/spectrum.hpp"

using namespace renorm;

namespace {
constexpr double kZeta2 = 1.6449340668482264365;
constexpr double kZeta3 = 1.2020569031595942854;
}  // namespace

TEST(Spectrum, BetaFollowsTheFamily) {
  EXPECT_DOUBLE_EQ(Spectrum(PowerLaw{1, 1}).beta(7), 7.0);
  EXPECT_DOUBLE_EQ(Spectrum(PowerLaw{2, 1}).beta(1), 2.0);
  const Spectrum e(ExplicitWithTail{{5, 3}, 1, 1});
  EXPECT_DOUBLE_EQ(e.beta(2), 3.0);
  EXPECT_DOUBLE_EQ(e.beta(3), 3.0);
  EXPECT_DOUBLE_EQ(e.beta(4), 4.0);
  EXPECT_THROW(e.beta(0), std::invalid_argument);
}

TEST(Spectrum, RejectsNonPositiveValues) {
  EXPECT_THROW(Spectrum(PowerLaw{0, 1}), ConfigError);
  EXPECT_THROW(Spectrum(PowerLaw{1, -1}), ConfigError);
  EXPECT_THROW(Spectrum(ExplicitWithTail{{1, -2}, 1, 1}), ConfigError);
}

TEST(Spectrum, BSumMatchesZetaValues) {
  EXPECT_NEAR(b_sum(Spectrum(PowerLaw{1, 1}), 2, 1e-10), kZeta2, 1e-10);
  EXPECT_NEAR(b_sum(Spectrum(PowerLaw{2, 1}), 2, 1e-10), kZeta2 / 4, 1e-10);
  EXPECT_NEAR(b_sum(Spectrum(PowerLaw{1, 1}), 3, 1e-12), kZeta3, 1e-12);
  EXPECT_NEAR(b_sum(Spectrum(PowerLaw{1, 2}), 1, 1e-12), kZeta2, 1e-12);
}

TEST(Spectrum, BSumOfHeadPlusTail) {
  // 1/25 + 1/9 + Σ_{j≥3} 1/j² = 1/25 + 1/9 + ζ(2) − 1 − 1/4
  const Spectrum e(ExplicitWithTail{{5, 3}, 1, 1});
  EXPECT_NEAR(b_sum(e, 2, 1e-12), 1.0 / 25 + 1.0 / 9 + kZeta2 - 1.25, 1e-12);
}

TEST(Spectrum, DivergentSumsAreRejected) {
  EXPECT_THROW(b_sum(Spectrum(PowerLaw{1, 1}), 1), DivergentSum);
  EXPECT_THROW(b_sum(Spectrum(PowerLaw{1, 0.5}), 2), DivergentSum);
}

TEST(Spectrum, TailBracketContainsTheTrueTail) {
  // Σ_{j>n} 1/j² = ζ(2) − H_n^(2)
  for (std::size_t n : {1u, 10u, 1000u}) {
    double head = 0.0;
    for (std::size_t j = n; j >= 1; --j) head += 1.0 / (static_cast<double>(j) * j);
    const Interval t = power_tail_bracket(1, 1, 2, n);
    EXPECT_LE(t.lo, kZeta2 - head + 1e-15) << n;
    EXPECT_GE(t.hi, kZeta2 - head - 1e-15) << n;
  }
}

TEST(Spectrum, Mu) {
  EXPECT_DOUBLE_EQ(mu(Spectrum(PowerLaw{1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(mu(Spectrum(ExplicitWithTail{{5, 3}, 1, 1})), 3.0);
  EXPECT_DOUBLE_EQ(mu(Spectrum(PowerLaw{0.5, 2})), 0.5);
  EXPECT_DOUBLE_EQ(mu(Spectrum(ExplicitWithTail{{5, 3}, 10, 1})), 3.0);
  EXPECT_DOUBLE_EQ(mu(Spectrum(ExplicitWithTail{{5, 30}, 1, 1})), 3.0);
}

TEST(Spectrum, ClassMembership) {
  EXPECT_FALSE(in_class(Spectrum(PowerLaw{1, 1}), 1));
  EXPECT_TRUE(in_class(Spectrum(PowerLaw{1, 1}), 2));
  EXPECT_TRUE(in_class(Spectrum(PowerLaw{1, 2.0 / 3}), 2));
  EXPECT_TRUE(in_class(Spectrum(PowerLaw{1, 3}), 1));
}

TEST(SpectrumProperty, ClassesAreNested) {
  const CounterRng rng(1);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Spectrum s(PowerLaw{0.1 + 3 * rng.uniform(2 * i), 0.05 + 2 * rng.uniform(2 * i + 1)});
    for (unsigned k = 1; k < 10; ++k)
      if (s.in_class(k)) {
        EXPECT_TRUE(s.in_class(k + 1));
      }
  }
}

TEST(SpectrumProperty, TailBoundIsSelfConsistent) {
  const CounterRng rng(2);
  for (std::uint64_t i = 0; i < 30; ++i) {
    const double c = 0.2 + 3 * rng.uniform(3 * i);
    const double p = 0.6 + 1.5 * rng.uniform(3 * i + 1);
    std::vector<double> head(1 + rng.bits(3 * i + 2) % 5);
    for (std::size_t h = 0; h < head.size(); ++h) head[h] = 0.5 + rng.uniform(1000 + 10 * i + h);
    const Spectrum s(ExplicitWithTail{head, c, p});
    const double tol = 1e-9;
    EXPECT_LE(std::abs(b_sum(s, 2, tol) - b_sum(s, 2, tol / 10)), tol) << "c=" << c << " p=" << p;
  }
}

TEST(SpectrumProperty, ScalingLaw) {
  const CounterRng rng(3);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const double c = 0.3 + 4 * rng.uniform(2 * i);
    const double p = 0.7 + rng.uniform(2 * i + 1);
    const double tol = 1e-10;
    for (unsigned k = 2; k <= 4; ++k) {
      const double scaled = b_sum(Spectrum(PowerLaw{c, p}), k, tol);
      const double unit = b_sum(Spectrum(PowerLaw{1, p}), k, tol);
      EXPECT_NEAR(scaled, std::pow(c, -static_cast<double>(k)) * unit, 2 * tol + 1e-15 * unit);
    }
  }
}

TEST(Spectrum, JsonRoundTrip) {
  const Spectrum a(ExplicitWithTail{{5, 3}, 1.5, 0.75});
  const nlohmann::json j = a;
  EXPECT_EQ(j.at("family"), "explicit_tail");
  EXPECT_EQ(j.get<Spectrum>(), a);
  const auto p = nlohmann::json::parse(R"({"family":"power_law","c":2.0,"p":1.0})").get<Spectrum>();
  EXPECT_EQ(p, Spectrum(PowerLaw{2, 1}));
  EXPECT_THROW(nlohmann::json::parse(R"({"family":"weyl"})").get<Spectrum>(), ConfigError);
  EXPECT_THROW(nlohmann::json::parse(R"({"family":"power_law","c":1})").get<Spectrum>(), ConfigError);
}
