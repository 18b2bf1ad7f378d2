#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hcvx/functions.hpp"
#include "hcvx/gate.hpp"

namespace hcvx {
namespace {

TEST(Interval, MembershipHonorsOpenness) {
  const auto I = Interval::left_open(0.0, 1.0);
  EXPECT_FALSE(I.contains(0.0));
  EXPECT_TRUE(I.contains(1.0));
  EXPECT_TRUE(I.contains(1e-300));
  EXPECT_FALSE(Interval::open(0, 1).contains(1.0));
  EXPECT_TRUE(Interval::closed(0, 1).contains(0.0));
  EXPECT_TRUE(Interval::point(2.0).contains(2.0));
}

TEST(Interval, RejectsInvalidEndpoints) {
  EXPECT_THROW(Interval::closed(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(Interval(1.0, 1.0, true, false), InvalidArgument);
  EXPECT_THROW(Interval::closed(NAN, 1.0), InvalidArgument);
}

TEST(Interval, IntersectKeepsTighterOpenness) {
  const auto I = Interval::left_open(0, 1).intersect(Interval::closed(0, 0.5));
  EXPECT_EQ(I, Interval::left_open(0, 0.5));
  EXPECT_TRUE(Interval::closed(0, 2).includes(Interval::open(0, 2)));
  EXPECT_FALSE(Interval::open(0, 2).includes(Interval::closed(0, 2)));
  EXPECT_THROW(Interval::closed(0, 1).intersect(Interval::closed(2, 3)),
               InvalidArgument);
}

TEST(Evaluate, SpecExamples) {
  EXPECT_EQ(ScalarFunction::of(Family::CubicTarget).evaluate(1.0), 0.0);
  EXPECT_NEAR(ScalarFunction::exp_weight(2.0, 2.16)(0.0), 2.0 / 2.16, 1e-15);
  EXPECT_DOUBLE_EQ(ScalarFunction::kyfan_gate(2.0)(0.5), 0.5);
}

TEST(Evaluate, ClosedForms) {
  EXPECT_NEAR(ScalarFunction::of(Family::LogitTarget)(0.25), std::log(3.0), 1e-15);
  EXPECT_NEAR(ScalarFunction::of(Family::NegLogTarget)(0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(ScalarFunction::of(Family::SoftplusTarget)(1.0),
              std::log(1.0 + std::exp(1.0)), 1e-15);
  EXPECT_NEAR(ScalarFunction::power_target(3.0)(2.0), 8.0, 1e-14);
  EXPECT_NEAR(ScalarFunction::of(Family::ExpDecayTarget)(1.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(ScalarFunction::root_gate(1.0, 1.5, 2.0)(4.0), 4.0 * std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(ScalarFunction::of(Family::CosineGate)(1.5), 1.0, 1e-15);
  EXPECT_EQ(ScalarFunction::of(Family::PiecewiseGate)(2.0), 1.0);
  EXPECT_EQ(ScalarFunction::of(Family::PiecewiseGate)(1.0), 2.0);
  EXPECT_NEAR(ScalarFunction::chrystal_gate(2.0, 2.16)(1.0), -2.200224430264693,
              1e-13);
}

TEST(Evaluate, HighPrecisionAgreesWithDouble) {
  const auto f = ScalarFunction::chrystal_gate(2.0, 3.0);
  const HighPrecision hp = f.evaluate(HighPrecision(0.7));
  EXPECT_NEAR(static_cast<double>(hp), f(0.7), 1e-14);
  const auto w = ScalarFunction::exp_weight(1.5, 2.0);
  EXPECT_NEAR(static_cast<double>(w.evaluate(HighPrecision(0.3))), w(0.3), 1e-15);
}

TEST(Evaluate, DomainErrors) {
  EXPECT_THROW(ScalarFunction::of(Family::LogitTarget)(0.0), DomainError);
  EXPECT_THROW(ScalarFunction::of(Family::LogitTarget)(0.6), DomainError);
  EXPECT_THROW(ScalarFunction::of(Family::NegLogTarget)(-1.0), DomainError);
  EXPECT_THROW(ScalarFunction::of(Family::CubicTarget)(2.5), DomainError);
}

TEST(Construct, ValidatesParametersAndDomain) {
  EXPECT_THROW(ScalarFunction::exp_weight(2.0, 1.0), InvalidArgument);
  EXPECT_THROW(ScalarFunction::exp_weight(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(ScalarFunction::power_weight(-1.0), InvalidArgument);
  EXPECT_THROW(ScalarFunction(Family::PowerGate, {}), InvalidArgument);
  EXPECT_THROW(ScalarFunction(Family::PowerGate, {{"alpha", 2}, {"beta", 3}}),
               InvalidArgument);
  // -ln t is singular at 0, so a domain containing 0 is refused.
  EXPECT_THROW(ScalarFunction::of(Family::NegLogTarget, Interval::closed(0, 1)),
               InvalidArgument);
  EXPECT_NO_THROW(ScalarFunction::of(Family::NegLogTarget, Interval::closed(0.1, 5)));
  EXPECT_THROW(ScalarFunction::of(Family::LogitTarget, Interval::closed(0.1, 1)),
               InvalidArgument);
}

TEST(Construct, FamilyNamesRoundTrip) {
  for (const auto& info : detail::family_table()) {
    ASSERT_EQ(parse_family(info.name), info.family);
  }
  EXPECT_FALSE(parse_family("NoSuchFamily"));
}

TEST(Properties, ExpWeightIsSymmetric) {
  const auto h = ScalarFunction::exp_weight(2.0, 2.9);
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    ASSERT_NEAR(h(t), h(1.0 - t), 1e-14) << t;
  }
}

TEST(Properties, KyFanGateMapsIntoHalfAndBelowIdentity) {
  for (double alpha : {1.01, 1.5, 2.0, 3.0, 7.0}) {
    const auto g = ScalarFunction::kyfan_gate(alpha);
    for (int i = 1; i <= 500; ++i) {
      const double t = 0.5 * i / 500.0;
      const double gt = g(t);
      ASSERT_GT(gt, 0.0);
      ASSERT_LE(gt, 0.5);
      ASSERT_LE(gt, t) << "alpha=" << alpha << " t=" << t;
    }
  }
}

TEST(Properties, RootGateBelowIdentityWhenBetaAtMostTwiceAlpha) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double alpha = 0.01 + 5.0 * unit(rng);
    const double beta = alpha * (1.0 + unit(rng));
    const double p = 1.0 + 5.0 * unit(rng);
    const double v = 100.0 * unit(rng);
    ASSERT_LE(ScalarFunction::root_gate(alpha, beta, p)(v), v);
  }
}

TEST(Properties, EvaluateIsPure) {
  const auto f = ScalarFunction::of(Family::SoftplusTarget);
  const double a = f(0.37);
  const double b = f(0.37);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(GateInterval, PowerGate) {
  const auto gi = gate_interval(ScalarFunction::power_gate(2.0), 0.8,
                                Interval::left_open(0.0, 1.0));
  EXPECT_NEAR(gi.interval.lo(), 0.64, 1e-15);
  EXPECT_EQ(gi.interval.hi(), 0.8);
  EXPECT_FALSE(gi.degenerate);
  EXPECT_FALSE(gi.clamped);
}

TEST(GateInterval, PiecewiseGateAtTwo) {
  const auto gi = gate_interval(ScalarFunction::of(Family::PiecewiseGate), 2.0,
                                Interval::closed(0.0, 2.0));
  EXPECT_EQ(gi.interval, Interval::closed(1.0, 2.0));
}

TEST(GateInterval, ChrystalGateClampsToAmbient) {
  const double inf = Interval::kInf;
  const auto gi = gate_interval(ScalarFunction::chrystal_gate(2.0, 2.16), 1.0,
                                Interval::open(0.0, inf));
  EXPECT_NEAR(gi.gate_value, -2.200224430264693, 1e-13);
  EXPECT_TRUE(gi.clamped);
  EXPECT_EQ(gi.interval.lo(), 1e-9);
  EXPECT_EQ(gi.interval.hi(), 1.0);
}

TEST(GateInterval, ChrystalGateAtEqualParametersIsMinusInfinity) {
  const auto g = ScalarFunction::chrystal_gate(1.5, 1.5);
  EXPECT_TRUE(std::isinf(g(0.4)) && g(0.4) < 0);
  const auto gi = gate_interval(g, 0.4, Interval::open(0.0, Interval::kInf), 1e-6);
  EXPECT_TRUE(gi.clamped);
  EXPECT_EQ(gi.interval.lo(), 1e-6);
}

TEST(GateInterval, DegenerateAndInfeasible) {
  const auto deg = gate_interval(ScalarFunction::kyfan_gate(2.0), 0.5,
                                 Interval::left_open(0, 0.5));
  EXPECT_TRUE(deg.degenerate);
  EXPECT_THROW(gate_interval(ScalarFunction::constant_gate(3.0), 2.0,
                             Interval::closed(0, 2)),
               InfeasibleGate);
  EXPECT_THROW(gate_interval(ScalarFunction::constant_gate(0.0), 3.0,
                             Interval::closed(0, 2)),
               DomainError);
}

}  // namespace
}  // namespace hcvx
