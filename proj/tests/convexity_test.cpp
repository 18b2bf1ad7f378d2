#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hcvx/convexity.hpp"

namespace hcvx {
namespace {

const ScalarFunction kNegLog = ScalarFunction::of(Family::NegLogTarget);
const ScalarFunction kCubic = ScalarFunction::of(Family::CubicTarget);
const ScalarFunction kIdentity = ScalarFunction::identity_weight();

TEST(Gap, NegLogExpWeightMatchesOracle) {
  // 60-digit mpmath value, tests/oracles/compute_oracles.py
  const double g = gap(kNegLog, ScalarFunction::exp_weight(2.0, 2.16), 0.8, 0.64, 0.5);
  EXPECT_NEAR(g, 0.4673903537429933, 1e-14);
}

TEST(Gap, IdentityWeightAtLambdaZeroVanishes) {
  for (auto fam : {Family::CubicTarget, Family::ExpTarget, Family::AbsTarget}) {
    const auto f = ScalarFunction::of(fam, Interval::closed(0, 2));
    EXPECT_EQ(gap(f, kIdentity, 1.7, 0.3, 0.0), 0.0);
  }
}

TEST(Gap, CubicIdentity) {
  EXPECT_DOUBLE_EQ(gap(kCubic, kIdentity, 2.0, 1.0, 0.5), 0.375);
}

TEST(Gap, RejectsLambdaOutsideUnitInterval) {
  EXPECT_THROW(gap(kCubic, kIdentity, 2.0, 1.0, 1.5), DomainError);
}

TEST(Gap, ExpWeightSymmetricInLambdaWhenUEqualsV) {
  const auto h = ScalarFunction::exp_weight(1.3, 2.2);
  const auto f = ScalarFunction::of(Family::SoftplusTarget);
  for (int i = 0; i <= 200; ++i) {
    const double lam = i / 200.0;
    ASSERT_NEAR(gap(f, h, 0.9, 0.9, lam), gap(f, h, 0.9, 0.9, 1.0 - lam), 1e-14);
  }
}

TEST(Certify, ExampleFixtureIsConditionalConvexAtTwo) {
  const auto cert = certify(kCubic, ScalarFunction::of(Family::PiecewiseGate),
                            kIdentity, 2.0);
  EXPECT_EQ(cert.verdict, Verdict::Certified);
  EXPECT_GE(cert.min_value, -kViolationTolerance);
  EXPECT_EQ(cert.gate.interval, Interval::closed(1.0, 2.0));
}

TEST(Certify, CosineGateAtThreeHalves) {
  const auto cert = certify(kCubic, ScalarFunction::of(Family::CosineGate),
                            kIdentity, 1.5);
  EXPECT_EQ(cert.verdict, Verdict::Certified);
}

TEST(Certify, WholeIntervalGateIsViolated) {
  // gap(u=0, lambda) = lambda (u-1)^3 (1 - lambda^2) at v = 1; minimum
  // -2/(3 sqrt 3) at lambda = 1/sqrt 3.
  const auto cert = certify(kCubic, ScalarFunction::constant_gate(0.0), kIdentity, 1.0);
  EXPECT_EQ(cert.verdict, Verdict::Violated);
  EXPECT_NEAR(cert.min_value, -2.0 / (3.0 * std::sqrt(3.0)), 1e-9);
  EXPECT_NEAR(cert.arg_u, 0.0, 1e-6);
  EXPECT_NEAR(cert.arg_lambda, 1.0 / std::sqrt(3.0), 1e-4);
  ASSERT_TRUE(cert.confirmed_min.has_value());
  EXPECT_NEAR(std::stod(*cert.confirmed_min), cert.min_value, 1e-12);
  // (0, 0.5) is itself a violation of -0.375.
  EXPECT_DOUBLE_EQ(gap(kCubic, kIdentity, 1.0, 0.0, 0.5), -0.375);
}

TEST(Certify, LemmaTwoInstanceMatchesBruteForceGrid) {
  const auto f = kNegLog;
  const auto g = ScalarFunction::power_gate(2.0);
  const auto h = ScalarFunction::exp_weight(2.0, 2.16);
  const auto cert = certify(f, g, h, 0.8);
  EXPECT_EQ(cert.verdict, Verdict::Certified);
  // Independent brute force on a 401 x 401 grid.
  double brute = INFINITY;
  for (int i = 0; i <= 400; ++i) {
    const double u = 0.64 + (0.8 - 0.64) * i / 400.0;
    for (int j = 0; j <= 400; ++j) {
      const double lam = j / 400.0;
      const double val = h(lam) * f(u) + h(1 - lam) * f(0.8) -
                         f(lam * u + (1 - lam) * 0.8);
      brute = std::min(brute, val);
    }
  }
  EXPECT_GE(brute, 0.0);
  EXPECT_LE(cert.min_value, brute + 1e-12);
  EXPECT_GE(cert.min_value, 0.0);
}

TEST(Certify, DegenerateGate) {
  const auto cert = certify(ScalarFunction::of(Family::LogitTarget),
                            ScalarFunction::kyfan_gate(2.0),
                            ScalarFunction::exp_weight(2.0, 2.5), 0.5);
  EXPECT_EQ(cert.verdict, Verdict::Degenerate);
  EXPECT_EQ(cert.arg_u, 0.5);
}

TEST(Certify, ErrorPaths) {
  EXPECT_THROW(certify(kCubic, ScalarFunction::constant_gate(3.0), kIdentity, 1.0),
               InfeasibleGate);
  CertifyOptions tiny;
  tiny.grid = {1, 8};
  EXPECT_THROW(certify(kCubic, ScalarFunction::constant_gate(0.0), kIdentity, 1.0, tiny),
               InvalidArgument);
  EXPECT_THROW(certify(kCubic, ScalarFunction::constant_gate(0.0), kIdentity, 3.0),
               DomainError);
}

TEST(Certify, RefinementIsMonotone) {
  const auto f = ScalarFunction::of(Family::SoftplusTarget);
  const auto g = ScalarFunction::chrystal_gate(1.0, 1.7);
  const auto h = ScalarFunction::exp_weight(1.0, 1.7);
  double previous = INFINITY;
  for (std::size_t n : {8, 16, 32, 64, 128}) {
    CertifyOptions opt;
    opt.grid = {n, n};
    const auto cert = certify(f, g, h, 1.3, opt);
    EXPECT_LE(cert.min_value, cert.grid_min_value);
    EXPECT_LE(cert.min_value, previous + 1e-12);
    previous = std::min(previous, cert.min_value);
  }
}

TEST(Certify, ConvexFixturesCertifyUnderIdentityWeight) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ScalarFunction fixtures[] = {
      ScalarFunction::power_target(2.0),
      ScalarFunction::of(Family::ExpTarget, Interval::closed(-3, 3)),
      ScalarFunction::of(Family::AbsTarget, Interval::closed(-3, 3)),
  };
  CertifyOptions opt;
  opt.grid = {48, 48};
  for (const auto& f : fixtures) {
    for (int k = 0; k < 10; ++k) {
      const auto& dom = f.domain();
      const double lo = std::isfinite(dom.lo()) ? dom.lo() : -3.0;
      const double v = lo + 0.5 + 2.4 * unit(rng);
      const double gv = lo + (v - lo) * unit(rng);
      const auto cert = certify(f, ScalarFunction::constant_gate(gv), kIdentity, v, opt);
      ASSERT_NE(cert.verdict, Verdict::Violated) << f.name() << " v=" << v;
    }
  }
}

TEST(Jcoeff, IdentityWeightIsOne) {
  const auto jc = jcoeff(kIdentity, Interval::open(0, 1));
  EXPECT_EQ(jc.value, 1.0);
  EXPECT_FALSE(jc.boundary_limit);
  EXPECT_TRUE(jc.attained_at().has_value());
}

TEST(Jcoeff, ExpWeightIsAlphaOverBeta) {
  const auto jc = jcoeff(ScalarFunction::exp_weight(2.0, 2.16), Interval::open(0, 1));
  EXPECT_NEAR(jc.value, 2.0 / 2.16, 1e-8);
  EXPECT_GE(jc.value, 2.0 / 2.16);
  EXPECT_TRUE(jc.boundary_limit);
  EXPECT_GT(jc.argmin, 0.999);
  EXPECT_FALSE(jc.attained_at().has_value());
}

TEST(Jcoeff, SquareWeightTendsToZeroAtOrigin) {
  const auto jc = jcoeff(ScalarFunction::power_weight(2.0), Interval::open(0, 1));
  EXPECT_LE(jc.value, 1e-8);
  EXPECT_GE(jc.value, 0.0);
  EXPECT_TRUE(jc.boundary_limit);
  EXPECT_LT(jc.argmin, 1e-8);
}

TEST(Jcoeff, InteriorMinimumIsRefined) {
  // e^t / t on [0.2, 3] is minimal at t = 1 with value e.
  const auto h = ScalarFunction::of(Family::ExpTarget);
  const auto jc = jcoeff(h, Interval::closed(0.2, 3.0), 64);
  EXPECT_NEAR(jc.value, std::exp(1.0), 1e-12);
  EXPECT_NEAR(jc.argmin, 1.0, 1e-5);
  EXPECT_FALSE(jc.boundary_limit);
}

TEST(Jcoeff, ClosedUnitIntervalConvention) {
  // On [0, 1] the quotient blows up to +inf at 0, so the infimum is unchanged.
  const auto h = ScalarFunction::exp_weight(1.5, 2.0);
  const auto open = jcoeff(h, Interval::open(0, 1));
  const auto closed = jcoeff(h, Interval::closed(0, 1));
  EXPECT_NEAR(closed.value, 0.75, 1e-12);
  EXPECT_NEAR(open.value, closed.value, 1e-8);
}

TEST(Jcoeff, SingularQuotient) {
  const auto h = ScalarFunction::of(Family::ExpTarget);
  EXPECT_THROW(jcoeff(h, Interval::closed(-1, 1)), SingularQuotient);
  EXPECT_THROW(jcoeff(h, Interval::closed(-1, 0)), SingularQuotient);
  const auto neg = ScalarFunction(Family::AffineTarget, {{"c0", -1.0}, {"c1", 1.0}});
  EXPECT_THROW(jcoeff(neg, Interval::closed(0, 1)), SingularQuotient);
  EXPECT_THROW(jcoeff(h, Interval::closed(1, Interval::kInf)), DomainError);
  EXPECT_THROW(jcoeff(ScalarFunction::exp_weight(1, 2), Interval::closed(0.5, 2)),
               DomainError);
}

TEST(Jcoeff, BelowEveryRandomQuotient) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ScalarFunction weights[] = {
      ScalarFunction::exp_weight(1.2, 2.0), ScalarFunction::power_weight(0.5),
      ScalarFunction::power_weight(2.0), kIdentity};
  for (const auto& h : weights) {
    const auto jc = jcoeff(h, Interval::open(0, 1));
    for (int k = 0; k < 10000; ++k) {
      const double t = unit(rng);
      if (t <= 0.0) continue;
      ASSERT_LE(jc.value, h(t) / t + 1e-9) << h.name() << " t=" << t;
    }
  }
}

}  // namespace
}  // namespace hcvx
