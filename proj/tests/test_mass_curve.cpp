#include <cmath>

#include <gtest/gtest.h>

#include "liouville/mass_curve.hpp"

using namespace liouville;

TEST(MassCurve, EndpointLimits) {
  for (double alpha : {0.5, 1.5, 2.0, 3.0}) {
    const double lo = detail::beta_value(alpha, -30.0, {});
    const double hi = detail::beta_value(alpha, 30.0, {});
    EXPECT_NEAR(lo, 4.0 * (alpha + 1.0), 0.05) << alpha;
    EXPECT_NEAR(hi, 4.0 * std::max(alpha, 1.0), 0.3) << alpha;
  }
}

TEST(MassCurve, MinimizerInsideExpectedBand) {
  for (double alpha : {1.5, 2.0, 3.0}) {
    const MassCurve curve = sweep(alpha, -30.0, 30.0, 120);
    ASSERT_TRUE(curve.a_star.has_value()) << alpha;
    const Minimizer mn = find_min(curve);
    EXPECT_GT(mn.beta_bar, 2.0 * (alpha + 1.0));
    EXPECT_LT(mn.beta_bar, 4.0 * alpha);
    EXPECT_LT(std::abs(mn.beta_prime), 1e-6);
    // nothing sampled lies below the polished minimum
    for (const auto& s : curve.samples) EXPECT_GE(s.beta, mn.beta_bar - kMassNoise);
  }
}

TEST(MassCurve, KnownMinimumForAlphaTwo) {
  const Minimizer mn = find_min(sweep(2.0, -30.0, 30.0, 80));
  EXPECT_NEAR(mn.beta_bar, 7.35164, 1e-4);
}

TEST(MassCurve, MultiplicityAboveAndBelowThreshold) {
  const double alpha = 2.0;
  const MassCurve curve = sweep(alpha, -30.0, 30.0, 200);
  const double bb = *curve.beta_bar;
  EXPECT_GE(solve_for_mass(alpha, 0.5 * (bb + 4.0 * alpha), curve).size(), 2u);
  EXPECT_EQ(solve_for_mass(alpha, 4.0 * alpha + 1.0, curve).size(), 1u);
  for (double a : solve_for_mass(alpha, 7.8, curve)) EXPECT_NEAR(detail::beta_value(alpha, a, {}), 7.8, 1e-8);
}

TEST(MassCurve, TargetOutsideImageRaisesNoSolution) {
  const MassCurve curve = sweep(2.0, -30.0, 30.0, 60);
  try {
    solve_for_mass(2.0, 5.0, curve);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoSolution);
  }
}

TEST(MassCurve, SubUnitCurvesAreMonotone) {
  for (double alpha : {0.3, 0.7, 1.0}) {
    const MassCurve curve = sweep(alpha, -30.0, 30.0, 120);
    EXPECT_FALSE(curve.a_star.has_value()) << alpha;
    EXPECT_TRUE(is_monotone(curve)) << alpha;
    EXPECT_THROW(find_min(curve), Error);
  }
}

TEST(MassCurve, SweepIndependentOfJobs) {
  const MassCurve one = sweep(1.5, -10.0, 10.0, 24, {}, 1);
  const MassCurve three = sweep(1.5, -10.0, 10.0, 24, {}, 3);
  ASSERT_EQ(one.samples.size(), three.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) EXPECT_EQ(one.samples[i].beta, three.samples[i].beta);
}

TEST(MassCurve, ClassifyRegimes) {
  const SolvabilityReport sup = classify(2.0, {}, SweepOptions{-30.0, 30.0, 120, 1}, 30);
  EXPECT_EQ(sup.regime, Regime::SuperUnit);
  EXPECT_TRUE(sup.lo_closed);
  std::size_t most = 0;
  for (const auto& m : sup.multiplicity) most = std::max(most, m.count);
  EXPECT_GE(most, 2u);
  const SolvabilityReport sub = classify(0.5, {}, SweepOptions{-30.0, 30.0, 80, 1}, 20);
  EXPECT_EQ(sub.regime, Regime::SubUnit);
  for (const auto& m : sub.multiplicity) EXPECT_EQ(m.count, 1u);
  EXPECT_THROW(classify(-1.0), Error);
}

TEST(MassCurve, LiouvilleCurveIsDegenerate) {
  const SolvabilityReport r = classify(0.0, {}, SweepOptions{-10.0, 10.0, 30, 1}, 10);
  EXPECT_TRUE(r.degenerate);
  EXPECT_NEAR(r.beta_lo, 4.0, 1e-6);
}

TEST(MassCurve, AsymptoticValueHasSingleRoot) {
  // beta creeps up to 4 alpha within integration noise at large a
  for (double alpha : {1.5, 2.0}) {
    const MassCurve curve = sweep(alpha, -30.0, 30.0, 200);
    EXPECT_EQ(solve_for_mass(alpha, 4.0 * alpha, curve).size(), 1u) << alpha;
  }
}
