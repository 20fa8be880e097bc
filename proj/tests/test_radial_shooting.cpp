#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "liouville/radial_shooting.hpp"

using namespace liouville;

namespace {

// -(r v')' = r (1 + r^2)^alpha e^v has v = log 4(alpha+2) - (alpha+2) log(1+r^2).
double explicit_profile(double alpha, double r) {
  return std::log(4.0 * (alpha + 2.0)) - (alpha + 2.0) * std::log1p(r * r);
}

// Liouville bubble with v(0) = a.
double liouville_profile(double a, double r) { return a - 2.0 * std::log1p(std::exp(a) * r * r / 8.0); }

IntegrationControl tight() {
  IntegrationControl c;
  c.abs_tol = 1e-13;
  c.rel_tol = 1e-12;
  return c;
}

}  // namespace

TEST(RadialShooting, ExplicitSolutionMassAndTrace) {
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    const WeightSpec w = WeightSpec::mean_field(alpha);
    const double a = std::log(4.0 * (alpha + 2.0));
    const RadialSolution sol = integrate_cauchy(w, a);
    const MassResult m = mass_of(sol);
    EXPECT_TRUE(m.converged);
    EXPECT_NEAR(m.beta, 2.0 * (alpha + 2.0), 1e-6) << "alpha " << alpha;
    double err = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) err = std::max(err, std::abs(sol.v[i] - explicit_profile(alpha, sol.radius(i))));
    EXPECT_LT(err, 1e-6) << "alpha " << alpha;
  }
}

TEST(RadialShooting, LiouvilleBubbleHasMassFour) {
  for (double a : {-5.0, 0.0, 5.0}) {
    const RadialSolution sol = integrate_cauchy(WeightSpec::liouville(), a);
    EXPECT_NEAR(mass_of(sol).beta, 4.0, 1e-6);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) err = std::max(err, std::abs(sol.v[i] - liouville_profile(a, sol.radius(i))));
    EXPECT_LT(err, 1e-6) << "a " << a;
  }
}

TEST(RadialShooting, InterpolatedValuesMatchExplicitProfile) {
  const RadialSolution sol = integrate_cauchy(WeightSpec::liouville(), 1.0);
  for (double r : {1e-3, 0.37, 1.0, 4.2, 55.0})
    EXPECT_NEAR(value_at_radius(sol, r), liouville_profile(1.0, r), 1e-7) << r;
  // M(r) = 4 e^a r^2 / (8 + e^a r^2) for the bubble
  const double ea = std::exp(1.0);
  for (double r : {0.1, 1.0, 10.0}) EXPECT_NEAR(mass_at_radius(sol, r), 4.0 * ea * r * r / (8.0 + ea * r * r), 1e-7);
}

TEST(RadialShooting, DiscreteResidualsAreSmall) {
  for (double alpha : {0.0, 1.5, 3.0}) {
    const RadialSolution sol = integrate_cauchy(WeightSpec::mean_field(alpha), 2.0);
    const ResidualReport r = residuals(sol);
    EXPECT_LT(r.ode, 1e-7);
    EXPECT_LT(r.slope_mass, 1e-8);
    EXPECT_TRUE(r.mass_monotone);
  }
}

TEST(RadialShooting, KelvinInversionOfBubble) {
  const double a = 0.7;
  const RadialSolution sol = integrate_cauchy(WeightSpec::liouville(), a);
  const double b = mass_of(sol).beta;
  const RadialSolution hat = kelvin(sol, b);
  // v(1/r) + 4 log(1/r) is again a bubble, centred at 6 log 2 - a
  EXPECT_NEAR(hat.a, 6.0 * std::log(2.0) - a, 1e-5);
  for (std::size_t i = 0; i < hat.size(); i += 17)
    EXPECT_NEAR(hat.v[i], liouville_profile(6.0 * std::log(2.0) - a, hat.radius(i)), 1e-6);
  EXPECT_NEAR(hat.mass.back(), b, 1e-9);
}

TEST(RadialShooting, DerivativeMatchesCentralDifference) {
  const double h = 1e-4;
  for (double alpha : {0.5, 2.0}) {
    for (double a : {-2.0, 1.0, 3.5}) {
      const WeightSpec w = WeightSpec::mean_field(alpha);
      const double fd = (beta(w, a + h, tight()).beta - beta(w, a - h, tight()).beta) / (2.0 * h);
      const double bp = linearized(w, a).beta_prime;
      EXPECT_LE(std::abs(bp - fd), 1e-4 * std::max(1.0, std::abs(fd))) << alpha << " " << a;
    }
  }
}

TEST(RadialShooting, LiouvilleDerivativeVanishes) {
  // beta is constant in a for the flat weight
  for (double a : {-3.0, 0.0, 4.0}) EXPECT_NEAR(linearized(WeightSpec::liouville(), a).beta_prime, 0.0, 1e-6);
}

TEST(RadialShooting, DerivativeNegativeAtLogSixteen) {
  EXPECT_LT(linearized(WeightSpec::mean_field(2.0), std::log(16.0)).beta_prime, 0.0);
}

TEST(RadialShooting, ZeroStructureIsOrdered) {
  const auto lin = linearized(WeightSpec::mean_field(2.0), 0.0);
  const ZeroStructure zs = zero_structure(lin, lin.sol, IntegrationControl{});
  ASSERT_TRUE(zs.complete());
  EXPECT_TRUE(zs.ordered());
  EXPECT_NO_THROW(zs.require_complete());
  ASSERT_TRUE(zs.inner_mass && zs.outer_mass);
  EXPECT_GT(*zs.inner_mass, 0.0);
  EXPECT_GT(*zs.outer_mass, 0.0);
}

TEST(RadialShooting, IncompleteZeroStructureRaises) {
  ZeroStructure zs;
  zs.first_zero = 1.0;
  try {
    zs.require_complete();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingZero);
  }
}

TEST(RadialShooting, RejectsInvalidWeight) {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of([] { integrate_cauchy(WeightSpec::regularized(-1.0, 1.0, 0.0), 0.0); }), ErrorKind::InvalidWeight);
  EXPECT_EQ(kind_of([] { integrate_cauchy(WeightSpec::regularized(0.0, -1.5, 0.0), 0.0); }), ErrorKind::InvalidWeight);
  EXPECT_EQ(kind_of([] { integrate_cauchy(WeightSpec::liouville(), NAN); }), ErrorKind::InvalidInputs);
  IntegrationControl bad;
  bad.abs_tol = -1.0;
  EXPECT_EQ(kind_of([&] { integrate_cauchy(WeightSpec::liouville(), 0.0, bad); }), ErrorKind::InvalidInputs);
}

TEST(RadialShooting, ShortHorizonRaisesNotConverged) {
  IntegrationControl c;
  c.t_max = 0.5;
  try {
    beta(WeightSpec::liouville(), 0.0, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotConverged);
  }
}

TEST(RadialShooting, RandomBubblesKeepMassFour) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick(-12.0, 12.0);
  for (int i = 0; i < 25; ++i) {
    const double a = pick(rng);
    EXPECT_NEAR(beta(WeightSpec::liouville(), a).beta, 4.0, 1e-6) << a;
  }
}

TEST(RadialShooting, RandomWeightsHaveMonotoneMassInRange) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pa(-0.9, 3.0), pc(-8.0, 8.0);
  for (int i = 0; i < 25; ++i) {
    const double alpha = pa(rng), a = pc(rng);
    const RadialSolution sol = integrate_cauchy(WeightSpec::mean_field(alpha), a);
    const ResidualReport r = residuals(sol);
    EXPECT_TRUE(r.mass_monotone);
    const double b = mass_of(sol).beta;
    // the slope must exceed 2(alpha+1) at infinity for finite mass
    EXPECT_GT(b, 2.0 * (alpha + 1.0) - 1e-6) << alpha << " " << a;
  }
}
