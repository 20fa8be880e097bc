#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "liouville/vortex_configuration.hpp"

using namespace liouville;

namespace {

// Force balance at each point, written out from scratch in conjugate form:
// alpha1 (p - 1)/|p - 1|^2 + alpha2 (p + 1)/|p + 1|^2 - 2 sum (p_i - p_j)/|p_i - p_j|^2.
double force_balance(double a1, double a2, const std::vector<Complex>& p) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Complex f = a1 * (p[i] - 1.0) / std::norm(p[i] - 1.0) + a2 * (p[i] + 1.0) / std::norm(p[i] + 1.0);
    for (std::size_t j = 0; j < p.size(); ++j)
      if (j != i) f -= 2.0 * (p[i] - p[j]) / std::norm(p[i] - p[j]);
    worst = std::max(worst, std::abs(f));
  }
  return worst;
}

}  // namespace

TEST(Vortex, SinglePointBetweenEqualVortices) {
  const auto cfg = find_points({1, 1, 1});
  ASSERT_EQ(cfg.points.size(), 1u);
  EXPECT_LT(std::abs(cfg.points[0]), 1e-14);
}

TEST(Vortex, SinglePointShiftsTowardsWeakerVortex) {
  const auto cfg = find_points({2, 1, 1});
  ASSERT_EQ(cfg.points.size(), 1u);
  EXPECT_NEAR(cfg.points[0].real(), -1.0 / 3.0, 1e-14);
  EXPECT_NEAR(cfg.points[0].imag(), 0.0, 1e-14);
}

TEST(Vortex, PairOnImaginaryAxis) {
  const auto cfg = find_points({2, 2, 2});
  const std::vector<Complex> want{{0.0, -1.0 / std::sqrt(3.0)}, {0.0, 1.0 / std::sqrt(3.0)}};
  EXPECT_LT(set_distance(cfg.points, want), 1e-14);
}

TEST(Vortex, TripleIncludesOrigin) {
  const auto cfg = find_points({3, 3, 3});
  const std::vector<Complex> want{{0.0, -1.0}, {0.0, 0.0}, {0.0, 1.0}};
  EXPECT_LT(set_distance(cfg.points, want), 1e-12);
}

TEST(Vortex, AllAdmissibleConfigurationsBalance) {
  for (const auto& p : admissible_params(6)) {
    const auto cfg = find_points(p);
    EXPECT_EQ(static_cast<int>(cfg.points.size()), p.m);
    EXPECT_LE(cfg.residual, 1e-10);
    EXPECT_LE(force_balance(p.alpha1, p.alpha2, cfg.points), 1e-10) << p.alpha1 << " " << p.alpha2 << " " << p.m;
  }
}

TEST(Vortex, ExpandedPolynomialMatchesRootForm) {
  for (const auto& p : admissible_params(5)) {
    const auto sym = symmetric_functions(p);
    const auto a = characteristic_polynomial(sym, p);
    const auto b = expanded_coefficients(sym, p);
    // the expanded form omits the leading coefficient
    ASSERT_EQ(a.size(), b.size() + 1);
    for (std::size_t k = 0; k < b.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9 * std::max(1.0, std::abs(a[k])));
  }
}

TEST(Vortex, SymmetricVorticesGiveSymmetricSets) {
  // equal multiplicities: the set is invariant under z -> -z and conjugation
  for (int a = 1; a <= 5; ++a)
    for (int m = 1; m <= a; ++m) {
      const auto pts = find_points({double(a), double(a), m}).points;
      std::vector<Complex> neg, conj;
      for (auto z : pts) neg.push_back(-z), conj.push_back(std::conj(z));
      EXPECT_LT(set_distance(pts, neg), 1e-10);
      EXPECT_LT(set_distance(pts, conj), 1e-10);
    }
}

TEST(Vortex, NewtonOracleAgreesFromRandomStarts) {
  std::mt19937_64 rng(42);
  for (const auto& p : admissible_params(4)) {
    const auto cfg = find_points(p);
    for (int s = 0; s < 5; ++s) {
      const auto got = newton_oracle(p, random_start(p.m, rng));
      EXPECT_LT(set_distance(got, cfg.points), 1e-7);
    }
  }
}

TEST(Vortex, RejectsInadmissibleParameters) {
  auto kind = [](VortexParams p) {
    try {
      find_points(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind({1, 3, 1}), ErrorKind::InvalidParams);
  EXPECT_EQ(kind({2, 2, 3}), ErrorKind::InvalidParams);
  EXPECT_EQ(kind({2, 2, 0}), ErrorKind::InvalidParams);
  EXPECT_EQ(kind({1.5, 2, 1}), ErrorKind::InvalidParams);
  EXPECT_NO_THROW(find_points({1.5, 2, 1, true}));
}

TEST(Vortex, NewtonOracleRejectsWrongStartSize) {
  EXPECT_THROW(newton_oracle({2, 2, 2}, {Complex(0.3, 0.1)}), Error);
}

TEST(Vortex, SetDistanceAndOrdering) {
  std::vector<Complex> x{{1, 2}, {-1, 0}, {1, -2}};
  sort_points(x);
  EXPECT_EQ(x[0], Complex(-1, 0));
  EXPECT_EQ(x[1], Complex(1, -2));
  EXPECT_DOUBLE_EQ(set_distance(x, {{-1, 0}, {1, 2}, {1, -1}}), 1.0);
}
