#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "liouville/errors.hpp"
#include "liouville/parallel.hpp"
#include "liouville/units.hpp"
#include "liouville/weight.hpp"

using namespace liouville;

TEST(Units, RoundTrips) {
  EXPECT_DOUBLE_EQ(units::beta_from_rho(8.0 * std::numbers::pi), 4.0);
  EXPECT_DOUBLE_EQ(units::rho_from_beta(units::beta_from_rho(12.6 * std::numbers::pi)), 12.6 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(units::quanta_from_rho(16.0 * std::numbers::pi), 2.0);
  EXPECT_DOUBLE_EQ(units::rho_from_sigma(units::sigma_from_rho(3.0)), 3.0);
}

TEST(Errors, ExitCodesSplitInputsFromNumerics) {
  for (auto k : {ErrorKind::InvalidWeight, ErrorKind::InvalidParams, ErrorKind::InvalidInputs, ErrorKind::EmptyWindow})
    EXPECT_EQ(exit_code(k), 1) << to_string(k);
  for (auto k : {ErrorKind::NotConverged, ErrorKind::NoSolution, ErrorKind::NewtonDiverged, ErrorKind::BranchLost,
                 ErrorKind::Io, ErrorKind::ResidualTooLarge})
    EXPECT_EQ(exit_code(k), 2) << to_string(k);
}

TEST(Errors, MessageCarriesKind) {
  try {
    fail(ErrorKind::NoBracket, "nothing");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoBracket);
    EXPECT_EQ(std::string(e.what()), "NoBracket: nothing");
  }
}

TEST(Weight, ExponentsAndValues) {
  const WeightSpec w = WeightSpec::regularized(0.5, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(w.origin_exponent(), 0.0);
  EXPECT_DOUBLE_EQ(w.growth(), 3.0);
  EXPECT_NEAR(w.value(0.7), std::pow(0.5 + 0.49, 2.0) * (1.0 + 0.49), 1e-14);
  const WeightSpec s = WeightSpec::regularized(0.0, 1.5, 0.0);
  EXPECT_DOUBLE_EQ(s.origin_exponent(), 1.5);
  EXPECT_NEAR(s.value(2.0), std::pow(4.0, 1.5), 1e-12);
  // no overflow at huge radii
  EXPECT_TRUE(std::isfinite(WeightSpec::mean_field(3.0).log_value_at_log_radius(500.0)));
}

TEST(Weight, ValidateRejectsNonIntegrableOrigin) {
  EXPECT_THROW(WeightSpec::regularized(0.0, -1.0, 0.0).validate(), Error);
  EXPECT_NO_THROW(WeightSpec::regularized(0.0, -0.5, 0.0).validate());
  EXPECT_THROW(WeightSpec::regularized(1.0, NAN, 0.0).validate(), Error);
}

TEST(Parallel, OrderIndependentOfJobs) {
  auto sq = [](std::size_t i) { return static_cast<double>(i * i); };
  const auto one = parallel_map<double>(37, 1, sq);
  const auto four = parallel_map<double>(37, 4, sq);
  EXPECT_EQ(one, four);
}

TEST(Parallel, PropagatesWorkerErrors) {
  auto boom = [](std::size_t i) -> int {
    if (i == 5) fail(ErrorKind::NotConverged, "worker");
    return 0;
  };
  EXPECT_THROW(parallel_map<int>(10, 3, boom), Error);
}
