#pragma once

// Radial face of the non-concentration mechanism. For the regularized weight
//
//   K_eps(r) = (eps + r^2)^alpha (1 + r^2)^a,    a = rho/4pi - (alpha + 2),
//
// the radial solution with total mass rho is followed as eps -> 0. Its mass
// inside the probe radius eps^{1/4} (between the sqrt(eps) core and O(1))
// settles at 4 beta-units, i.e. 8pi, while the remaining rho - 8pi stays
// spread and is described by the limit problem with weight r^{2(alpha-2)}(1+r^2)^a.
//
// What is reproduced is the radial mechanism only; whether the radial
// branch found here is the variational solution of the planar problem is
// not decided by this code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/mass_curve.hpp"
#include "liouville/parallel.hpp"
#include "liouville/radial_shooting.hpp"
#include "liouville/units.hpp"

namespace liouville {

inline constexpr double kPi = std::numbers::pi;

/// Exponent a of (1 + |x|^2)^a tied to the total mass: a = rho/4pi - (alpha + 2).
inline double a_pow_from_rho(double rho, double alpha) {
  if (!(rho > 0.0)) fail(ErrorKind::InvalidInputs, "rho must be positive");
  return rho / (4.0 * kPi) - (alpha + 2.0);
}

/// The band -1 < a < 0 in which the collapse argument operates.
inline bool a_pow_admissible(double a_pow) { return a_pow > -1.0 && a_pow < 0.0; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
};

/// (4pi(alpha+1), min(2pi beta_bar, 16pi)) in rho units.
inline Interval admissible_rho_window(double alpha, double beta_bar) {
  if (!(alpha > 1.0 && alpha < 3.0)) fail(ErrorKind::InvalidParams, "window is defined for 1 < alpha < 3");
  Interval w{4.0 * kPi * (alpha + 1.0), std::min(units::rho_from_beta(beta_bar), 16.0 * kPi)};
  if (!(w.lo < w.hi)) {
    std::ostringstream msg;
    msg << "empty rho window (" << w.lo << ", " << w.hi << ") for alpha = " << alpha;
    fail(ErrorKind::EmptyWindow, msg.str());
  }
  return w;
}

struct CollapseRecord {
  double eps = 0.0;
  bool found = false;
  double a_found = 0.0;
  double beta_check = 0.0;     // total mass of the selected solution, beta units
  double r_probe = 0.0;        // eps^{1/4}
  double plateau = 0.0;        // M(r_probe)
  double plateau_alt = 0.0;    // M(eps^{1/3}), probe-exponent sensitivity
  std::vector<double> roots;   // every a hitting the target mass at this eps
  RadialSolution profile;      // mass profile M(r) of the selected solution
};

struct CollapseRun {
  double alpha = 0.0;
  double rho = 0.0;
  double a_pow = 0.0;
  std::vector<double> eps_schedule;
  std::vector<CollapseRecord> records;
};

struct CollapseReport {
  CollapseRun run;
  std::vector<double> plateau;  // concentrated mass m0/2pi per eps
  std::optional<RadialSolution> limit_profile;
  std::string header;
};

struct CollapseOptions {
  std::size_t scan_points = 32;
  /// Scan window in a: [-alpha log eps - below, -2 alpha log eps + above].
  double window_below = 10.0;
  double window_above = 40.0;
  double probe_exponent = 0.25;
  double alt_probe_exponent = 1.0 / 3.0;
  bool with_limit_profile = true;
  unsigned jobs = 1;
};

inline const char* kCollapseHeader =
    "radial reproduction of the non-concentration mechanism; branches are labelled by continuation only";

namespace detail {

inline std::vector<double> mass_roots(const WeightSpec& w, double beta_target, double a_lo, double a_hi,
                                      std::size_t points, const IntegrationControl& ctrl, unsigned jobs) {
  const auto samples = parallel_map<MassSample>(points, jobs, [&](std::size_t i) {
    const double a = a_lo + (a_hi - a_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return sample_mass(w, a, ctrl);
  });
  auto f = [&](double a) {
    const MassResult m = beta(w, a, ctrl);
    return m.beta - beta_target;
  };
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& s0 = samples[i];
    const auto& s1 = samples[i + 1];
    if (!s0.converged || !s1.converged) continue;
    const double f0 = s0.beta - beta_target;
    const double f1 = s1.beta - beta_target;
    if (f0 * f1 > 0.0 || (f0 == 0.0 && i > 0)) continue;
    roots.push_back(refine_root(f, s0.a, s1.a, f0, f1));
  }
  return roots;
}

}  // namespace detail

/// Solution of the eps = 0 limit problem in the shifted variable eta:
/// xi = -4 log r + eta carries a Dirac mass 8pi at the origin, and eta solves
/// the regular radial problem with weight r^{2(alpha-2)} (1+r^2)^a and total
/// mass (rho - 8pi)/2pi.
inline RadialSolution limit_profile(double alpha, double rho, const IntegrationControl& ctrl = {},
                                    double a_lo = -40.0, double a_hi = 40.0, std::size_t points = 81) {
  if (!(rho - 8.0 * kPi > 0.0)) fail(ErrorKind::InvalidInputs, "limit profile needs rho > 8pi");
  const double a_pow = a_pow_from_rho(rho, alpha);
  const WeightSpec w{0.0, alpha - 2.0, a_pow, 0.0, 0.0};
  w.validate();
  const double target = units::beta_from_rho(rho - 8.0 * kPi);
  const auto roots = detail::mass_roots(w, target, a_lo, a_hi, points, ctrl, 1);
  if (roots.empty()) {
    std::ostringstream msg;
    msg << "no central value gives shifted mass " << target;
    fail(ErrorKind::NoBracket, msg.str());
  }
  return integrate_cauchy(w, roots.front(), ctrl);
}

/// sup over r in [r_min, r_max] (collapse grid points) of
/// |v_eps(r) - (-4 log r + eta(r))|.
inline double limit_mismatch(const RadialSolution& collapse, const RadialSolution& limit, double r_min,
                             double r_max, const IntegrationControl& ctrl = {}) {
  double worst = 0.0;
  const double t_lo = std::log(r_min), t_hi = std::log(r_max);
  for (std::size_t i = 0; i < collapse.size(); ++i) {
    const double t = collapse.grid[i];
    if (t < t_lo || t > t_hi) continue;
    const double eta = evaluate(limit, t, ctrl)[0];
    worst = std::max(worst, std::abs(collapse.v[i] - (-4.0 * t + eta)));
  }
  return worst;
}

/// Follows the radial solution of mass rho along a decreasing eps schedule.
/// When beta_bar is not supplied it is computed from the mass curve.
inline CollapseReport run_collapse(double alpha, double rho, const std::vector<double>& eps_schedule,
                                   const IntegrationControl& ctrl = {}, const CollapseOptions& opt = {},
                                   std::optional<double> beta_bar = std::nullopt) {
  if (eps_schedule.empty()) fail(ErrorKind::InvalidInputs, "empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0) || (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])))
      fail(ErrorKind::InvalidInputs, "eps schedule must be positive and strictly decreasing");
  }
  if (!beta_bar) {
    const MassCurve curve = sweep(alpha, -30.0, 30.0, 200, ctrl, opt.jobs);
    if (!curve.beta_bar) fail(ErrorKind::NoInteriorMin, "mass curve has no minimizer; window undefined");
    beta_bar = curve.beta_bar;
  }
  const Interval window = admissible_rho_window(alpha, *beta_bar);
  if (!window.contains(rho)) {
    std::ostringstream msg;
    msg << "rho = " << rho << " outside the admissible window (" << window.lo << ", " << window.hi << ")";
    fail(ErrorKind::InvalidInputs, msg.str());
  }

  CollapseReport report;
  report.header = kCollapseHeader;
  CollapseRun& run = report.run;
  run.alpha = alpha;
  run.rho = rho;
  run.a_pow = a_pow_from_rho(rho, alpha);
  run.eps_schedule = eps_schedule;
  const double target = units::beta_from_rho(rho);

  std::vector<std::pair<double, double>> history;  // (log eps, a) of accepted records
  for (double eps : eps_schedule) {
    CollapseRecord rec;
    rec.eps = eps;
    rec.r_probe = std::pow(eps, opt.probe_exponent);
    const WeightSpec w = WeightSpec::regularized(eps, alpha, run.a_pow);
    const double le = std::log(eps);
    rec.roots = detail::mass_roots(w, target, -alpha * le - opt.window_below, -2.0 * alpha * le + opt.window_above,
                                   opt.scan_points, ctrl, opt.jobs);
    if (!rec.roots.empty()) {
      double predicted;
      if (history.empty()) {
        predicted = rec.roots.back();
      } else if (history.size() == 1) {
        predicted = history[0].second - 2.0 * alpha * (le - history[0].first);
      } else {
        const auto& [l0, a0] = history[history.size() - 2];
        const auto& [l1, a1] = history.back();
        predicted = a1 + (a1 - a0) / (l1 - l0) * (le - l1);
      }
      rec.a_found = *std::min_element(rec.roots.begin(), rec.roots.end(), [&](double x, double y) {
        return std::abs(x - predicted) < std::abs(y - predicted);
      });
      rec.profile = integrate_cauchy(w, rec.a_found, ctrl);
      rec.beta_check = mass_of(rec.profile, ctrl).beta;
      rec.plateau = mass_at_radius(rec.profile, rec.r_probe, ctrl);
      rec.plateau_alt = mass_at_radius(rec.profile, std::pow(eps, opt.alt_probe_exponent), ctrl);
      rec.found = true;
      history.emplace_back(le, rec.a_found);
    }
    report.plateau.push_back(rec.found ? rec.plateau : std::nan(""));
    run.records.push_back(std::move(rec));
  }
  if (opt.with_limit_profile) report.limit_profile = limit_profile(alpha, rho, ctrl);
  return report;
}

/// True when the recorded plateaus approach `limit` monotonically along the schedule.
inline bool plateau_monotone_towards(const CollapseReport& report, double limit) {
  std::optional<double> prev;
  for (double p : report.plateau) {
    if (std::isnan(p)) continue;
    if (prev && std::abs(p - limit) > std::abs(*prev - limit) + kMassNoise) return false;
    prev = p;
  }
  return true;
}

}  // namespace liouville
