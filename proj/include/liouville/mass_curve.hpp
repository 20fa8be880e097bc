#pragma once

// The mass function a -> beta_alpha(a) for the weight (1 + r^2)^alpha:
// sampling, its interior minimizer, inversion for a prescribed mass, and a
// solvability/multiplicity summary of the radial problem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "liouville/errors.hpp"
#include "liouville/parallel.hpp"
#include "liouville/radial_shooting.hpp"

namespace liouville {

struct MassSample {
  double a = 0.0;
  double beta = 0.0;
  bool converged = false;
  double tail = 0.0;
};

struct MassCurve {
  double alpha = 0.0;
  std::vector<MassSample> samples;  // sorted by a
  std::optional<double> a_star;
  std::optional<double> beta_bar;
};

struct Minimizer {
  double a_star = 0.0;
  double beta_bar = 0.0;
  double beta_prime = 0.0;  // beta'(a_star) from the linearized problem
};

struct SweepOptions {
  double a_lo = -30.0;
  double a_hi = 30.0;
  std::size_t n = 200;
  unsigned jobs = 1;
};

/// Differences below this are treated as integration noise when comparing
/// sampled masses (the shooting engine resolves beta to ~1e-8).
inline constexpr double kMassNoise = 1e-7;

namespace detail {

inline MassSample sample_mass(const WeightSpec& w, double a, const IntegrationControl& ctrl) {
  MassSample s;
  s.a = a;
  try {
    const MassResult m = beta(w, a, ctrl);
    s.beta = m.beta;
    s.tail = m.tail;
    s.converged = m.converged;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConverged && e.kind() != ErrorKind::DivergedStep) throw;
    s.beta = std::nan("");
    s.converged = false;
  }
  return s;
}

inline double beta_value(double alpha, double a, const IntegrationControl& ctrl) {
  const MassResult m = beta(WeightSpec::mean_field(alpha), a, ctrl);
  if (!m.converged) fail(ErrorKind::NotConverged, "mass did not converge during refinement");
  return m.beta;
}

inline std::optional<std::size_t> interior_min_index(const MassCurve& curve) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < curve.samples.size(); ++i)
    if (curve.samples[i].converged) idx.push_back(i);
  if (idx.size() < 3) return std::nullopt;
  std::size_t best = idx.front();
  for (std::size_t i : idx)
    if (curve.samples[i].beta < curve.samples[best].beta) best = i;
  const double first = curve.samples[idx.front()].beta;
  const double last = curve.samples[idx.back()].beta;
  const double b = curve.samples[best].beta;
  if (best == idx.front() || best == idx.back()) return std::nullopt;
  if (!(b < first - kMassNoise && b < last - kMassNoise)) return std::nullopt;
  return best;
}

template <class F>
double refine_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto [x0, x1] =
      boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(45), iters);
  return 0.5 * (x0 + x1);
}

}  // namespace detail

/// Golden-section/parabolic refinement of the interior minimum of a sampled
/// curve, polished by a root of beta' when the bracket straddles one.
inline Minimizer find_min(const MassCurve& curve, const IntegrationControl& ctrl = {}) {
  const auto best = detail::interior_min_index(curve);
  if (!best) {
    std::ostringstream msg;
    msg << "mass curve for alpha = " << curve.alpha << " has no interior minimum on the sampled window";
    fail(ErrorKind::NoInteriorMin, msg.str());
  }
  std::size_t lo_i = *best, hi_i = *best;
  do { --lo_i; } while (lo_i > 0 && !curve.samples[lo_i].converged);
  do { ++hi_i; } while (hi_i + 1 < curve.samples.size() && !curve.samples[hi_i].converged);
  const double lo = curve.samples[lo_i].a;
  const double hi = curve.samples[hi_i].a;
  const double alpha = curve.alpha;
  const WeightSpec w = WeightSpec::mean_field(alpha);

  std::uintmax_t iters = 200;
  const auto [a_brent, b_brent] = boost::math::tools::brent_find_minima(
      [&](double a) { return detail::beta_value(alpha, a, ctrl); }, lo, hi, 30, iters);

  Minimizer out{a_brent, b_brent, linearized(w, a_brent, ctrl).beta_prime};
  const double d_lo = linearized(w, lo, ctrl).beta_prime;
  const double d_hi = linearized(w, hi, ctrl).beta_prime;
  if (d_lo < 0.0 && d_hi > 0.0) {
    const double a_root = detail::refine_root([&](double a) { return linearized(w, a, ctrl).beta_prime; }, lo, hi,
                                              d_lo, d_hi);
    const double b_root = detail::beta_value(alpha, a_root, ctrl);
    if (b_root <= out.beta_bar + kMassNoise) out = {a_root, b_root, linearized(w, a_root, ctrl).beta_prime};
  }
  return out;
}

/// Samples beta on an even grid of n central values; the minimizer is filled
/// in when the curve has one inside the window.
inline MassCurve sweep(double alpha, double a_lo, double a_hi, std::size_t n, const IntegrationControl& ctrl = {},
                       unsigned jobs = 1) {
  if (n < 2 || !(a_lo < a_hi)) fail(ErrorKind::InvalidInputs, "sweep needs n >= 2 and a_lo < a_hi");
  if (!(alpha > -1.0)) fail(ErrorKind::InvalidWeight, "alpha must exceed -1");
  const WeightSpec w = WeightSpec::mean_field(alpha);
  MassCurve curve;
  curve.alpha = alpha;
  curve.samples = parallel_map<MassSample>(n, jobs, [&](std::size_t i) {
    const double a = a_lo + (a_hi - a_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return detail::sample_mass(w, a, ctrl);
  });
  if (detail::interior_min_index(curve)) {
    const Minimizer m = find_min(curve, ctrl);
    curve.a_star = m.a_star;
    curve.beta_bar = m.beta_bar;
  }
  return curve;
}

inline MassCurve sweep(double alpha, const SweepOptions& opt, const IntegrationControl& ctrl = {}) {
  return sweep(alpha, opt.a_lo, opt.a_hi, opt.n, ctrl, opt.jobs);
}

/// All central values a in the sampled window with beta(a) = target. One
/// root is reported per bracketing sample interval, so counts are lower
/// bounds at the sweep's resolution. Brackets whose endpoints both lie
/// within kMassNoise of the target are skipped.
inline std::vector<double> solve_for_mass(double alpha, double beta_target, const MassCurve& curve,
                                          const IntegrationControl& ctrl = {}) {
  std::vector<double> roots;
  const auto& s = curve.samples;
  auto f = [&](double a) { return detail::beta_value(alpha, a, ctrl) - beta_target; };
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!s[i].converged || !s[i + 1].converged) continue;
    const double f0 = s[i].beta - beta_target;
    const double f1 = s[i + 1].beta - beta_target;
    if (f0 == 0.0) {
      roots.push_back(s[i].a);
      continue;
    }
    if (f0 * f1 >= 0.0) continue;
    // a sign flip with both ends inside the noise floor is not a resolved
    // crossing (the curve creeping along its asymptote)
    if (std::max(std::abs(f0), std::abs(f1)) < kMassNoise) continue;
    roots.push_back(detail::refine_root(f, s[i].a, s[i + 1].a, f0, f1));
  }
  if (!s.empty() && s.back().converged && s.back().beta == beta_target) roots.push_back(s.back().a);
  if (roots.empty()) {
    std::ostringstream msg;
    msg << "beta = " << beta_target << " lies outside the sampled image for alpha = " << alpha;
    fail(ErrorKind::NoSolution, msg.str());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Sampled beta moves in one direction only, up to kMassNoise.
inline bool is_monotone(const MassCurve& curve, double noise = kMassNoise) {
  bool up = true, down = true;
  std::optional<double> prev;
  for (const auto& s : curve.samples) {
    if (!s.converged) continue;
    if (prev) {
      if (s.beta > *prev + noise) down = false;
      if (s.beta < *prev - noise) up = false;
    }
    prev = s.beta;
  }
  return up || down;
}

enum class Regime { SubUnit, SuperUnit };

struct MultiplicityRange {
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  std::size_t count = 0;
};

struct SolvabilityReport {
  double alpha = 0.0;
  Regime regime = Regime::SubUnit;
  bool degenerate = false;  // image collapsed to a point
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  bool lo_closed = false;  // attained at an interior minimizer
  bool hi_closed = false;
  std::vector<MultiplicityRange> multiplicity;
  // sampling record, so multiplicity claims can be reproduced
  SweepOptions sweep;
  std::size_t targets = 0;
};

/// Radial solvability of the mean field problem with weight (1 + r^2)^alpha,
/// in beta units. Multiplicities are lower bounds at the stated resolution.
inline SolvabilityReport classify(double alpha, const IntegrationControl& ctrl = {}, const SweepOptions& opt = {},
                                  std::size_t targets = 60) {
  if (!(alpha > -1.0)) fail(ErrorKind::InvalidParams, "alpha must exceed -1");
  const MassCurve curve = sweep(alpha, opt, ctrl);
  SolvabilityReport r;
  r.alpha = alpha;
  r.regime = alpha > 1.0 ? Regime::SuperUnit : Regime::SubUnit;
  r.sweep = opt;
  r.targets = targets;

  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : curve.samples) {
    if (!s.converged) continue;
    lo = std::min(lo, s.beta);
    hi = std::max(hi, s.beta);
  }
  if (!std::isfinite(lo)) fail(ErrorKind::NotConverged, "no sample converged");
  if (curve.beta_bar) {
    lo = *curve.beta_bar;
    r.lo_closed = true;
  }
  r.beta_lo = lo;
  r.beta_hi = hi;
  if (hi - lo < 1e-6) {
    r.degenerate = true;
    r.lo_closed = r.hi_closed = true;
    r.multiplicity.push_back({lo, hi, 1});
    return r;
  }

  for (std::size_t k = 0; k < targets; ++k) {
    const double target = lo + (hi - lo) * (static_cast<double>(k) + 0.5) / static_cast<double>(targets);
    std::size_t count = 0;
    try {
      count = solve_for_mass(alpha, target, curve, ctrl).size();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSolution) throw;
    }
    if (!r.multiplicity.empty() && r.multiplicity.back().count == count) {
      r.multiplicity.back().beta_hi = target;
    } else {
      r.multiplicity.push_back({target, target, count});
    }
  }
  return r;
}

}  // namespace liouville
