#pragma once

// Radial Cauchy problem for weighted Liouville equations
//
//   -(r v'(r))' = r K(r) e^{v(r)},   v(0) = a,  v'(0) = 0,
//
// its total mass beta(a) = int_0^inf K e^v r dr, the Kelvin inversion and the
// linearization in the central value a.
//
// Integration runs in t = log r, where the problem reads
//   v_t = -s,   s_t = e^{2t} K(e^t) e^v,
// with s = -r v'(r) the slope. The cumulative mass M(r) obeys the same
// equation as s and is carried as a separate component, so s = M along the
// trace up to round-off.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "liouville/errors.hpp"
#include "liouville/ode.hpp"
#include "liouville/weight.hpp"

namespace liouville {

struct IntegrationControl {
  /// Largest admissible starting log-radius; the engine may start further in.
  double t_start = -13.815510557964274;  // log(1e-6)
  double t_max = 1e5;
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  /// Required excess of s over 2(g+1) (g the weight growth) before cutting.
  /// The tail estimate errs by about tail^2 / excess, so a small margin is
  /// enough once the tail itself is below tail_rel_tol.
  double slope_margin = 1e-3;
  double tail_rel_tol = 1e-8;
  /// Bound on e^a j(r0) accepted by the two-term series start.
  double series_bound = 1e-6;
  std::size_t max_steps = 2'000'000;

  void validate() const {
    std::ostringstream msg;
    if (!(t_start < t_max)) {
      msg << "t_start must be below t_max";
    } else if (!(abs_tol > 0 && rel_tol > 0 && tail_rel_tol > 0 && series_bound > 0)) {
      msg << "tolerances must be positive";
    } else if (!(slope_margin > 0)) {
      msg << "slope_margin must be positive";
    } else {
      return;
    }
    fail(ErrorKind::InvalidInputs, msg.str());
  }

  ode::Tolerance tolerance() const { return {abs_tol, rel_tol}; }
};

/// Trace of a radial solution on an increasing log-radius grid.
struct RadialSolution {
  WeightSpec weight;
  double a = 0.0;  // v(0)
  std::vector<double> grid;   // t_i = log r_i
  std::vector<double> v;      // v(r_i)
  std::vector<double> slope;  // s(r_i) = -r v'(r_i)
  std::vector<double> mass;   // M(r_i) = int_0^{r_i} K e^v s ds

  std::size_t size() const { return grid.size(); }
  double radius(std::size_t i) const { return std::exp(grid[i]); }
};

struct MassResult {
  double beta = 0.0;
  double tail = 0.0;
  bool converged = false;
  double r_cut = 0.0;
};

struct LinearizedSolution {
  RadialSolution sol;         // the co-integrated base trace
  std::vector<double> phi;    // phi(r_i), phi = dv/da
  std::vector<double> dphi;   // phi'(r_i)
  std::vector<double> psi;    // -r phi'(r_i)
  std::vector<double> dmass;  // dM/da (r_i)
  MassResult mass;
  double beta_prime = 0.0;
  double phi_infty = 0.0;
};

/// First/last zeros of phi and of phi'. Absent entries mean the trace had
/// fewer sign changes than the full structure needs.
struct ZeroStructure {
  std::optional<double> first_zero;
  std::optional<double> last_zero;
  std::optional<double> first_crit;
  std::optional<double> last_crit;
  std::optional<double> inner_mass;  // M(first_crit)
  std::optional<double> outer_mass;  // beta - M(last_crit)
  std::size_t zero_count = 0;
  std::size_t crit_count = 0;

  bool complete() const {
    return first_zero && last_zero && first_crit && last_crit && zero_count >= 2;
  }

  /// r < r* <= R* < R, meaningful only for a complete structure.
  bool ordered() const {
    return complete() && *first_zero < *first_crit && *first_crit <= *last_crit &&
           *last_crit < *last_zero;
  }

  const ZeroStructure& require_complete() const {
    if (!complete()) fail(ErrorKind::MissingZero, "phi has fewer than two zeros or no critical point");
    return *this;
  }
};

namespace detail {

using State3 = ode::State<3>;
using State6 = ode::State<6>;

/// Source term e^{2t} K(e^t) e^v.
inline double source(const WeightSpec& w, double t, double v) {
  return std::exp(2.0 * t + w.log_value_at_log_radius(t) + v);
}

struct BaseRhs {
  const WeightSpec* w;
  State3 operator()(double t, const State3& y) const {
    const double g = source(*w, t, y[0]);
    return {-y[1], g, g};
  }
};

struct LinearRhs {
  const WeightSpec* w;
  State6 operator()(double t, const State6& y) const {
    const double g = source(*w, t, y[0]);
    return {-y[1], g, g, -y[4], g * y[3], g * y[3]};
  }
};

/// log j(r) and log J(r) for j(r) = int_0^r s K(s) ds, J(r) = int_0^r j(s)/s ds.
/// The substitution s = r w^{1/(2k+2)} absorbs the r^{2k+1} behaviour at 0.
struct SeriesIntegrals {
  double log_j;
  double log_J;
};

inline SeriesIntegrals series_integrals(const WeightSpec& w, double r) {
  using Quad = boost::math::quadrature::gauss<double, 20>;
  const double k = w.origin_exponent();
  const double e = 2.0 * k + 2.0;
  // smooth part of K: K(s) / s^{2k}
  auto smooth = [&](double s) {
    const double ls = std::log(s);
    return std::exp(w.log_value_at_log_radius(ls) - 2.0 * k * ls);
  };
  // j(s) / s^{2k+2}
  auto j_reduced = [&](double s) {
    return Quad::integrate([&](double u) { return smooth(s * std::pow(u, 1.0 / e)); }, 0.0, 1.0) / e;
  };
  const double j_int = Quad::integrate([&](double u) { return smooth(r * std::pow(u, 1.0 / e)); }, 0.0, 1.0);
  const double big_j_int =
      Quad::integrate([&](double u) { return j_reduced(r * std::pow(u, 1.0 / e)); }, 0.0, 1.0);
  const double base = e * std::log(r) - std::log(e);
  return {base + std::log(j_int), base + std::log(big_j_int)};
}

struct Start {
  double t0;
  SeriesIntegrals integrals;
};

inline Start choose_start(const WeightSpec& w, double a, const IntegrationControl& ctrl) {
  double t0 = ctrl.t_start;
  if (w.eps > 0.0) t0 = std::min(t0, std::log(1e-4 * std::sqrt(w.eps)));
  const double log_bound = std::log(ctrl.series_bound);
  for (int i = 0; i < 400; ++i) {
    const SeriesIntegrals s = series_integrals(w, std::exp(t0));
    if (a + s.log_j <= log_bound) return {t0, s};
    t0 -= std::log(10.0);
  }
  fail(ErrorKind::DivergedStep, "no start radius keeps the series start accurate");
}

inline State3 series_state(double a, const SeriesIntegrals& s) {
  const double ej = std::exp(a + s.log_j);
  return {a - std::exp(a + s.log_J), ej, ej};
}

inline State6 series_state_linear(double a, const SeriesIntegrals& s) {
  const double ej = std::exp(a + s.log_j);
  const double eJ = std::exp(a + s.log_J);
  // phi = dv/da = 1 - e^a J,   psi = ds/da = e^a j
  return {a - eJ, ej, ej, 1.0 - eJ, ej, ej};
}

/// Tail mass beyond e^t under the log-linear continuation v(r) = v(r_cut) - s log(r/r_cut),
/// or a negative value when the slope does not yet clear the integrability threshold.
inline double tail_estimate(const WeightSpec& w, double t, double v, double s) {
  const double excess = s - 2.0 - 2.0 * w.growth();
  if (excess <= 0.0) return -1.0;
  return source(w, t, v) / excess;
}

inline bool ready_to_cut(const WeightSpec& w, const IntegrationControl& ctrl, double t, double v,
                         double s, double m) {
  if (s <= 2.0 * (w.growth() + 1.0) + ctrl.slope_margin) return false;
  const double tail = tail_estimate(w, t, v, s);
  return tail >= 0.0 && tail <= ctrl.tail_rel_tol * m;
}

template <std::size_t N, class Rhs, class Record>
void drive(const WeightSpec& w, const IntegrationControl& ctrl, const Rhs& rhs, double t0,
           ode::State<N> y, Record&& record) {
  const ode::Tolerance tol = ctrl.tolerance();
  double t = t0;
  double h = 1e-2;
  bool rejected = false;
  record(t, y);
  for (std::size_t step = 0; step < ctrl.max_steps; ++step) {
    if (ready_to_cut(w, ctrl, t, y[0], y[1], y[2]) || t >= ctrl.t_max) return;
    h = std::min(h, ctrl.t_max - t);
    const auto trial = ode::dopri5_step<N>(rhs, t, y, h, tol);
    bool finite = std::isfinite(trial.error_norm);
    for (double c : trial.y) finite = finite && std::isfinite(c);
    if (finite && trial.error_norm <= 1.0) {
      t += h;
      y = trial.y;
      record(t, y);
      h = ode::next_step(h, trial.error_norm, rejected);
      rejected = false;
    } else {
      h = finite ? ode::next_step(h, trial.error_norm, true) : 0.25 * h;
      rejected = true;
    }
    if (h < 1e-12 * std::max(1.0, std::abs(t))) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " (v = " << y[0] << ")";
      fail(ErrorKind::DivergedStep, msg.str());
    }
  }
  fail(ErrorKind::DivergedStep, "step budget exhausted");
}

inline void check_inputs(const WeightSpec& w, double a, const IntegrationControl& ctrl) {
  w.validate();
  ctrl.validate();
  if (!std::isfinite(a)) fail(ErrorKind::InvalidInputs, "central value must be finite");
}

}  // namespace detail

/// Integrates the Cauchy problem from the series start out to the tail cut
/// (or to ctrl.t_max).
inline RadialSolution integrate_cauchy(const WeightSpec& weight, double a, const IntegrationControl& ctrl = {}) {
  detail::check_inputs(weight, a, ctrl);
  const detail::Start start = detail::choose_start(weight, a, ctrl);
  RadialSolution sol;
  sol.weight = weight;
  sol.a = a;
  detail::drive<3>(weight, ctrl, detail::BaseRhs{&weight}, start.t0, detail::series_state(a, start.integrals),
                   [&](double t, const detail::State3& y) {
                     sol.grid.push_back(t);
                     sol.v.push_back(y[0]);
                     sol.slope.push_back(y[1]);
                     sol.mass.push_back(y[2]);
                   });
  return sol;
}

/// Total mass of a trace: M(r_cut) plus the log-linear tail. The result is
/// flagged unconverged when the cut criterion was not met before t_max; it
/// throws only when the slope never cleared the integrability threshold, in
/// which case no finite tail exists.
inline MassResult mass_of(const RadialSolution& sol, const IntegrationControl& ctrl = {}) {
  const std::size_t n = sol.size();
  if (n == 0) fail(ErrorKind::NotConverged, "empty trace");
  const double t = sol.grid.back();
  const double s = sol.slope.back();
  const double m = sol.mass.back();
  const double threshold = 2.0 * (sol.weight.growth() + 1.0);
  if (s <= threshold) {
    std::ostringstream msg;
    msg << "slope " << s << " never exceeded " << threshold << " before log-radius " << t;
    fail(ErrorKind::NotConverged, msg.str());
  }
  MassResult out;
  out.tail = detail::tail_estimate(sol.weight, t, sol.v.back(), s);
  out.beta = m + out.tail;
  out.r_cut = std::exp(t);
  out.converged = s > threshold + ctrl.slope_margin && out.tail <= ctrl.tail_rel_tol * out.beta;
  return out;
}

inline MassResult beta(const WeightSpec& weight, double a, const IntegrationControl& ctrl = {}) {
  return mass_of(integrate_cauchy(weight, a, ctrl), ctrl);
}

/// State (v, s, M) at log-radius t, by a single integrator step from the
/// nearest grid point on the left. Inside the start radius the series is used.
inline std::array<double, 3> evaluate(const RadialSolution& sol, double t, const IntegrationControl& ctrl = {}) {
  if (sol.size() == 0) fail(ErrorKind::InvalidInputs, "empty trace");
  if (t <= sol.grid.front()) {
    const auto s = detail::series_integrals(sol.weight, std::exp(t));
    return detail::series_state(sol.a, s);
  }
  if (t >= sol.grid.back()) {
    // log-linear continuation past the cut
    const double dt = t - sol.grid.back();
    const double s = sol.slope.back();
    return {sol.v.back() - s * dt, s, sol.mass.back()};
  }
  const auto it = std::upper_bound(sol.grid.begin(), sol.grid.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - sol.grid.begin()) - 1;
  const detail::State3 y{sol.v[i], sol.slope[i], sol.mass[i]};
  if (t == sol.grid[i]) return y;
  return ode::dopri5_step<3>(detail::BaseRhs{&sol.weight}, sol.grid[i], y, t - sol.grid[i], ctrl.tolerance()).y;
}

inline double value_at_radius(const RadialSolution& sol, double r, const IntegrationControl& ctrl = {}) {
  return evaluate(sol, std::log(r), ctrl)[0];
}

inline double mass_at_radius(const RadialSolution& sol, double r, const IntegrationControl& ctrl = {}) {
  return evaluate(sol, std::log(r), ctrl)[2];
}

struct ResidualReport {
  double ode = 0.0;         // max_i |(s_{i+1} - s_i) - int g dt|
  double slope_mass = 0.0;  // max_i |s_i - M_i|
  bool mass_monotone = true;
};

/// Discrete residual of -(r v')' = r K e^v in its integrated midpoint form:
/// on each grid interval, the jump of s against a 5-point Gauss-Legendre
/// integral of the source, whose nodes are filled by sub-steps.
inline ResidualReport residuals(const RadialSolution& sol, const IntegrationControl& ctrl = {}) {
  static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};
  ResidualReport out;
  const detail::BaseRhs rhs{&sol.weight};
  for (std::size_t i = 0; i < sol.size(); ++i) {
    out.slope_mass = std::max(out.slope_mass, std::abs(sol.slope[i] - sol.mass[i]));
    if (i + 1 == sol.size()) break;
    if (sol.mass[i + 1] < sol.mass[i]) out.mass_monotone = false;
    const double t0 = sol.grid[i];
    const double h = sol.grid[i + 1] - t0;
    const detail::State3 y{sol.v[i], sol.slope[i], sol.mass[i]};
    double integral = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double dt = 0.5 * h * (nodes[k] + 1.0);
      const double v = ode::dopri5_step<3>(rhs, t0, y, dt, ctrl.tolerance()).y[0];
      integral += 0.5 * h * weights[k] * detail::source(sol.weight, t0 + dt, v);
    }
    out.ode = std::max(out.ode, std::abs(sol.slope[i + 1] - sol.slope[i] - integral));
  }
  return out;
}

/// Kelvin inversion v^(r) = v(1/r) + beta log(1/r).
///
/// The result lives on the reflected grid -t_i and solves the same kind of
/// radial problem with weight r^{beta-4} K(1/r); its central value is the
/// limit of v^ at r = 0, recovered from the series behaviour at the
/// smallest radius.
inline RadialSolution kelvin(const RadialSolution& sol, double beta) {
  if (sol.size() < 2) fail(ErrorKind::NotConverged, "trace too short to invert");
  const WeightSpec& w = sol.weight;
  if (!(sol.slope.back() > 2.0 * (w.growth() + 1.0))) {
    fail(ErrorKind::NotConverged, "trace does not reach the integrable far field");
  }
  WeightSpec hat;
  hat.q = w.q;
  hat.power = 0.5 * (beta - 4.0) - w.power - w.p - w.q;
  if (w.eps > 0.0) {
    hat.eps = 1.0 / w.eps;
    hat.p = w.p;
    hat.log_scale = w.log_scale + w.p * std::log(w.eps);
  } else {
    hat.eps = 1.0;
    hat.p = 0.0;
    hat.log_scale = w.log_scale;
  }
  RadialSolution out;
  out.weight = hat;
  const std::size_t n = sol.size();
  out.grid.resize(n);
  out.v.resize(n);
  out.slope.resize(n);
  out.mass.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    out.grid[i] = -sol.grid[j];
    out.v[i] = sol.v[j] + beta * sol.grid[j];
    out.slope[i] = beta - sol.slope[j];
    out.mass[i] = beta - sol.mass[j];
  }
  out.a = out.v.front() + out.slope.front() / (2.0 * hat.origin_exponent() + 2.0);
  return out;
}

/// Co-integrates the linearization phi = dv/da:
///   -(r phi')' = r K e^v phi,  phi(0) = 1, phi'(0) = 0,
/// and beta'(a) = int_0^inf r K e^v phi dr with phi frozen past the cut.
inline LinearizedSolution linearized(const WeightSpec& weight, double a, const IntegrationControl& ctrl = {}) {
  detail::check_inputs(weight, a, ctrl);
  const detail::Start start = detail::choose_start(weight, a, ctrl);
  LinearizedSolution lin;
  lin.sol.weight = weight;
  lin.sol.a = a;
  detail::drive<6>(weight, ctrl, detail::LinearRhs{&weight}, start.t0,
                   detail::series_state_linear(a, start.integrals), [&](double t, const detail::State6& y) {
                     lin.sol.grid.push_back(t);
                     lin.sol.v.push_back(y[0]);
                     lin.sol.slope.push_back(y[1]);
                     lin.sol.mass.push_back(y[2]);
                     lin.phi.push_back(y[3]);
                     lin.psi.push_back(y[4]);
                     lin.dphi.push_back(-y[4] * std::exp(-t));
                     lin.dmass.push_back(y[5]);
                   });
  lin.mass = mass_of(lin.sol, ctrl);
  if (!lin.mass.converged) fail(ErrorKind::NotConverged, "tail criterion not met before t_max");
  lin.phi_infty = lin.phi.back();
  lin.beta_prime = lin.dmass.back() + lin.phi.back() * lin.mass.tail;
  return lin;
}

/// Full linearized state (v, s, M, phi, psi, dM/da) at log-radius t.
inline std::array<double, 6> evaluate(const LinearizedSolution& lin, double t, const IntegrationControl& ctrl = {}) {
  const auto& g = lin.sol.grid;
  auto at = [&](std::size_t i) {
    return detail::State6{lin.sol.v[i], lin.sol.slope[i], lin.sol.mass[i], lin.phi[i], lin.psi[i], lin.dmass[i]};
  };
  if (t <= g.front()) return at(0);
  if (t >= g.back()) return at(g.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), t) - g.begin()) - 1;
  if (t == g[i]) return at(i);
  return ode::dopri5_step<6>(detail::LinearRhs{&lin.sol.weight}, g[i], at(i), t - g[i], ctrl.tolerance()).y;
}

struct ZeroScanOptions {
  /// Bisection stops once the bracket in t is this narrow.
  double t_tol = 1e-10;
  /// Sign changes where both bracketing values sit below this fraction of
  /// the trace's peak magnitude are treated as numerical noise.
  double noise_floor = 1e-6;
};

namespace detail {

/// Log-radii of the sign changes of component `comp` of the linearized state.
inline std::vector<double> sign_changes(const LinearizedSolution& lin, const std::vector<double>& values,
                                        std::size_t comp, const IntegrationControl& ctrl,
                                        const ZeroScanOptions& opt) {
  std::vector<double> out;
  const auto& g = lin.sol.grid;
  double peak = 0.0;
  for (double x : values) peak = std::max(peak, std::abs(x));
  const double floor = opt.noise_floor * peak;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double f0 = values[i];
    const double f1 = values[i + 1];
    if (f0 == 0.0) {
      // exact grid zero: counted once, at the smaller radius
      if (i == 0 || values[i - 1] != 0.0) out.push_back(g[i]);
      continue;
    }
    if ((f0 > 0.0) == (f1 > 0.0) || f1 == 0.0) continue;
    if (std::max(std::abs(f0), std::abs(f1)) < floor) continue;
    double lo = g[i], hi = g[i + 1];
    const bool lo_positive = f0 > 0.0;
    while (hi - lo > opt.t_tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = evaluate(lin, mid, ctrl)[comp];
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      ((fm > 0.0) == lo_positive ? lo : hi) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace detail

/// Zeros of phi and of phi' along the linearized trace, located by sign
/// changes on the grid and refined by bisection in t. Radii are returned
/// (not log-radii). A missing zero leaves the corresponding field empty.
inline ZeroStructure zero_structure(const LinearizedSolution& lin, const RadialSolution& sol,
                                    const IntegrationControl& ctrl = {}, const ZeroScanOptions& opt = {}) {
  if (sol.grid != lin.sol.grid) fail(ErrorKind::InvalidInputs, "linearized trace and solution use different grids");
  ZeroStructure z;
  const auto zeros = detail::sign_changes(lin, lin.phi, 3, ctrl, opt);
  const auto crits = detail::sign_changes(lin, lin.psi, 4, ctrl, opt);
  z.zero_count = zeros.size();
  z.crit_count = crits.size();
  if (!zeros.empty()) {
    z.first_zero = std::exp(zeros.front());
    z.last_zero = std::exp(zeros.back());
  }
  if (!crits.empty()) {
    z.first_crit = std::exp(crits.front());
    z.last_crit = std::exp(crits.back());
    z.inner_mass = evaluate(sol, crits.front(), ctrl)[2];
    z.outer_mass = lin.mass.beta - evaluate(sol, crits.back(), ctrl)[2];
  }
  return z;
}

}  // namespace liouville
