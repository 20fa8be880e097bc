#pragma once

// Blow-up point configuration for two collapsing vortices at +1 and -1 with
// multiplicities alpha1, alpha2. The m points e_l solve
//
//   alpha1/(e_l - 1) + alpha2/(e_l + 1) = 2 sum_{j != l} 1/(e_l - e_j).
//
// Summing over l fixes e_1 + ... + e_m; matching the Vieta coefficients of
// prod (z - e_l) against the polynomial identity satisfied by every e_l gives
// a two-term recurrence for the elementary symmetric functions, so the
// points are the roots of an explicit degree-m polynomial.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "liouville/errors.hpp"

namespace liouville {

using Complex = std::complex<double>;

struct VortexParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  int m = 1;
  /// Permit non-integer multiplicities. The recurrence still evaluates but
  /// nothing guarantees the result describes a blow-up configuration.
  bool extrapolate = false;

  void validate() const {
    std::ostringstream msg;
    const auto is_int = [](double x) { return std::floor(x) == x; };
    if (!(alpha1 > 0.0 && alpha2 > 0.0)) {
      msg << "multiplicities must be positive";
    } else if (!extrapolate && (!is_int(alpha1) || !is_int(alpha2))) {
      msg << "multiplicities must be integers (set extrapolate to override)";
    } else if (std::abs(alpha1 - alpha2) > 1.0) {
      msg << "|alpha1 - alpha2| must not exceed 1";
    } else if (m < 1 || m > std::min(alpha1, alpha2)) {
      msg << "m must satisfy 1 <= m <= min(alpha1, alpha2)";
    } else if (!(alpha1 + alpha2 - 2.0 * (m - 1) > 0.0)) {
      msg << "alpha1 + alpha2 - 2(m-1) must be positive";
    } else {
      return;
    }
    fail(ErrorKind::InvalidParams, msg.str());
  }

  double total() const { return alpha1 + alpha2; }
};

struct BlowupConfiguration {
  VortexParams params;
  std::vector<double> sym;     // elementary symmetric functions, sym[0] = 1
  std::vector<double> poly;    // ascending coefficients, poly[k] multiplies z^k
  std::vector<Complex> points;
  double residual = 0.0;
};

/// Elementary symmetric functions of the blow-up points, k = 0..m.
inline std::vector<double> symmetric_functions(const VortexParams& params) {
  params.validate();
  const int m = params.m;
  const double a1 = params.alpha1, a2 = params.alpha2;
  std::vector<double> sym(static_cast<std::size_t>(m) + 1, 0.0);
  sym[0] = 1.0;
  sym[1] = (a2 - a1) * m / (a1 + a2 - 2.0 * (m - 1));
  for (int k = 0; k + 2 <= m; ++k) {
    const double denom = (2.0 + k) * (a1 + a2 - 2.0 * m + k + 3.0);
    if (denom == 0.0) fail(ErrorKind::InvalidParams, "vanishing recurrence denominator");
    sym[k + 2] = ((m - k - 1.0) * (m - k) * sym[k] - (a1 - a2) * (m - k - 1.0) * sym[k + 1]) / denom;
  }
  return sym;
}

/// P(z) = M prod (z - e_l) with M = m (alpha1 + alpha2 - (m - 1)); ascending order.
inline std::vector<double> characteristic_polynomial(const std::vector<double>& sym, const VortexParams& params) {
  const int m = params.m;
  if (sym.size() != static_cast<std::size_t>(m) + 1) fail(ErrorKind::InvalidInputs, "sym must have m+1 entries");
  const double lead = m * (params.total() - (m - 1.0));
  std::vector<double> coeffs(sym.size());
  for (int j = 0; j <= m; ++j) coeffs[static_cast<std::size_t>(m - j)] = lead * ((j % 2) ? -1.0 : 1.0) * sym[j];
  return coeffs;
}

/// Coefficients c_0..c_{m-1} written directly in terms of the symmetric
/// functions by expanding the per-point identity (before Vieta is applied).
/// Agreement with characteristic_polynomial is what the recurrence encodes.
inline std::vector<double> expanded_coefficients(const std::vector<double>& sym, const VortexParams& params) {
  const int m = params.m;
  const double a1 = params.alpha1, a2 = params.alpha2, A = a1 + a2;
  std::vector<double> c(static_cast<std::size_t>(m), 0.0);
  c[static_cast<std::size_t>(m - 1)] = (m - 2.0 - A) * (m - 1.0) * sym[1] + m * (a1 - a2);
  for (int k = 0; k + 2 <= m; ++k) {
    const double sign = (k % 2) ? -1.0 : 1.0;
    c[static_cast<std::size_t>(m - 2 - k)] = sign * (A * (m - 2.0 - k) - (m - k - 3.0) * (m - k - 2.0)) * sym[k + 2] -
                                             sign * (a1 - a2) * (m - k - 1.0) * sym[k + 1] +
                                             sign * (m - k) * (m - k - 1.0) * sym[k];
  }
  return c;
}

/// max_l |alpha1/(e_l-1) + alpha2/(e_l+1) - 2 sum_{j!=l} 1/(e_l-e_j)|.
inline double configuration_residual(const VortexParams& params, const std::vector<Complex>& points) {
  double worst = 0.0;
  for (std::size_t l = 0; l < points.size(); ++l) {
    const Complex e = points[l];
    Complex r = params.alpha1 / (e - 1.0) + params.alpha2 / (e + 1.0);
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != l) r -= 2.0 / (e - points[j]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// Lexicographic (real, imaginary) order; real parts closer than 1e-12 tie.
inline void sort_points(std::vector<Complex>& pts) {
  std::sort(pts.begin(), pts.end(), [](Complex x, Complex y) {
    if (std::abs(x.real() - y.real()) > 1e-12) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

/// Hausdorff distance between two finite point sets.
inline double set_distance(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (Complex p : from) {
      double best = INFINITY;
      for (Complex q : to) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(x, y), directed(y, x));
}

namespace detail {

inline Complex horner(const std::vector<double>& c, Complex z, Complex* deriv = nullptr) {
  Complex p = 0.0, dp = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  if (deriv) *deriv = dp;
  return p;
}

inline std::vector<Complex> companion_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) return {Complex(-c[0] / c[1], 0.0)};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  std::vector<Complex> roots;
  for (int i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

/// Simultaneous Aberth-Ehrlich iteration from points on a circle.
inline std::vector<Complex> aberth_roots(const std::vector<double>& c, int max_iter = 500) {
  const int n = static_cast<int>(c.size()) - 1;
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(c[k] / c[n]), 1.0 / (n - k)));
  radius = std::max(radius, 1e-3);
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 2.0 * M_PI * (k + 0.25) / n);
  for (int it = 0; it < max_iter; ++it) {
    double move = 0.0;
    for (int k = 0; k < n; ++k) {
      Complex dp;
      const Complex p = horner(c, z[k], &dp);
      if (p == 0.0) continue;
      const Complex ratio = p / dp;
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const Complex step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-15 * std::max(1.0, radius)) break;
  }
  return z;
}

inline void polish(const std::vector<double>& c, std::vector<Complex>& roots) {
  for (Complex& z : roots) {
    for (int it = 0; it < 3; ++it) {
      Complex dp;
      const Complex p = horner(c, z, &dp);
      if (dp == 0.0) break;
      z -= p / dp;
    }
  }
}

inline double min_separation(const std::vector<Complex>& pts) {
  double d = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

}  // namespace detail

/// Roots of the characteristic polynomial (companion matrix, Aberth as a
/// fallback), checked against the defining equations.
inline BlowupConfiguration find_points(const VortexParams& params, double residual_tol = 1e-8) {
  BlowupConfiguration cfg;
  cfg.params = params;
  cfg.sym = symmetric_functions(params);
  cfg.poly = characteristic_polynomial(cfg.sym, params);

  auto attempt = [&](std::vector<Complex> roots) {
    detail::polish(cfg.poly, roots);
    sort_points(roots);
    return roots;
  };
  cfg.points = attempt(detail::companion_roots(cfg.poly));
  cfg.residual = configuration_residual(params, cfg.points);
  if (!(cfg.residual <= residual_tol)) {
    cfg.points = attempt(detail::aberth_roots(cfg.poly));
    cfg.residual = configuration_residual(params, cfg.points);
  }
  for (Complex e : cfg.points) {
    if (std::abs(e - 1.0) < 1e-12 || std::abs(e + 1.0) < 1e-12)
      fail(ErrorKind::ResidualTooLarge, "a blow-up point coincides with a vortex");
  }
  if (detail::min_separation(cfg.points) < 1e-8) fail(ErrorKind::ResidualTooLarge, "repeated blow-up point");
  if (!(cfg.residual <= residual_tol)) {
    std::ostringstream msg;
    msg << "configuration residual " << cfg.residual << " exceeds " << residual_tol;
    fail(ErrorKind::ResidualTooLarge, msg.str());
  }
  return cfg;
}

struct NewtonControl {
  double tol = 1e-12;
  int max_iter = 200;
  /// Iterates straying further than this from the origin count as divergence.
  double max_radius = 1e6;
  double max_step = 0.5;
};

/// Damped Newton on the 2m real equations
///   alpha1 (p - e)/|p - e|^2 + alpha2 (p + e)/|p + e|^2 = 2 sum_{j != i} (p_i - p_j)/|p_i - p_j|^2,
/// with e = 1. These are the complex conjugates of the holomorphic system
/// above; Newton runs on it with row i multiplied by (p_i^2 - 1), which keeps
/// the zero set off the vortices but stops iterates being pushed to infinity
/// where the raw residual decays. Convergence is judged on the raw residual.
/// Uses no information from the polynomial route.
inline std::vector<Complex> newton_oracle(const VortexParams& params, const std::vector<Complex>& start,
                                          const NewtonControl& ctrl = {}) {
  params.validate();
  const std::size_t m = start.size();
  if (m != static_cast<std::size_t>(params.m)) fail(ErrorKind::InvalidInputs, "start must hold m points");
  if (detail::min_separation(start) == 0.0) fail(ErrorKind::InvalidInputs, "start points must be distinct");
  for (Complex e : start)
    if (e == Complex(1.0) || e == Complex(-1.0)) fail(ErrorKind::InvalidInputs, "start point on a vortex");

  const double a1 = params.alpha1, a2 = params.alpha2;
  auto raw = [&](const std::vector<Complex>& p) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Complex d1 = p[i] - 1.0, d2 = p[i] + 1.0;
      Complex g = a1 * d1 / std::norm(d1) + a2 * d2 / std::norm(d2);
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) g -= 2.0 * (p[i] - p[j]) / std::norm(p[i] - p[j]);
      worst = std::max(worst, std::abs(g));
    }
    return worst;
  };
  // G_i = a1 (p_i + 1) + a2 (p_i - 1) - 2 (p_i^2 - 1) sum_j 1/(p_i - p_j)
  auto cleared = [&](const std::vector<Complex>& p) {
    Eigen::VectorXd f(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
      Complex sum = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) sum += 1.0 / (p[i] - p[j]);
      const Complex g = a1 * (p[i] + 1.0) + a2 * (p[i] - 1.0) - 2.0 * (p[i] * p[i] - 1.0) * sum;
      f(2 * i) = g.real();
      f(2 * i + 1) = g.imag();
    }
    return f;
  };
  // G is holomorphic in each p_j; derivative d = a + ib enters as [[a, -b], [b, a]].
  auto jacobian = [&](const std::vector<Complex>& p) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    auto put = [&](std::size_t row, std::size_t col, Complex d) {
      jac(2 * row, 2 * col) += d.real();
      jac(2 * row, 2 * col + 1) -= d.imag();
      jac(2 * row + 1, 2 * col) += d.imag();
      jac(2 * row + 1, 2 * col + 1) += d.real();
    };
    for (std::size_t i = 0; i < m; ++i) {
      const Complex q = p[i] * p[i] - 1.0;
      Complex sum = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) sum += 1.0 / (p[i] - p[j]);
      put(i, i, a1 + a2 - 4.0 * p[i] * sum);
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const Complex d = p[i] - p[j];
        put(i, i, 2.0 * q / (d * d));
        put(i, j, -2.0 * q / (d * d));
      }
    }
    return jac;
  };

  std::vector<Complex> p = start;
  Eigen::VectorXd f = cleared(p);
  for (int it = 0; it < ctrl.max_iter; ++it) {
    if (raw(p) < ctrl.tol) {
      if (detail::min_separation(p) < 1e-8) fail(ErrorKind::NewtonDiverged, "iterates merged");
      sort_points(p);
      return p;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(p));
    if (!lu.isInvertible()) fail(ErrorKind::NewtonDiverged, "singular Jacobian");
    Eigen::VectorXd step = lu.solve(-f);
    double longest = 0.0;
    for (std::size_t i = 0; i < m; ++i) longest = std::max(longest, std::hypot(step(2 * i), step(2 * i + 1)));
    if (longest > ctrl.max_step) step *= ctrl.max_step / longest;
    double lambda = 1.0;
    bool accepted = false;
    for (int back = 0; back < 40; ++back, lambda *= 0.5) {
      std::vector<Complex> trial = p;
      for (std::size_t i = 0; i < m; ++i) trial[i] += lambda * Complex(step(2 * i), step(2 * i + 1));
      const Eigen::VectorXd ft = cleared(trial);
      if (ft.allFinite() && ft.norm() < (1.0 - 1e-4 * lambda) * f.norm()) {
        p = std::move(trial);
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // stalled at rounding level: accept if the raw residual is already tiny
      if (raw(p) < 1e3 * ctrl.tol) break;
      fail(ErrorKind::NewtonDiverged, "line search failed");
    }
    for (Complex e : p)
      if (!(std::abs(e) < ctrl.max_radius)) fail(ErrorKind::NewtonDiverged, "iterate escaped");
  }
  if (raw(p) < 1e3 * ctrl.tol && detail::min_separation(p) >= 1e-8) {
    sort_points(p);
    return p;
  }
  fail(ErrorKind::NewtonDiverged, "iteration budget exhausted");
}

/// m distinct random points in the square [-2, 2]^2, away from the vortices.
inline std::vector<Complex> random_start(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Complex> pts;
  while (static_cast<int>(pts.size()) < m) {
    const Complex z(u(rng), u(rng));
    if (std::abs(z - 1.0) < 0.05 || std::abs(z + 1.0) < 0.05) continue;
    bool close = false;
    for (Complex q : pts) close = close || std::abs(q - z) < 0.05;
    if (!close) pts.push_back(z);
  }
  return pts;
}

/// All (alpha1, alpha2, m) with integer multiplicities up to max_alpha.
inline std::vector<VortexParams> admissible_params(int max_alpha) {
  std::vector<VortexParams> out;
  for (int a1 = 1; a1 <= max_alpha; ++a1)
    for (int a2 = std::max(1, a1 - 1); a2 <= std::min(max_alpha, a1 + 1); ++a2)
      for (int m = 1; m <= std::min(a1, a2); ++m) out.push_back({double(a1), double(a2), m, false});
  return out;
}

}  // namespace liouville
