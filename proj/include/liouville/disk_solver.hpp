#pragma once

// Finite differences for
//
//   Delta u + W(x) e^u = 0 in B_1,   W = h1(x) |x - t e|^{2 alpha1} |x + t e|^{2 alpha2},  e = (1, 0),
//
// with Dirichlet data on r = 1. The mesh is uniform in (s, theta), s = log r,
// where the equation reads u_ss + u_thth + e^{2s} W e^u = 0. The disk
// r < e^{s_min} is not meshed: its mass enters the innermost ring as a flux
// computed from the ring average, which also serves as the pole value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "liouville/errors.hpp"

namespace liouville {

struct LogPolarMesh {
  double s_min = std::log(1e-4);
  int n_r = 128;      // radial intervals; ring n_r is the boundary r = 1
  int n_theta = 32;

  double h_s() const { return -s_min / n_r; }
  double h_theta() const { return 2.0 * std::numbers::pi / n_theta; }
  double s(int j) const { return s_min + j * h_s(); }
  double theta(int k) const { return k * h_theta(); }
  double r(int j) const { return std::exp(s(j)); }
  std::complex<double> point(int j, int k) const { return std::polar(r(j), theta(k)); }
  std::size_t unknowns() const { return static_cast<std::size_t>(n_r) * n_theta; }
  std::size_t nodes() const { return static_cast<std::size_t>(n_r + 1) * n_theta; }
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * n_theta + static_cast<std::size_t>((k + n_theta) % n_theta);
  }

  void validate() const {
    if (!(s_min < 0.0) || n_r < 4 || n_theta < 4 || n_theta % 2 != 0)
      fail(ErrorKind::InvalidParams, "mesh needs s_min < 0, n_r >= 4 and an even n_theta >= 4");
  }
};

struct DiskProblem {
  LogPolarMesh mesh;
  std::function<double(double, double)> h1 = [](double, double) { return 1.0; };
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double t_vortex = 0.0;
  std::function<double(double)> boundary = [](double) { return 0.0; };  // u(1, theta)

  double weight(std::complex<double> x) const {
    double w = h1(x.real(), x.imag());
    if (alpha1 != 0.0) w *= std::pow(std::norm(x - t_vortex), alpha1);
    if (alpha2 != 0.0) w *= std::pow(std::norm(x + t_vortex), alpha2);
    return w;
  }

  void validate() const {
    mesh.validate();
    if (!(alpha1 >= 0.0 && alpha2 >= 0.0)) fail(ErrorKind::InvalidParams, "vortex multiplicities must be >= 0");
    if (!(t_vortex >= 0.0 && t_vortex < 1.0)) fail(ErrorKind::InvalidParams, "t_vortex must lie in [0, 1)");
    for (int j = 0; j <= mesh.n_r; ++j)
      for (int k = 0; k < mesh.n_theta; ++k) {
        const auto x = mesh.point(j, k);
        const double h = h1(x.real(), x.imag());
        if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::InvalidParams, "h1 must be positive on the mesh");
      }
  }
};

struct DiskControl {
  double tol = 1e-10;       // sup norm of the discrete residual
  int max_iter = 60;
  double armijo = 1e-4;
  double min_step = 1.0 / 4096.0;
  bool throw_on_failure = true;
};

struct DiskSolution {
  LogPolarMesh mesh;
  std::vector<double> u;  // rings 0..n_r, ring n_r holds the boundary data
  double pole = 0.0;      // u at the origin: mean of the innermost ring
  int newton_iters = 0;
  double residual_norm = INFINITY;
  bool converged = false;
  std::optional<double> lambda_extract;
  std::complex<double> argmax{0.0, 0.0};
  double u_max = -INFINITY;

  double at(int j, int k) const { return u[mesh.index(j, k)]; }
};

namespace detail {

struct DiskSystem {
  const DiskProblem& pb;
  std::vector<double> w;       // W at every node
  std::vector<double> e2s;     // e^{2 s_j}
  std::vector<double> bdry;    // Dirichlet values, one per angle
  double w_inner = 0.0;        // mean W on the innermost ring

  explicit DiskSystem(const DiskProblem& p) : pb(p) {
    const auto& m = pb.mesh;
    w.resize(m.nodes());
    for (int j = 0; j <= m.n_r; ++j) {
      e2s.push_back(std::exp(2.0 * m.s(j)));
      for (int k = 0; k < m.n_theta; ++k) w[m.index(j, k)] = pb.weight(m.point(j, k));
    }
    for (int k = 0; k < m.n_theta; ++k) {
      bdry.push_back(pb.boundary(m.theta(k)));
      w_inner += w[m.index(0, k)] / m.n_theta;
    }
  }

  double ring_mean(const std::vector<double>& u) const {
    double s = 0.0;
    for (int k = 0; k < pb.mesh.n_theta; ++k) s += u[static_cast<std::size_t>(k)];
    return s / pb.mesh.n_theta;
  }

  /// Outward flux u_s through the innermost ring: minus the inner disk mass per radian.
  double inner_flux(double ubar) const {
    const double r0 = std::exp(pb.mesh.s_min);
    return -0.5 * r0 * r0 * w_inner * std::exp(ubar);
  }

  /// Residual on the unknown rings; u holds unknowns followed by boundary values.
  Eigen::VectorXd residual(const std::vector<double>& u) const {
    const auto& m = pb.mesh;
    const double hs = m.h_s(), ht = m.h_theta();
    Eigen::VectorXd f(static_cast<Eigen::Index>(m.unknowns()));
    const double g = inner_flux(ring_mean(u));
    for (int j = 0; j < m.n_r; ++j) {
      for (int k = 0; k < m.n_theta; ++k) {
        const std::size_t i = m.index(j, k);
        const double uc = u[i];
        const double ang = (u[m.index(j, k + 1)] - 2.0 * uc + u[m.index(j, k - 1)]) / (ht * ht);
        const double src = e2s[static_cast<std::size_t>(j)] * w[i] * std::exp(uc);
        double rad;
        if (j == 0) {
          rad = ((u[m.index(1, k)] - uc) / hs - g) * (2.0 / hs);
        } else {
          rad = (u[m.index(j + 1, k)] - 2.0 * uc + u[m.index(j - 1, k)]) / (hs * hs);
        }
        f(static_cast<Eigen::Index>(i)) = rad + ang + src;
      }
    }
    return f;
  }

  Eigen::SparseMatrix<double> jacobian(const std::vector<double>& u) const {
    const auto& m = pb.mesh;
    const double hs = m.h_s(), ht = m.h_theta();
    const auto n = static_cast<Eigen::Index>(m.unknowns());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5 + static_cast<std::size_t>(m.n_theta * m.n_theta));
    const double g = inner_flux(ring_mean(u));
    auto add = [&](std::size_t r, int j, int k, double v) {
      if (j >= m.n_r) return;  // boundary ring is data
      trip.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.index(j, k)), v);
    };
    for (int j = 0; j < m.n_r; ++j) {
      for (int k = 0; k < m.n_theta; ++k) {
        const std::size_t i = m.index(j, k);
        double diag = -2.0 / (ht * ht) + e2s[static_cast<std::size_t>(j)] * w[i] * std::exp(u[i]);
        add(i, j, k + 1, 1.0 / (ht * ht));
        add(i, j, k - 1, 1.0 / (ht * ht));
        if (j == 0) {
          diag -= 2.0 / (hs * hs);
          add(i, 1, k, 2.0 / (hs * hs));
          // d(-g * 2/hs)/du_{0,l} = -(2/hs) g / n_theta
          for (int l = 0; l < m.n_theta; ++l) add(i, 0, l, -(2.0 / hs) * g / m.n_theta);
        } else {
          diag -= 2.0 / (hs * hs);
          add(i, j + 1, k, 1.0 / (hs * hs));
          add(i, j - 1, k, 1.0 / (hs * hs));
        }
        add(i, j, k, diag);
      }
    }
    Eigen::SparseMatrix<double> jac(n, n);
    jac.setFromTriplets(trip.begin(), trip.end());
    return jac;
  }
};

}  // namespace detail

inline void finalize(const DiskProblem& pb, DiskSolution& sol) {
  const auto& m = pb.mesh;
  double s = 0.0;
  for (int k = 0; k < m.n_theta; ++k) s += sol.at(0, k);
  sol.pole = s / m.n_theta;
  sol.u_max = sol.pole;
  sol.argmax = 0.0;
  for (int j = 0; j <= m.n_r; ++j)
    for (int k = 0; k < m.n_theta; ++k)
      if (sol.at(j, k) > sol.u_max) {
        sol.u_max = sol.at(j, k);
        sol.argmax = m.point(j, k);
      }
  if (pb.t_vortex > 0.0) sol.lambda_extract = sol.u_max + 2.0 * (1.0 + pb.alpha1 + pb.alpha2) * std::log(pb.t_vortex);
}

/// Damped Newton from `init` (values on all rings; the boundary ring is overwritten).
inline DiskSolution solve(const DiskProblem& pb, const std::vector<double>& init, const DiskControl& ctrl = {}) {
  pb.validate();
  const auto& m = pb.mesh;
  if (init.size() != m.nodes()) fail(ErrorKind::InvalidInputs, "initial guess must cover every mesh node");
  for (double v : init)
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInputs, "initial guess must be finite");

  const detail::DiskSystem sys(pb);
  DiskSolution sol;
  sol.mesh = m;
  sol.u = init;
  for (int k = 0; k < m.n_theta; ++k) sol.u[m.index(m.n_r, k)] = sys.bdry[static_cast<std::size_t>(k)];

  Eigen::VectorXd f = sys.residual(sol.u);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::string failure;
  for (int it = 0;; ++it) {
    sol.residual_norm = f.lpNorm<Eigen::Infinity>();
    sol.newton_iters = it;
    if (sol.residual_norm <= ctrl.tol) {
      sol.converged = true;
      break;
    }
    if (it >= ctrl.max_iter) {
      failure = "Newton iteration budget exhausted";
      break;
    }
    const auto jac = sys.jacobian(sol.u);
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) fail(ErrorKind::SingularJacobian, "sparse LU failed: " + lu.lastErrorMessage());
    const Eigen::VectorXd step = lu.solve(-f);
    if (lu.info() != Eigen::Success || !step.allFinite()) fail(ErrorKind::SingularJacobian, "linear solve failed");

    const double f0 = f.norm();
    double lambda = 1.0;
    bool accepted = false;
    std::vector<double> trial(sol.u.size());
    while (lambda >= ctrl.min_step) {
      trial = sol.u;
      for (std::size_t i = 0; i < m.unknowns(); ++i) trial[i] += lambda * step(static_cast<Eigen::Index>(i));
      Eigen::VectorXd ft = sys.residual(trial);
      if (ft.allFinite() && ft.norm() <= (1.0 - ctrl.armijo * lambda) * f0) {
        sol.u.swap(trial);
        f = std::move(ft);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // rounding floor: the full step cannot lower the norm any further
      if (sol.residual_norm <= 100.0 * ctrl.tol) {
        sol.converged = true;
        break;
      }
      failure = "line search stalled";
      break;
    }
  }
  finalize(pb, sol);
  if (!sol.converged && ctrl.throw_on_failure) {
    std::ostringstream msg;
    msg << failure << " (residual " << sol.residual_norm << " after " << sol.newton_iters << " iterations)";
    fail(ErrorKind::NewtonDiverged, msg.str());
  }
  return sol;
}

/// Samples f(x, y) on every node.
inline std::vector<double> sample(const LogPolarMesh& m, const std::function<double(double, double)>& f) {
  std::vector<double> out(m.nodes());
  for (int j = 0; j <= m.n_r; ++j)
    for (int k = 0; k < m.n_theta; ++k) {
      const auto x = m.point(j, k);
      out[m.index(j, k)] = f(x.real(), x.imag());
    }
  return out;
}

/// sup over the nodes of |u - exact|.
inline double sup_error(const DiskSolution& sol, const std::function<double(double, double)>& exact) {
  double worst = 0.0;
  const auto ref = sample(sol.mesh, exact);
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(sol.u[i] - ref[i]));
  return worst;
}

/// Integral of W e^u over B_r for the mesh circle r = e^{s_J}: trapezoid in s,
/// plus the unmeshed inner disk.
inline double disk_mass(const DiskProblem& pb, const DiskSolution& sol, int ring) {
  const auto& m = sol.mesh;
  const double hs = m.h_s(), ht = m.h_theta();
  const double r0 = std::exp(m.s_min);
  double mass = 0.0, w_inner = 0.0;
  for (int k = 0; k < m.n_theta; ++k) w_inner += pb.weight(m.point(0, k)) / m.n_theta;
  mass += std::numbers::pi * r0 * r0 * w_inner * std::exp(sol.pole);
  for (int j = 0; j <= ring; ++j) {
    const double wt = (j == 0 || j == ring) ? 0.5 * hs : hs;
    const double e2s = std::exp(2.0 * m.s(j));
    for (int k = 0; k < m.n_theta; ++k) mass += wt * ht * e2s * pb.weight(m.point(j, k)) * std::exp(sol.at(j, k));
  }
  return mass;
}

inline double total_mass(const DiskProblem& pb, const DiskSolution& sol) { return disk_mass(pb, sol, sol.mesh.n_r); }

/// -(integral of du/dnu over r = 1), one-sided third-order differences.
inline double boundary_flux(const DiskSolution& sol) {
  const auto& m = sol.mesh;
  const int N = m.n_r;
  double flux = 0.0;
  for (int k = 0; k < m.n_theta; ++k) {
    const double us =
        (11.0 * sol.at(N, k) - 18.0 * sol.at(N - 1, k) + 9.0 * sol.at(N - 2, k) - 2.0 * sol.at(N - 3, k)) / (6.0 * m.h_s());
    flux -= us * m.h_theta();
  }
  return flux;
}

struct MassBalance {
  double mass = 0.0;
  double flux = 0.0;
  double relative() const { return std::abs(mass - flux) / std::abs(mass); }
};

inline MassBalance mass_balance(const DiskProblem& pb, const DiskSolution& sol) {
  return {total_mass(pb, sol), boundary_flux(sol)};
}

/// Nearest interior mesh ring to radius r.
inline int ring_of_radius(const LogPolarMesh& m, double r) {
  if (!(r > std::exp(m.s_min) && r < 1.0)) fail(ErrorKind::InvalidInputs, "radius must lie strictly inside the mesh");
  const int j = static_cast<int>(std::lround((std::log(r) - m.s_min) / m.h_s()));
  return std::clamp(j, 1, m.n_r - 1);
}

struct PohozaevTerms {
  double bulk = 0.0;      // integral over B_r of (2W + x . grad W) e^u
  double boundary = 0.0;  // integral over the circle of r^2 W e^u + (u_s^2 - u_theta^2)/2
  double mass = 0.0;      // integral over B_r of W e^u
  double radius = 0.0;
  double imbalance() const { return std::abs(bulk - boundary); }
};

/// Both sides of the Pohozaev identity on the mesh circle nearest r.
inline PohozaevTerms pohozaev_terms(const DiskProblem& pb, const DiskSolution& sol, double r) {
  const auto& m = sol.mesh;
  const int J = ring_of_radius(m, r);
  const double hs = m.h_s(), ht = m.h_theta();
  const double delta = 1e-5;
  auto radial_weight = [&](double s, double th) {
    // 2W + r dW/dr, with r dW/dr = dW/ds by a centred difference
    const double wp = pb.weight(std::polar(std::exp(s + delta), th));
    const double wm = pb.weight(std::polar(std::exp(s - delta), th));
    return 2.0 * pb.weight(std::polar(std::exp(s), th)) + (wp - wm) / (2.0 * delta);
  };
  PohozaevTerms out;
  out.radius = m.r(J);
  out.mass = disk_mass(pb, sol, J);
  const double r0 = std::exp(m.s_min);
  double inner = 0.0;
  for (int k = 0; k < m.n_theta; ++k) inner += radial_weight(m.s_min, m.theta(k)) / m.n_theta;
  out.bulk = std::numbers::pi * r0 * r0 * inner * std::exp(sol.pole);
  for (int j = 0; j <= J; ++j) {
    const double wt = (j == 0 || j == J) ? 0.5 * hs : hs;
    const double e2s = std::exp(2.0 * m.s(j));
    for (int k = 0; k < m.n_theta; ++k) out.bulk += wt * ht * e2s * radial_weight(m.s(j), m.theta(k)) * std::exp(sol.at(j, k));
  }
  const double e2s = std::exp(2.0 * m.s(J));
  for (int k = 0; k < m.n_theta; ++k) {
    const double us = (sol.at(J + 1, k) - sol.at(J - 1, k)) / (2.0 * hs);
    const double ut = (sol.at(J, k + 1) - sol.at(J, k - 1)) / (2.0 * ht);
    out.boundary += ht * (e2s * pb.weight(m.point(J, k)) * std::exp(sol.at(J, k)) + 0.5 * (us * us - ut * ut));
  }
  return out;
}

inline double pohozaev_residual(const DiskProblem& pb, const DiskSolution& sol, double r) {
  return pohozaev_terms(pb, sol, r).imbalance();
}

/// Smallest value on the interior rings minus the smallest boundary value.
inline double interior_min_excess(const DiskSolution& sol) {
  const auto& m = sol.mesh;
  double in = INFINITY, bd = INFINITY;
  for (int j = 0; j <= m.n_r; ++j)
    for (int k = 0; k < m.n_theta; ++k) (j == m.n_r ? bd : in) = std::min(j == m.n_r ? bd : in, sol.at(j, k));
  return in - bd;
}

// ---------------------------------------------------------------------------
// Scaling probe (exploratory)

inline const char* kScalingLabel =
    "EXPLORATORY: no solution branch for prescribed boundary data is guaranteed; results are consistency evidence only";

struct ScalingOptions {
  double h_s = 0.05;
  int n_theta = 64;
  double boundary_c = 0.0;         // u = c - 4m log|x| on r = 1, i.e. u = c there
  int m_expected = 1;
  double cluster_radius = 0.5;     // r0 in the rescaled variable y = x / t
  double peak_window = 2.0;        // maxima within this of max u count as peaks
  double pohozaev_radius = 0.5;
  /// Innermost meshed radius for vortex parameter t.
  static double inner_radius(double t) { return std::min(1e-4, t * t / 100.0); }
};

struct ScalingStep {
  double t = 0.0;
  double lambda = 0.0;       // max v_t
  double combination = 0.0;  // lambda + 2(1 + alpha1 + alpha2 - 2m) log t
  int m = 0;
  std::complex<double> centre{0.0, 0.0};  // location of the highest peak, x coordinates
  double mass = 0.0;
  double pohozaev = 0.0;
  double pohozaev_mass = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  double flux_balance = 0.0;
};

struct ScalingReport {
  std::string label = kScalingLabel;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double boundary_c = 0.0;
  std::vector<ScalingStep> steps;
  bool branch_lost = false;
  double lost_at = 0.0;
  std::string lost_reason;

  double spread() const {
    if (steps.empty()) return 0.0;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : steps) lo = std::min(lo, s.combination), hi = std::max(hi, s.combination);
    return hi - lo;
  }
  double total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 1; i < steps.size(); ++i) tv += std::abs(steps[i].combination - steps[i - 1].combination);
    return tv;
  }
};

inline void require_complete(const ScalingReport& rep) {
  if (rep.branch_lost) {
    std::ostringstream msg;
    msg << "branch lost at t = " << rep.lost_at << ": " << rep.lost_reason;
    fail(ErrorKind::BranchLost, msg.str());
  }
}

/// Mesh for vortex parameter t with the given spacing.
inline LogPolarMesh scaling_mesh(double t, const ScalingOptions& opt) {
  LogPolarMesh m;
  const double s_min = std::log(ScalingOptions::inner_radius(t));
  m.n_r = static_cast<int>(std::ceil(-s_min / opt.h_s));
  m.s_min = s_min;
  m.n_theta = opt.n_theta;
  return m;
}

/// Bubble centred at the origin matched to u = c on r = 1, for W ~ h1(0) t^{2(alpha1+alpha2)} near 0.
inline std::vector<double> bubble_guess(const DiskProblem& pb, double c) {
  const double w0 = pb.h1(0.0, 0.0) * std::pow(pb.t_vortex, 2.0 * (pb.alpha1 + pb.alpha2));
  // log(8 mu^2 / (1 + mu^2 r^2)^2) - log w0 equals c at r = 1 for large mu
  const double mu = std::sqrt(8.0 * std::exp(-c) / w0);
  const double at_one = std::log(8.0 * mu * mu / std::pow(1.0 + mu * mu, 2)) - std::log(w0);
  return sample(pb.mesh, [&](double x, double y) {
    const double r2 = x * x + y * y;
    return std::log(8.0 * mu * mu / std::pow(1.0 + mu * mu * r2, 2)) - std::log(w0) + (c - at_one);
  });
}

namespace detail {

/// Warm start from the solution at t_prev: the profile is moved inward by
/// k = (t_prev/t)^2 and raised by 4 log k; outside the previous mesh the far
/// field c - 4 log r is used.
inline std::vector<double> rescaled_guess(const DiskSolution& prev, double t_prev, const LogPolarMesh& m, double t,
                                          double c) {
  const double log_k = 2.0 * std::log(t_prev / t);
  const auto& pm = prev.mesh;
  std::vector<double> out(m.nodes());
  for (int j = 0; j <= m.n_r; ++j) {
    const double s_old = m.s(j) + log_k;
    for (int k = 0; k < m.n_theta; ++k) {
      double v;
      if (s_old >= 0.0) {
        v = c - 4.0 * m.s(j);
      } else {
        const double pos = std::max(0.0, (s_old - pm.s_min) / pm.h_s());
        const int j0 = std::min(static_cast<int>(pos), pm.n_r - 1);
        const double fr = std::min(1.0, pos - j0);
        // angular interpolation onto the old ring
        const double th = m.theta(k) / pm.h_theta();
        const int k0 = static_cast<int>(th);
        const double ft = th - k0;
        auto ring = [&](int jj) { return (1.0 - ft) * prev.at(jj, k0) + ft * prev.at(jj, k0 + 1); };
        v = (1.0 - fr) * ring(j0) + fr * ring(j0 + 1) + 4.0 * log_k;
      }
      out[m.index(j, k)] = v;
    }
  }
  return out;
}

struct Peak {
  std::complex<double> x;
  double value;
};

/// Local maxima of u over the mesh (pole included), highest first.
inline std::vector<Peak> local_maxima(const DiskSolution& sol) {
  const auto& m = sol.mesh;
  std::vector<Peak> peaks;
  bool pole_max = true;
  for (int k = 0; k < m.n_theta; ++k) pole_max = pole_max && sol.pole >= sol.at(0, k) - 1e-12;
  if (pole_max) peaks.push_back({0.0, sol.pole});
  for (int j = 0; j < m.n_r; ++j) {
    for (int k = 0; k < m.n_theta; ++k) {
      const double v = sol.at(j, k);
      bool is_max = v > sol.at(j, k + 1) && v >= sol.at(j, k - 1) && v > sol.at(j + 1, k);
      is_max = is_max && (j == 0 ? v > sol.pole : v > sol.at(j - 1, k));
      if (is_max) peaks.push_back({m.point(j, k), v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  return peaks;
}

}  // namespace detail

/// Number of separated blow-up peaks of v_t: local maxima within `window` of
/// the top, merged when closer than cluster_radius * t.
inline int count_peaks(const DiskSolution& sol, double t, double cluster_radius, double window,
                       std::complex<double>* centre = nullptr) {
  const auto peaks = detail::local_maxima(sol);
  std::vector<std::complex<double>> reps;
  for (const auto& p : peaks) {
    if (p.value < peaks.front().value - window) break;
    bool merged = false;
    for (auto q : reps) merged = merged || std::abs(p.x - q) < cluster_radius * t;
    if (!merged) reps.push_back(p.x);
  }
  if (centre && !reps.empty()) *centre = reps.front();
  return static_cast<int>(reps.size());
}

/// Follows the solution along a decreasing t schedule, warm-starting each
/// solve from the rescaled previous one. A Newton failure ends the run with a
/// partial report flagged branch_lost.
inline ScalingReport continuation_in_t(const DiskProblem& base, const std::vector<double>& schedule,
                                       const DiskControl& ctrl = {}, const ScalingOptions& opt = {}) {
  if (schedule.empty()) fail(ErrorKind::InvalidInputs, "empty t schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (!(schedule[i] > 0.0 && schedule[i] <= 0.5) || (i > 0 && !(schedule[i] < schedule[i - 1])))
      fail(ErrorKind::InvalidInputs, "t schedule must be strictly decreasing within (0, 0.5]");
  if (base.alpha1 != base.alpha2) fail(ErrorKind::InvalidParams, "the scaling probe needs alpha1 = alpha2");

  ScalingReport rep;
  rep.alpha1 = base.alpha1;
  rep.alpha2 = base.alpha2;
  rep.boundary_c = opt.boundary_c;
  DiskControl inner = ctrl;
  inner.throw_on_failure = false;
  std::optional<DiskSolution> prev;
  double t_prev = 0.0;
  for (double t : schedule) {
    DiskProblem pb = base;
    pb.t_vortex = t;
    pb.mesh = scaling_mesh(t, opt);
    const double c = opt.boundary_c;
    pb.boundary = [c](double) { return c; };
    const auto guess = prev ? detail::rescaled_guess(*prev, t_prev, pb.mesh, t, c) : bubble_guess(pb, c);
    DiskSolution sol;
    try {
      sol = solve(pb, guess, inner);
    } catch (const Error& e) {
      rep.branch_lost = true;
      rep.lost_at = t;
      rep.lost_reason = e.what();
      return rep;
    }
    if (!sol.converged) {
      rep.branch_lost = true;
      rep.lost_at = t;
      std::ostringstream msg;
      msg << "Newton stalled at residual " << sol.residual_norm;
      rep.lost_reason = msg.str();
      return rep;
    }
    ScalingStep st;
    st.t = t;
    st.lambda = *sol.lambda_extract;
    st.m = count_peaks(sol, t, opt.cluster_radius, opt.peak_window, &st.centre);
    const int m_used = st.m > 0 ? st.m : opt.m_expected;
    st.combination = st.lambda + 2.0 * (1.0 + pb.alpha1 + pb.alpha2 - 2.0 * m_used) * std::log(t);
    st.mass = total_mass(pb, sol);
    const auto poho = pohozaev_terms(pb, sol, opt.pohozaev_radius);
    st.pohozaev = poho.imbalance();
    st.pohozaev_mass = poho.mass;
    st.newton_iters = sol.newton_iters;
    st.residual = sol.residual_norm;
    st.flux_balance = mass_balance(pb, sol).relative();
    rep.steps.push_back(st);
    prev = std::move(sol);
    t_prev = t;
  }
  return rep;
}

}  // namespace liouville
