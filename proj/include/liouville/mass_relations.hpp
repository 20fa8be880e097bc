#pragma once

// Algebraic relations for collapsing vortices: the Pohozaev relation between
// the two local masses, the admissible mass list, quantization of entire
// solutions, the necessary solvability range of the radial problem, the
// bubble profile and the height formula.
//
// Local masses sigma_u, m_v are in beta units (rho / 2pi).

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "liouville/errors.hpp"
#include "liouville/units.hpp"

namespace liouville {

struct MassPair {
  double sigma_u = 0.0;
  double m_v = 0.0;
  bool valid() const { return sigma_u >= m_v && m_v >= 0.0; }
};

/// Roots in sigma_u of sigma_u^2 - m_v^2 = 4(1 + alpha1 + alpha2)(sigma_u - m_v).
inline std::pair<double, double> pohozaev_sigma(double m_v, double alpha1, double alpha2) {
  return {m_v, 4.0 * (1.0 + alpha1 + alpha2) - m_v};
}

inline double pohozaev_residual(double sigma_u, double m_v, double alpha1, double alpha2) {
  return sigma_u * sigma_u - m_v * m_v - 4.0 * (1.0 + alpha1 + alpha2) * (sigma_u - m_v);
}

/// The two roots coincide exactly at this m_v.
inline double pohozaev_double_root(double alpha1, double alpha2) { return 2.0 * (1.0 + alpha1 + alpha2); }

/// (m, 4m) for m = 1..min(alpha1, alpha2).
inline std::vector<std::pair<int, double>> admissible_masses(int alpha1, int alpha2) {
  if (alpha1 < 1 || alpha2 < 1 || std::abs(alpha1 - alpha2) > 1)
    fail(ErrorKind::InvalidParams, "multiplicities must be integers >= 1 with |alpha1 - alpha2| <= 1");
  std::vector<std::pair<int, double>> out;
  for (int m = 1; m <= std::min(alpha1, alpha2); ++m) out.emplace_back(m, 4.0 * m);
  return out;
}

/// 4pi (sum alpha_i + alpha/2): total mass of an entire solution with
/// singular sources alpha_i and decay rate alpha at infinity.
inline double quantized_total(const std::vector<double>& alphas, double alpha_inf) {
  double s = 0.0;
  for (double a : alphas) s += a;
  return 4.0 * std::numbers::pi * (s + 0.5 * alpha_inf);
}

/// total / 8pi within tol of a positive integer.
inline bool quantized_mass_check(double total, double tol = 1e-9) {
  if (!(total > 0.0)) return false;
  const double q = units::quanta_from_rho(total);
  const double n = std::round(q);
  return n >= 1.0 && std::abs(q - n) <= tol;
}

inline bool quantized_mass_check(const std::vector<double>& alphas, double alpha_inf, double tol = 1e-9) {
  return quantized_mass_check(quantized_total(alphas, alpha_inf), tol);
}

/// rho in (0, 8pi(1 - alpha^-)) or (8pi(1 + alpha^+), inf); endpoints excluded.
inline bool necessary_range_contains(double rho, double alpha) {
  const double pi8 = 8.0 * std::numbers::pi;
  const double minus = std::max(0.0, -alpha), plus = std::max(0.0, alpha);
  return (rho > 0.0 && rho < pi8 * (1.0 - minus)) || rho > pi8 * (1.0 + plus);
}

struct BubbleSpec {
  double lambda = 0.0;
  double C = 1.0;
  std::complex<double> q{0.0, 0.0};
  void validate() const {
    if (!(C > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::InvalidInputs, "bubble needs C > 0 and finite lambda");
  }
};

/// log( e^lambda / (1 + C e^lambda |y - q|^2)^2 )
inline double bubble_value(const BubbleSpec& b, std::complex<double> y) {
  return b.lambda - 2.0 * std::log1p(b.C * std::exp(b.lambda) * std::norm(y - b.q));
}

/// 8 C times the integral of e^I over the plane, by radial quadrature.
inline double bubble_mass(const BubbleSpec& b) {
  b.validate();
  boost::math::quadrature::exp_sinh<double> integrator;
  // radial profile around q; the centre does not enter the integral
  auto f = [&](double r) { return 2.0 * std::numbers::pi * r * std::exp(bubble_value(b, b.q + r)); };
  const double integral = integrator.integrate(f, 1e-12);
  return 8.0 * b.C * integral;
}

struct HeightInputs {
  double rho = 0.0;
  int m = 1;
  int alpha1 = 1;
  int alpha2 = 1;
  double mass_integral = 0.0;
  std::vector<double> C_ti;
  std::vector<std::vector<double>> pairwise_dist;
  std::vector<std::vector<double>> green_regular;
  std::vector<double> w_at_points;
  double t = 0.0;

  void validate() const {
    std::ostringstream msg;
    const auto m_sz = static_cast<std::size_t>(m);
    auto square = [&](const std::vector<std::vector<double>>& a) {
      if (a.size() != m_sz) return false;
      for (const auto& row : a)
        if (row.size() != m_sz) return false;
      return true;
    };
    if (m < 1) {
      msg << "m must be at least 1";
    } else if (!(rho > 8.0 * std::numbers::pi * m)) {
      msg << "rho = " << rho << " must exceed 8 pi m = " << 8.0 * std::numbers::pi * m;
    } else if (!(t > 0.0)) {
      msg << "t must be positive";
    } else if (!(mass_integral > 0.0)) {
      msg << "mass_integral must be positive";
    } else if (C_ti.size() != m_sz || w_at_points.size() != m_sz || !square(pairwise_dist) ||
               !square(green_regular)) {
      msg << "per-point inputs must have m entries and matrices must be m x m";
    } else {
      for (std::size_t i = 0; i < m_sz; ++i) {
        if (!(C_ti[i] > 0.0)) msg << "C_ti must be positive";
        for (std::size_t j = 0; j < m_sz && msg.str().empty(); ++j) {
          if (pairwise_dist[i][j] != pairwise_dist[j][i]) msg << "pairwise_dist must be symmetric";
          else if (i != j && !(pairwise_dist[i][j] > 0.0)) msg << "pairwise_dist must be positive off the diagonal";
        }
        if (!msg.str().empty()) break;
      }
      if (msg.str().empty()) return;
    }
    fail(ErrorKind::InvalidInputs, msg.str());
  }
};

/// Coefficient of log t carried by lambda_{t,i}: -(2 + 2 alpha1 + 2 alpha2 - 4m).
inline double height_log_t_coefficient(int alpha1, int alpha2, int m) {
  return -(2.0 + 2.0 * alpha1 + 2.0 * alpha2 - 4.0 * m);
}

/// Leading-order height of the i-th bubble, error term dropped.
inline double predict_height(const HeightInputs& in, std::size_t i) {
  in.validate();
  if (i >= static_cast<std::size_t>(in.m)) fail(ErrorKind::InvalidInputs, "point index out of range");
  const double pi = std::numbers::pi;
  double lambda = height_log_t_coefficient(in.alpha1, in.alpha2, in.m) * std::log(in.t);
  lambda += std::log(in.rho / (in.rho - 8.0 * in.m * pi) * in.mass_integral);
  lambda -= 2.0 * std::log(in.C_ti[i]);
  for (std::size_t j = 0; j < in.C_ti.size(); ++j) {
    if (j != i) lambda += 4.0 * std::log(in.pairwise_dist[i][j]);
    lambda -= 8.0 * pi * in.green_regular[i][j];
  }
  lambda -= in.w_at_points[i];
  return lambda;
}

}  // namespace liouville
