#pragma once

#include <numbers>

// Mass units used throughout the library.
//
//   rho   total mass of the planar equation, int K e^v dx
//   beta  radial mass, int_0^inf K e^v r dr = rho / 2pi
//   sigma local mass at a blow-up point, also rho / 2pi
//
// Every conversion goes through this header.
namespace liouville::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double beta_from_rho(double rho) { return rho / two_pi; }
constexpr double rho_from_beta(double beta) { return beta * two_pi; }
constexpr double sigma_from_rho(double rho) { return rho / two_pi; }
constexpr double rho_from_sigma(double sigma) { return sigma * two_pi; }

/// Number of 8pi quanta carried by a rho-unit mass.
constexpr double quanta_from_rho(double rho) { return rho / (8.0 * std::numbers::pi); }

}  // namespace liouville::units
