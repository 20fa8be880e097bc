#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace liouville::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
};

template <std::size_t N>
struct StepResult {
  State<N> y;
  double error_norm = 0.0;  // scaled, <= 1 means accept
};

/// One Dormand-Prince 5(4) step of size h from (t, y). The 5th order
/// solution is propagated; the embedded 4th order one only scales the error.
template <std::size_t N, class Rhs>
StepResult<N> dopri5_step(const Rhs& f, double t, const State<N>& y, double h, const Tolerance& tol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto combine = [&](std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [coef, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };

  const State<N> k1 = f(t, y);
  const State<N> k2 = f(t + c2 * h, combine({{a21, &k1}}));
  const State<N> k3 = f(t + c3 * h, combine({{a31, &k1}, {a32, &k2}}));
  const State<N> k4 = f(t + c4 * h, combine({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State<N> k5 = f(t + c5 * h, combine({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State<N> k6 =
      f(t + h, combine({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State<N> y5 = combine({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State<N> k7 = f(t + h, y5);

  double err2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = tol.abs_tol + tol.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    err2 += (e / scale) * (e / scale);
  }
  return {y5, std::sqrt(err2 / static_cast<double>(N))};
}

/// Step-size update for an order-5 pair with the usual safety clamps.
inline double next_step(double h, double error_norm, bool rejected) {
  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;
  double factor = error_norm == 0.0 ? max_factor : safety * std::pow(error_norm, -0.2);
  factor = std::clamp(factor, min_factor, rejected ? 1.0 : max_factor);
  return h * factor;
}

}  // namespace liouville::ode
