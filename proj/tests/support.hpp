#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "liouville/disk_solver.hpp"

namespace testing_support {

// Exact solution of Delta u + |x|^{2 alpha} e^u = 0 on the plane:
// log( 8 (alpha+1)^2 lambda^2 / (1 + lambda^2 r^{2(alpha+1)})^2 ).
inline std::function<double(double, double)> exact_bubble(double alpha, double lambda) {
  return [alpha, lambda](double x, double y) {
    const double r2 = x * x + y * y;
    const double k = alpha + 1.0;
    return std::log(8.0 * k * k * lambda * lambda) - 2.0 * std::log1p(lambda * lambda * std::pow(r2, k));
  };
}

// W e^u of the exact solution integrated over the unit disk, closed form.
inline double exact_disk_mass(double alpha, double lambda) {
  const double l2 = lambda * lambda;
  return 8.0 * std::numbers::pi * (alpha + 1.0) * l2 / (1.0 + l2);
}

struct Manufactured {
  liouville::DiskProblem problem;
  std::function<double(double, double)> exact;
  liouville::DiskSolution solution;
};

// Solved on n_r intervals, n_theta = n_r / 5 angles. The start is the exact
// solution lifted inside the disk, away from the minimal solution.
inline Manufactured manufactured(double alpha, double lambda, int n_r, int n_theta) {
  Manufactured out;
  out.exact = exact_bubble(alpha, lambda);
  out.problem.alpha1 = alpha;
  out.problem.mesh = liouville::LogPolarMesh{std::log(1e-4), n_r, n_theta};
  auto ex = out.exact;
  out.problem.boundary = [ex](double th) { return ex(std::cos(th), std::sin(th)); };
  const auto init =
      liouville::sample(out.problem.mesh, [ex](double x, double y) { return ex(x, y) + 0.5 * (1.0 - x * x - y * y); });
  out.solution = liouville::solve(out.problem, init);
  return out;
}

}  // namespace testing_support
