/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>

#include "qtb/bounds.hpp"

namespace qtb {

namespace {

void check_args(std::span<const double> theta, double t, int n_uses) {
  if (theta.size() != 3) throw DimensionError("the closed forms describe the three-axis field");
  if (!(t > 0.0)) throw ContractError("evolution time must be positive");
  if (n_uses < 1) throw ContractError("N must be at least 1");
}

double norm(std::span<const double> theta) {
  double s = 0.0;
  for (double v : theta) s += v * v;
  return std::sqrt(s);
}

// x / |sin x|, with the x -> 0 limit.
double x_over_sin(double x) {
  if (x == 0.0) return 1.0;
  const double s = std::abs(std::sin(x));
  if (s < 1e-12) throw SingularityError("sin(|theta| t) vanishes");
  return std::abs(x) / s;
}

}  // namespace

double heuristic_error(std::span<const double> theta, double t, int n_uses) {
  check_args(theta, t, n_uses);
  const double r = x_over_sin(norm(theta) * t);
  const double nn = static_cast<double>(n_uses);
  // 2 |theta|^2 / sin^2(|theta| t) = 2 r^2 / t^2
  return 3.0 / (4.0 * nn * (nn + 2.0)) * (1.0 + 2.0 * r * r) / (t * t);
}

double analytic_parallel_lower_bound(std::span<const double> theta, double t, int n_uses) {
  check_args(theta, t, n_uses);
  const double r = x_over_sin(norm(theta) * t);
  const double nn = static_cast<double>(n_uses);
  return (1.0 + 2.0 * r) * (1.0 + 2.0 * r) / (4.0 * nn * (nn + 2.0) * t * t);
}

}  // namespace qtb
