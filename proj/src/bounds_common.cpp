/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qtb/bounds.hpp"

namespace qtb {

WeightMatrix::WeightMatrix(RealMatrix w) : w_(std::move(w)) {
  if (w_.rows() < 1 || w_.rows() != w_.cols()) throw DimensionError("weight matrix must be square and nonempty");
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ContractError("weight matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-12) throw ContractError("weight matrix must be positive semidefinite");
}

WeightMatrix WeightMatrix::identity(int params) { return WeightMatrix(RealMatrix::Identity(params, params)); }

RealMatrix WeightMatrix::augmented() const {
  const int p = params();
  RealMatrix out = RealMatrix::Zero(p + 1, p + 1);
  out.bottomRightCorner(p, p) = w_;
  return out;
}

WeightMatrix WeightMatrix::scaled(double c) const { return WeightMatrix(c * w_); }

RealMatrix coupling_matrix(int params, int i) {
  if (i < 1 || i > params) throw DimensionError("coupling index must lie in 1..p");
  RealMatrix a = RealMatrix::Zero(params + 1, params + 1);
  a(0, i) = a(i, 0) = 0.5;
  return a;
}

ProcessData process_data(const ParamChannelFamily& fam, std::span<const double> theta, int n_uses) {
  const ChoiWithDerivatives single = choi_derivatives(fam, theta);
  ChoiWithDerivatives full = choi_n_fold(single.choi, single.derivatives, n_uses);
  return {std::move(full.choi), std::move(full.derivatives)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<RealVector> sample_unit_vectors(int m, int dim, std::uint64_t seed) {
  if (m < 1 || dim < 1) throw ContractError("sample_unit_vectors needs m >= 1 and dim >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<RealVector> out;
  out.reserve(m);
  while (static_cast<int>(out.size()) < m) {
    RealVector v(dim);
    for (int k = 0; k < dim; ++k) v(k) = normal(gen);
    const double n = v.norm();
    if (n < 1e-300) continue;
    out.push_back(v / n);
  }
  return out;
}

std::string to_string(BoundDirection d) { return d == BoundDirection::upper ? "upper" : "lower"; }

}  // namespace qtb
