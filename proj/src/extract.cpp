/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <random>

#include "qtb/bounds.hpp"

namespace qtb {

namespace {

double outcome_probability(const ComplexMatrix& c, const ComplexMatrix& px) {
  // tr(C P^T) = sum_ab C_ab P_ab
  return (c.array() * px.array()).sum().real();
}

}  // namespace

ExtractedStrategy extract_strategy(const BoundResult& upper, std::span<const double> theta, double eps) {
  if (upper.direction != BoundDirection::upper) throw ContractError("extraction needs an upper-bound result");
  if (!upper.ok()) throw ContractError("extraction needs an optimal solution");
  if (upper.report.primal.size() < upper.vectors.size())
    throw DimensionError("solution does not carry one block per vector");
  ExtractedStrategy es;
  es.strategy = upper.strategy;
  es.theta = Eigen::Map<const RealVector>(theta.data(), static_cast<long>(theta.size()));
  for (std::size_t x = 0; x < upper.vectors.size(); ++x) {
    const RealVector& v = upper.vectors[x];
    if (v.size() != es.theta.size() + 1) throw DimensionError("vector and parameter dimensions disagree");
    const double w0 = v(0);
    if (std::abs(w0) <= eps) {
      es.dropped_indices.push_back(static_cast<int>(x));
      continue;
    }
    es.testers.push_back((w0 * w0) * upper.report.primal[x].transpose());
    es.estimator.push_back(es.theta + v.tail(v.size() - 1) / w0);
    es.kept_indices.push_back(static_cast<int>(x));
  }
  if (es.testers.empty()) throw DegenerateSolutionError("no vector has |<0|w_x>| above the filter threshold");
  return es;
}

StrategyCheck check_strategy(const ExtractedStrategy& es, const ProcessData& pd, const WeightMatrix& w) {
  const int p = pd.params();
  if (es.theta.size() != p || w.params() != p) throw DimensionError("parameter count mismatch");
  StrategyCheck out;
  RealMatrix unb = RealMatrix::Zero(p, p);
  double total = 0.0;
  ComplexMatrix s = ComplexMatrix::Zero(pd.c.matrix.rows(), pd.c.matrix.cols());
  for (std::size_t x = 0; x < es.testers.size(); ++x) {
    const ComplexMatrix& px = es.testers[x];
    const double prob = outcome_probability(pd.c.matrix, px);
    total += prob;
    const RealVector dev = es.estimator[x] - es.theta;
    out.objective += prob * dev.dot(w.matrix() * dev);
    for (int j = 0; j < p; ++j) {
      const double dprob = outcome_probability(pd.dc[j], px);
      for (int i = 0; i < p; ++i) unb(i, j) += dprob * es.estimator[x](i);
    }
    s += px.transpose();
  }
  out.probability_sum_gap = std::abs(total - 1.0);
  out.unbiasedness_residual = (unb - RealMatrix::Identity(p, p)).cwiseAbs().maxCoeff();
  out.membership = membership_residual(s, es.strategy, pd.c.layout);
  return out;
}

MonteCarloResult monte_carlo_validate(const ExtractedStrategy& es, const ComplexMatrix& c, const WeightMatrix& w,
                                      long shots, std::uint64_t seed) {
  if (shots < 2) throw ContractError("Monte Carlo validation needs at least two shots");
  if (es.testers.empty()) throw ContractError("strategy has no outcomes");
  std::vector<double> probs;
  probs.reserve(es.testers.size());
  double total = 0.0;
  for (const auto& px : es.testers) {
    double pr = outcome_probability(c, px);
    if (pr < -1e-9) throw ContractError("outcome probability is negative beyond tolerance");
    pr = std::max(pr, 0.0);
    probs.push_back(pr);
    total += pr;
  }
  if (std::abs(total - 1.0) > 1e-6) throw ContractError("outcome probabilities do not sum to one");
  for (auto& pr : probs) pr /= total;

  std::vector<double> loss(es.testers.size());
  for (std::size_t x = 0; x < loss.size(); ++x) {
    const RealVector dev = es.estimator[x] - es.theta;
    loss[x] = dev.dot(w.matrix() * dev);
  }
  std::mt19937_64 gen(seed);
  std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
  double mean = 0.0, m2 = 0.0;
  for (long k = 1; k <= shots; ++k) {
    const double v = loss[dist(gen)];
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  MonteCarloResult out;
  out.value = mean;
  out.shots = shots;
  out.std_error = std::sqrt(m2 / static_cast<double>(shots - 1)) / std::sqrt(static_cast<double>(shots));
  return out;
}

}  // namespace qtb
