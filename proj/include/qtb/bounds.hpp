/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtb/channels.hpp"
#include "qtb/conic.hpp"
#include "qtb/testers.hpp"

namespace qtb {

/// Raised when a closed-form benchmark is evaluated at sin(|theta| t) = 0.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a requested program exceeds the configured size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Extraction found no vector with a usable <0|w_x> component.
class DegenerateSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WeightMatrix {
 public:
  explicit WeightMatrix(RealMatrix w);
  static WeightMatrix identity(int params);

  int params() const { return static_cast<int>(w_.rows()); }
  const RealMatrix& matrix() const { return w_; }
  /// 0 (+) W on C^{p+1}.
  RealMatrix augmented() const;
  WeightMatrix scaled(double c) const;

 private:
  RealMatrix w_;
};

/// A_i = (|0><i| + |i><0|) / 2 on C^{p+1}, i = 1..p.
RealMatrix coupling_matrix(int params, int i);

/// C = E^{(x)N} and its parameter derivatives on the canonical layout.
struct ProcessData {
  ChoiOperator c;
  std::vector<ComplexMatrix> dc;
  int params() const { return static_cast<int>(dc.size()); }
  int n_uses() const { return static_cast<int>(c.layout.size() / 2); }
};

ProcessData process_data(const ParamChannelFamily& fam, std::span<const double> theta, int n_uses);

/// Independent stream seed for task `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// m i.i.d. uniform points on the real unit sphere in R^dim (normalized Gaussian vectors).
std::vector<RealVector> sample_unit_vectors(int m, int dim, std::uint64_t seed);

struct UpperBoundConfig {
  int m = 125;
  std::uint64_t seed = 1;
  StrategyClass strategy;
  int restarts = 1;
  double filter_eps = 1e-7;
};

struct LowerBoundConfig {
  int n = 2;
  bool ppt = false;
  StrategyClass strategy;
  /// Cap on (p+1)^n d_IO.
  long max_dim = 4096;
  /// Cap on the operator dimension that receives positive-partial-transpose constraints.
  long max_ppt_dim = 64;
  /// Block-diagonalize over the irreps of S_n instead of imposing permutation equalities.
  bool use_symmetry = true;
};

enum class BoundDirection { upper, lower };
std::string to_string(BoundDirection d);

struct ExtractedStrategy {
  std::vector<ComplexMatrix> testers;    // P_x on H_IO
  std::vector<RealVector> estimator;     // theta_hat(x)
  std::vector<int> kept_indices;         // vector indices behind each outcome
  std::vector<int> dropped_indices;      // vectors removed by the <0|w_x> filter
  RealVector theta;
  StrategyClass strategy;
};

struct BoundResult {
  double value = 0.0;
  BoundDirection direction = BoundDirection::upper;
  SolverReport report;
  // Configuration echo.
  StrategyClass strategy;
  int m_or_n = 0;
  std::uint64_t seed = 0;  // stream seed of the reported vectors (upper)
  bool ppt = false;
  int attempts = 0;        // solves performed, including restarts and resamples
  std::vector<RealVector> vectors;
  std::string note;

  bool ok() const { return report.status == SolverStatus::optimal; }
};

ConicProgram build_upper_program(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                                 const std::vector<RealVector>& vectors);
/// Split-variable program for causal superposition (N = 2).
ConicProgram build_upper_program_csup(const ProcessData& pd, const WeightMatrix& w,
                                      const UpperBoundConfig& cfg, const std::vector<RealVector>& vectors);
ConicProgram build_lower_program(const ProcessData& pd, const WeightMatrix& w, const LowerBoundConfig& cfg);

/// Solves with the given vectors (no restarts or resampling).
BoundResult solve_upper(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                        const std::vector<RealVector>& vectors, const SolverOptions& opts = {});

/// Best of cfg.restarts independent vector sets; an infeasible set is resampled once.
BoundResult compute_upper(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                          const SolverOptions& opts = {});
BoundResult compute_upper(const ParamChannelFamily& fam, std::span<const double> theta, int n_uses,
                          const WeightMatrix& w, const UpperBoundConfig& cfg, const SolverOptions& opts = {});
BoundResult compute_lower(const ProcessData& pd, const WeightMatrix& w, const LowerBoundConfig& cfg,
                          const SolverOptions& opts = {});
BoundResult compute_lower(const ParamChannelFamily& fam, std::span<const double> theta, int n_uses,
                          const WeightMatrix& w, const LowerBoundConfig& cfg, const SolverOptions& opts = {});

/// Tester and estimator behind an optimal upper-bound solution.
ExtractedStrategy extract_strategy(const BoundResult& upper, std::span<const double> theta, double eps = 1e-7);

struct StrategyCheck {
  double probability_sum_gap = 0.0;   // |sum_x p(x) - 1|
  double unbiasedness_residual = 0.0; // max_ij |sum_x d_j p(x) theta_hat_i(x) - delta_ij|
  double objective = 0.0;             // sum_x p(x) (theta_hat - theta)^T W (theta_hat - theta)
  MembershipResidual membership;
};

StrategyCheck check_strategy(const ExtractedStrategy& es, const ProcessData& pd, const WeightMatrix& w);

struct MonteCarloResult {
  double value = 0.0;
  double std_error = 0.0;
  long shots = 0;
};

/// Samples outcomes from p(x) = tr(C P_x^T) and averages (theta_hat - theta)^T W (theta_hat - theta).
MonteCarloResult monte_carlo_validate(const ExtractedStrategy& es, const ComplexMatrix& c,
                                      const WeightMatrix& w, long shots, std::uint64_t seed = 7);

/// tr(Sigma) of the heuristic probe states for the three-axis field, W = identity.
double heuristic_error(std::span<const double> theta, double t, int n_uses);
/// Closed-form lower bound for parallel strategies on the three-axis field, W = identity.
double analytic_parallel_lower_bound(std::span<const double> theta, double t, int n_uses);

}  // namespace qtb
