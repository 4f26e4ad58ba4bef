/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtb/conic.hpp"
#include "qtb/schur.hpp"

namespace qtb::sdp {

/// A real-embedded ConicProgram in block form. Free variables are split into a difference of
/// two PSD blocks.
struct LoweredProgram {
  SdpData data;
  /// For each program variable, its blocks with sign (+1, or +1/-1 for a free split).
  std::vector<std::vector<std::pair<int, double>>> var_blocks;
};

LoweredProgram lower_program(const ConicProgram& embedded);

struct PresolveResult {
  std::vector<int> keep;      // independent rows, ascending
  bool consistent = true;     // dependent rows agree with the kept right-hand sides
  double worst_mismatch = 0.0;
};

/// Pivoted Cholesky on the row Gram matrix; rows whose normalized residual norm falls below
/// `tol` are dependent.
PresolveResult find_independent_rows(const SdpData& d, double tol = 1e-10);
SdpData restrict_rows(const SdpData& d, const std::vector<int>& keep);

struct IpmResult {
  SolverStatus status = SolverStatus::numerical_failure;
  std::vector<RealMatrix> x;  // unscaled primal blocks
  RealVector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool reduced_accuracy = false;  // accepted under SolverOptions::reduced_tol
  std::string message;
};

/// Infeasible-start primal-dual method with the HKM direction and a Mehrotra
/// predictor-corrector step.
IpmResult run_ipm(const SdpData& d, const SolverOptions& opts);

}  // namespace qtb::sdp
