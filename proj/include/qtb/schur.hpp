/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <vector>

#include "qtb/tensor.hpp"

namespace qtb::sdp {

/// Real symmetric coefficient, both triangles stored.
struct RealCoeff {
  int dim = 0;
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> vals;
  /// Distinct row indices, ascending.
  std::vector<int> support;
  /// Filled when the entry count makes the dense kernel cheaper.
  RealMatrix dense;
  bool use_dense = false;

  std::size_t nnz() const { return vals.size(); }
  void finalize();
  RealMatrix to_dense() const;
  /// tr(A V) = sum a_pq V(q, p).
  double pair(const RealMatrix& v) const;
  double frobenius_sq() const;
};

struct BlockTerm {
  int row = 0;
  double scale = 1.0;
  int coeff = 0;  // index into SdpData::coeffs
};

struct Block {
  int dim = 0;
  std::vector<BlockTerm> terms;  // at most one term per row
  RealMatrix c;                  // objective coefficient (dense)
};

/// min sum <C_b, X_b>  s.t.  sum_b <A_kb, X_b> = b_k,  X_b >= 0.
struct SdpData {
  std::vector<RealCoeff> coeffs;
  std::vector<Block> blocks;
  RealVector b;

  int num_rows() const { return static_cast<int>(b.size()); }
};

/// A(V)_k = sum_b <A_kb, V_b>.
RealVector apply_a(const SdpData& d, const std::vector<RealMatrix>& v, int threads);
/// A^T(y)_b = sum_k y_k A_kb.
std::vector<RealMatrix> apply_at(const SdpData& d, const RealVector& y, int threads);

/// HKM Schur complement M_ij = sum_b tr(A_ib X_b A_jb Zinv_b), parallel over blocks. Thread
/// partial sums are reduced in a fixed order, so the result is reproducible for a fixed
/// thread count.
RealMatrix schur_matrix(const SdpData& d, const std::vector<RealMatrix>& x,
                        const std::vector<RealMatrix>& zinv, int threads);

/// Serial dense reference for the same matrix.
RealMatrix schur_matrix_reference(const SdpData& d, const std::vector<RealMatrix>& x,
                                  const std::vector<RealMatrix>& zinv);

}  // namespace qtb::sdp
