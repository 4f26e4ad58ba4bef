/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <vector>

#include "qtb/tensor.hpp"

namespace qtb {

using Partition = std::vector<int>;
/// Rows of entries 1..n.
using Tableau = std::vector<std::vector<int>>;

/// Partitions of n in reverse lexicographic order, (n) first.
std::vector<Partition> partitions(int n);
std::vector<Tableau> standard_tableaux(const Partition& shape);

/// Young's orthogonal form of the adjacent transposition exchanging copies g and g+1
/// (0-based), one matrix per g = 0..n-2, in the basis of standard_tableaux(shape).
std::vector<RealMatrix> young_generators(const Partition& shape);

/// A permutation together with its irrep matrix.
struct GroupElement {
  std::vector<int> perm;  // same convention as permutation_operator
  RealMatrix rho;
};

/// All n! elements, generated as words in the adjacent transpositions.
std::vector<GroupElement> young_representation(const Partition& shape);

/// Isotypic component of (C^dim)^{(x)copies} under permutations of the copies.
/// v[k] is an isometry (dim^copies x multiplicity) onto the k-th copy of the multiplicity
/// space; permutation-invariant operators are exactly sum_k v[k] B v[k]^T (x) (...).
struct IsotypicBlock {
  Partition shape;
  int irrep_dim = 0;
  int multiplicity = 0;
  std::vector<RealMatrix> v;
};

/// Components with nonzero multiplicity. The isometries are built orbit by orbit over
/// letter multisets, so they stay sparse in the computational basis.
std::vector<IsotypicBlock> isotypic_decomposition(int copies, int dim);

/// sum_k v[k]^T f v[k], the compression of an operator on (C^dim)^{(x)copies}.
RealMatrix compress(const IsotypicBlock& block, const RealMatrix& f);

}  // namespace qtb
