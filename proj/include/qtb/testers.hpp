/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>
#include <vector>

#include "qtb/conic.hpp"
#include "qtb/tensor.hpp"

namespace qtb {

enum class StrategyKind { parallel, sequential, causal_superposition, general_ico };

struct StrategyClass {
  StrategyKind kind = StrategyKind::parallel;
  int n_uses = 1;

  StrategyClass() = default;
  StrategyClass(StrategyKind k, int n);
};

/// "parallel" | "sequential" | "causal-superposition" | "general-ico"
std::string to_token(StrategyKind k);
StrategyKind parse_strategy(const std::string& token);
/// Roman label used in reports: i, ii, iii, iv.
std::string roman(StrategyKind k);

struct SignedWord {
  double coefficient = 1.0;
  SuperopWord word;
};

/// Linear map written as a signed sum of commuting-literal words.
class LambdaMap {
 public:
  LambdaMap() = default;
  LambdaMap(SubsystemLayout layout, std::vector<SignedWord> terms);

  const SubsystemLayout& layout() const { return layout_; }
  const std::vector<SignedWord>& terms() const { return terms_; }
  ComplexMatrix apply(const ComplexMatrix& x) const;
  /// (Id - Lambda)(x)
  ComplexMatrix complement(const ComplexMatrix& x) const;
  std::string to_string() const;

 private:
  SubsystemLayout layout_;
  std::vector<SignedWord> terms_;
};

/// The convex set { X >= 0 : Lambda(X) = X, tr X = d_O }. For causal superposition the set is
/// the cone sum of two sequential orders; `orders` then holds one map per order.
struct TesterConstraintSet {
  StrategyClass strategy;
  std::vector<LambdaMap> orders;  // one entry for i, ii, iv; two (1<2, 2<1) for iii
  double trace_value = 1.0;       // d_O
  SubsystemLayout layout;
};

/// Sequential map for a given query order (0-based channel indices, earliest first).
LambdaMap sequential_map(const SubsystemLayout& layout, const std::vector<int>& order);

LambdaMap lambda_map(const StrategyClass& sc, const SubsystemLayout& layout);

/// Two per-order maps for causal superposition with N = 2: [Lambda^(1<2), Lambda^(2<1)].
std::vector<LambdaMap> causal_orders(const StrategyClass& sc, const SubsystemLayout& layout);

TesterConstraintSet tester_constraints(const StrategyClass& sc, const SubsystemLayout& layout);

struct MembershipResidual {
  double residual_norm = 0.0;  // ||(Id - Lambda)(x)||_F, or the best split residual for iii
  double trace_gap = 0.0;      // |tr x - d_O|
  double min_eigenvalue = 0.0;

  bool member(double tol = 1e-8) const {
    return residual_norm <= tol && trace_gap <= tol && min_eigenvalue >= -tol;
  }
};

/// Membership test. For causal superposition, the decomposition x = x12 + x21 with each part
/// fixed by its order map is searched by a small SDP; the reported residual is that of the
/// split (0 when a feasible split exists).
MembershipResidual membership_residual(const ComplexMatrix& x, const StrategyClass& sc,
                                       const SubsystemLayout& layout);

/// d_O for the canonical layout.
double output_dimension(const SubsystemLayout& layout);

/// Coefficients F_k = (Id - Lambda)(B_k) for a maximal linearly independent subset of the
/// Hermitian coordinate basis. Since Lambda is a self-adjoint projector, tr(F_k T) = 0 for
/// all returned k is equivalent to (Id - Lambda)(T) = 0.
std::vector<CoeffPtr> complement_functionals(const LambdaMap& map, long d);

}  // namespace qtb
