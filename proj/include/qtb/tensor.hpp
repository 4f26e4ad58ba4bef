/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qtb {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;

/// Raised when a factor label or dimension does not fit a layout.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a precondition on the input data is violated.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);
bool is_psd(const ComplexMatrix& m, double tol = kDefaultTol);
double min_eigenvalue(const ComplexMatrix& hermitian);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_power(const ComplexMatrix& a, int n);

struct Factor {
  std::string label;
  int dim = 1;
  bool operator==(const Factor&) const = default;
};

using LabelSet = std::set<std::string>;

/// Ordered tensor factorization of a Hilbert space. Factors are addressed by
/// label; the order is fixed at construction.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  explicit SubsystemLayout(std::vector<Factor> factors);

  /// I_1, O_1, ..., I_n, O_n.
  static SubsystemLayout canonical(int n_uses, int d_in, int d_out);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  long total_dim() const { return total_dim_; }
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const;
  int dim_of(const std::string& label) const { return factors_[index_of(label)].dim; }
  long dim_of(const LabelSet& labels) const;
  /// Layout with the given factors removed, order preserved.
  SubsystemLayout without(const LabelSet& labels) const;
  /// Concatenation; labels must stay unique.
  SubsystemLayout then(const SubsystemLayout& tail) const;

  bool operator==(const SubsystemLayout&) const = default;

 private:
  std::vector<Factor> factors_;
  long total_dim_ = 1;
};

struct Reduced {
  ComplexMatrix matrix;
  SubsystemLayout layout;
};

Reduced partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout, const LabelSet& over);

/// tr_Q(m) (x) I_Q / d_Q, re-embedded at the original factor positions.
ComplexMatrix trace_and_replace(const ComplexMatrix& m, const SubsystemLayout& layout,
                                const LabelSet& q);

/// One factor of a superoperator word: D_Q or (Id - D_Q).
struct Literal {
  enum class Kind { replace, complement };
  Kind kind = Kind::replace;
  LabelSet factors;

  static Literal replace(LabelSet q) { return {Kind::replace, std::move(q)}; }
  static Literal complement(LabelSet q) { return {Kind::complement, std::move(q)}; }
};

/// Formal product of commuting literals. Factor sets must be pairwise disjoint.
class SuperopWord {
 public:
  SuperopWord() = default;
  explicit SuperopWord(std::vector<Literal> literals);

  const std::vector<Literal>& literals() const { return literals_; }
  bool empty() const { return literals_.empty(); }
  std::string to_string() const;

 private:
  std::vector<Literal> literals_;
};

ComplexMatrix apply_word(const SuperopWord& w, const ComplexMatrix& m, const SubsystemLayout& layout);

/// Unitary on (C^d)^{(x)copies} sending |i_1..i_n> to |i_{pi^-1(1)}..i_{pi^-1(n)}>.
/// `perm` is 0-based: the digit at position j moves to position perm[j].
ComplexMatrix permutation_operator(int copies, int dim_per_copy, const std::vector<int>& perm);

/// Index map of the same permutation: basis index a goes to result[a].
std::vector<long> permutation_index_map(int copies, int dim_per_copy, const std::vector<int>& perm);

/// Random Hermitian matrix with entries of order one, for tests and benchmarks.
ComplexMatrix random_hermitian(long dim, unsigned long long seed);

}  // namespace qtb
