/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qtb/tensor.hpp"

namespace qtb {

enum class Cone { psd, free };

/// Sparse Hermitian coefficient matrix, both triangles stored.
struct HermCoeff {
  struct Entry {
    int row;
    int col;
    cplx value;
  };
  long dim = 0;
  std::vector<Entry> entries;

  static std::shared_ptr<const HermCoeff> from_dense(const ComplexMatrix& m, double drop_tol = 0.0);
  ComplexMatrix to_dense() const;
  /// Re tr(F m).
  double pair(const ComplexMatrix& m) const;
  double frobenius_norm() const;
  bool is_real() const;
};

using CoeffPtr = std::shared_ptr<const HermCoeff>;

struct Term {
  int var = 0;
  double scale = 1.0;
  CoeffPtr coeff;
};

struct Equality {
  std::vector<Term> terms;
  double rhs = 0.0;
  std::string tag;
};

struct Variable {
  std::string name;
  long dim = 0;
  Cone cone = Cone::psd;
};

/// Minimize sum tr(G_v v) subject to sum tr(F_{c,v} v) = b_c, v in its cone.
/// Variables are Hermitian matrices; all coefficient data is Hermitian.
class ConicProgram {
 public:
  int add_variable(std::string name, long dim, Cone cone);
  void add_objective_term(int var, double scale, CoeffPtr coeff);
  int add_constraint(double rhs, std::string tag = {});
  void add_term(int row, int var, double scale, CoeffPtr coeff);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Term>& objective() const { return objective_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  int find_variable(const std::string& name) const;

  double objective_value(const std::vector<ComplexMatrix>& assignment) const;
  double constraint_value(int row, const std::vector<ComplexMatrix>& assignment) const;
  /// max_c |value_c - b_c|.
  double max_residual(const std::vector<ComplexMatrix>& assignment) const;

  /// Throws ContractError on non-Hermitian data or dimension mismatches.
  void validate(double tol = 1e-12) const;

  bool real_embedded() const { return real_embedded_; }
  std::map<std::string, std::string>& notes() { return notes_; }
  const std::map<std::string, std::string>& notes() const { return notes_; }

 private:
  friend ConicProgram real_embed(const ConicProgram& p);
  std::vector<Variable> variables_;
  std::vector<Term> objective_;
  std::vector<Equality> equalities_;
  std::map<std::string, std::string> notes_;
  bool real_embedded_ = false;
};

/// M -> [[Re M, -Im M], [Im M, Re M]].
RealMatrix embed_matrix(const ComplexMatrix& m);
/// Inverse of embed_matrix, averaging the redundant blocks.
ComplexMatrix deembed_matrix(const RealMatrix& r);

/// Complex Hermitian variables of dimension d become real symmetric variables of dimension 2d;
/// each coefficient F becomes embed(F) with its term scaled by 1/2, so tr(F M) =
/// (1/2) tr(embed(F) embed(M)) and every objective and constraint value is preserved.
ConicProgram real_embed(const ConicProgram& p);
std::vector<RealMatrix> embed_assignment(const std::vector<ComplexMatrix>& values);
std::vector<ComplexMatrix> deembed_assignment(const std::vector<RealMatrix>& values);

// ---------------------------------------------------------------------------
// Hermitian coordinates. dofs(x) lists x_pp, sqrt2 Re x_pq, sqrt2 Im x_pq (p < q); this is an
// isometry from the Frobenius norm and basis element k satisfies tr(B_k x) = dofs(x)_k.

std::vector<ComplexMatrix> hermitian_dof_basis(long d);
std::vector<CoeffPtr> hermitian_dof_functionals(long d);
RealVector hermitian_dofs(const ComplexMatrix& x);
ComplexMatrix from_hermitian_dofs(const RealVector& v, long d);

// ---------------------------------------------------------------------------
// Solver contract

enum class SolverStatus { optimal, infeasible, unbounded, numerical_failure };
std::string to_string(SolverStatus s);

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-8;
  /// A run that breaks down (stalled steps, lost definiteness, iteration cap) is still reported
  /// optimal when its best iterate meets this looser tolerance on all three measures.
  double reduced_tol = 1e-5;
  int max_iterations = 120;
  /// Fixed reduction order in the parallel kernels.
  bool deterministic = true;
  /// 0: BOUNDS_SOLVER_THREADS if set, else the OpenMP default.
  int threads = 0;
  bool presolve = true;
  bool verbose = false;
};

struct SolverReport {
  SolverStatus status = SolverStatus::numerical_failure;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  std::vector<ComplexMatrix> primal;  // one value per program variable
  double max_residual = 0.0;          // max_c |value_c - b_c| / max(1, ||row_c||_F), program as passed
  double primal_infeasibility = 0.0;  // relative, solver scaling
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  double wall_time = 0.0;
  int iterations = 0;
  int removed_rows = 0;
  std::string message;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual SolverReport solve(const ConicProgram& p, const SolverOptions& opts) const = 0;
};

/// Primal-dual interior-point backend (HKM direction, Mehrotra predictor-corrector).
class InteriorPointBackend : public SolverBackend {
 public:
  std::string name() const override { return "qtb-ipm"; }
  SolverReport solve(const ConicProgram& p, const SolverOptions& opts) const override;
};

/// Solve with the default backend.
SolverReport solve(const ConicProgram& p, const SolverOptions& opts = {});

/// Sparse SDPA text of the real-embedded program, in SDPA's dual form (F0 = -objective).
/// Free variables are written as the difference of two PSD blocks.
void write_sdpa(const ConicProgram& p, std::ostream& os);

/// Threads used by the solver kernels for the given options.
int solver_threads(const SolverOptions& opts);

}  // namespace qtb
