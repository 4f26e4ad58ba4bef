/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "qtb/bounds.hpp"
#include "qtb/symmetry.hpp"

namespace qtb {

namespace {

constexpr double kDropTol = 1e-14;

long ipow(long b, int e) {
  long r = 1;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

std::string shape_name(const Partition& s) {
  std::ostringstream os;
  os << "Y[";
  for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
  os << "]";
  return os.str();
}

// Transpose of the factors listed in `mask` on (C^q)^{(x)n} (x) C^d, digits most significant first.
CoeffPtr partial_transpose(const HermCoeff& g, int n, long q, long d, const std::vector<bool>& mask) {
  std::vector<long> stride(n);
  for (int j = 0; j < n; ++j) stride[j] = ipow(q, n - 1 - j) * d;
  auto out = std::make_shared<HermCoeff>();
  out->dim = g.dim;
  for (const auto& e : g.entries) {
    long a = e.row, b = e.col;
    for (int j = 0; j < n; ++j) {
      if (!mask[j]) continue;
      const long da = (e.row / stride[j]) % q, db = (e.col / stride[j]) % q;
      a += (db - da) * stride[j];
      b += (da - db) * stride[j];
    }
    out->entries.push_back({static_cast<int>(a), static_cast<int>(b), e.value});
  }
  return out;
}

// Parametrization of the permutation-invariant operator Y_n on (C^{p+1})^{(x)n} (x) H_IO.
class SymmetricOperator {
 public:
  SymmetricOperator(ConicProgram& prog, int n, int q, long d, bool use_symmetry)
      : n_(n), q_(q), d_(d), use_symmetry_(use_symmetry) {
    if (use_symmetry_) {
      blocks_ = isotypic_decomposition(n, q);
      for (const auto& b : blocks_) vars_.push_back(prog.add_variable(shape_name(b.shape), b.multiplicity * d, Cone::psd));
    } else {
      vars_.push_back(prog.add_variable("Y", ipow(q, n) * d, Cone::psd));
    }
  }

  const std::vector<int>& vars() const { return vars_; }
  long full_dim() const { return ipow(q_, n_) * d_; }

  /// Coefficients per variable for tr((I^{(x)(n-1)} (x) f (x) h) Y_n).
  std::vector<CoeffPtr> last_copy(const RealMatrix& f, const ComplexMatrix& h) {
    const RealMatrix fq = kron(ComplexMatrix::Identity(ipow(q_, n_ - 1), ipow(q_, n_ - 1)), f.cast<cplx>()).real();
    std::vector<CoeffPtr> out;
    if (!use_symmetry_) {
      out.push_back(HermCoeff::from_dense(kron(fq.cast<cplx>(), h), kDropTol));
      return out;
    }
    for (const auto& b : blocks_) out.push_back(HermCoeff::from_dense(kron(compress(b, fq).cast<cplx>(), h), kDropTol));
    return out;
  }

  /// Coefficients per variable for tr(G Y_n) with G on the full space.
  std::vector<CoeffPtr> general(const CoeffPtr& g) {
    if (!use_symmetry_) return {g};
    if (ext_.empty())
      for (const auto& b : blocks_) {
        std::vector<RealMatrix> e;
        for (const auto& v : b.v) e.push_back(kron(v.cast<cplx>(), ComplexMatrix::Identity(d_, d_)).real());
        ext_.push_back(std::move(e));
      }
    std::vector<CoeffPtr> out;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const long dim = blocks_[k].multiplicity * d_;
      ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
      for (const auto& e : ext_[k])
        for (const auto& en : g->entries)
          acc += en.value * (e.row(en.row).transpose() * e.row(en.col)).cast<cplx>();
      out.push_back(HermCoeff::from_dense(hermitian_part(acc), kDropTol));
    }
    return out;
  }

  /// Largest PSD block of the parametrization.
  long largest_block() const {
    long best = 0;
    for (const auto& b : blocks_) best = std::max(best, static_cast<long>(b.multiplicity) * d_);
    return use_symmetry_ ? best : full_dim();
  }

  /// Y_n^{T_S} >= 0 with S all copies. The isometries are real, so this transpose acts on each
  /// block as the transpose of its multiplicity factor.
  void add_full_transpose(ConicProgram& prog) const {
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const long outer = use_symmetry_ ? blocks_[k].multiplicity : ipow(q_, n_);
      const long dim = outer * d_;
      const int qv = prog.add_variable("Q" + std::to_string(n_) + ":" + prog.variables()[vars_[k]].name, dim,
                                       Cone::psd);
      for (const auto& f : hermitian_dof_functionals(dim)) {
        const int row = prog.add_constraint(0.0, "ppt " + std::to_string(n_));
        prog.add_term(row, qv, 1.0, f);
        prog.add_term(row, vars_[k], -1.0, partial_transpose(*f, 1, outer, d_, {true}));
      }
    }
  }

  void add_terms(ConicProgram& prog, int row, double scale, const std::vector<CoeffPtr>& coeffs) const {
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (!coeffs[k]->entries.empty()) prog.add_term(row, vars_[k], scale, coeffs[k]);
  }

  void add_objective(ConicProgram& prog, const std::vector<CoeffPtr>& coeffs) const {
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (!coeffs[k]->entries.empty()) prog.add_objective_term(vars_[k], 1.0, coeffs[k]);
  }

 private:
  int n_;
  int q_;
  long d_;
  bool use_symmetry_;
  std::vector<IsotypicBlock> blocks_;
  std::vector<int> vars_;
  std::vector<std::vector<RealMatrix>> ext_;
};

}  // namespace

ConicProgram build_lower_program(const ProcessData& pd, const WeightMatrix& w, const LowerBoundConfig& cfg) {
  const int p = pd.params();
  if (p < 1) throw ContractError("at least one parameter is required");
  if (w.params() != p) throw DimensionError("weight matrix size does not match the parameter count");
  if (cfg.n < 1) throw ContractError("lower bound needs n >= 1");
  if (cfg.strategy.n_uses != pd.n_uses()) throw DimensionError("strategy and process disagree on N");
  const int q = p + 1;
  const long d = pd.c.matrix.rows();
  const long full = ipow(q, cfg.n) * d;
  if (full > cfg.max_dim) {
    std::ostringstream os;
    os << "lower program needs (p+1)^n d_IO = " << full << " > max_dim = " << cfg.max_dim;
    throw CapacityError(os.str());
  }

  ConicProgram prog;
  SymmetricOperator y(prog, cfg.n, q, d, cfg.use_symmetry);
  if (cfg.ppt) {
    // Proper copy subsets act on the full space; the full transpose stays block diagonal.
    const long needed = cfg.n >= 2 ? full : y.largest_block();
    if (needed > cfg.max_ppt_dim) {
      std::ostringstream os;
      os << "PPT constraints need an operator of dimension " << needed << " > max_ppt_dim = " << cfg.max_ppt_dim;
      throw CapacityError(os.str());
    }
  }

  y.add_objective(prog, y.last_copy(w.augmented(), pd.c.matrix));

  for (int i = 1; i <= p; ++i) {
    const RealMatrix a = coupling_matrix(p, i);
    for (int j = 1; j <= p; ++j) {
      const int row = prog.add_constraint(i == j ? 1.0 : 0.0,
                                          "unbiased " + std::to_string(i) + "," + std::to_string(j));
      y.add_terms(prog, row, 1.0, y.last_copy(a, pd.dc[j - 1]));
    }
  }

  // The |0><0| sector of the last copy, reduced to H_IO, lies in the tester set.
  RealMatrix e00 = RealMatrix::Zero(q, q);
  e00(0, 0) = 1.0;
  const TesterConstraintSet tcs = tester_constraints(cfg.strategy, pd.c.layout);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  if (cfg.strategy.kind == StrategyKind::causal_superposition) {
    if (pd.n_uses() != 2) throw ContractError("causal superposition is supported for N = 2 only");
    const int x12 = prog.add_variable("X12", d, Cone::psd);
    const int x21 = prog.add_variable("X21", d, Cone::psd);
    for (const auto& b : hermitian_dof_functionals(d)) {
      const int row = prog.add_constraint(0.0, "split");
      y.add_terms(prog, row, 1.0, y.last_copy(e00, b->to_dense()));
      prog.add_term(row, x12, -1.0, b);
      prog.add_term(row, x21, -1.0, b);
    }
    const int parts[2] = {x12, x21};
    for (int k = 0; k < 2; ++k)
      for (const auto& f : complement_functionals(tcs.orders[k], d)) {
        const int row = prog.add_constraint(0.0, k == 0 ? "invariance 1<2" : "invariance 2<1");
        prog.add_term(row, parts[k], 1.0, f);
      }
    const int tr = prog.add_constraint(tcs.trace_value, "trace");
    const CoeffPtr idc = HermCoeff::from_dense(id);
    prog.add_term(tr, x12, 1.0, idc);
    prog.add_term(tr, x21, 1.0, idc);
  } else {
    for (const auto& f : complement_functionals(tcs.orders.front(), d)) {
      const int row = prog.add_constraint(0.0, "invariance");
      y.add_terms(prog, row, 1.0, y.last_copy(e00, f->to_dense()));
    }
    const int tr = prog.add_constraint(tcs.trace_value, "trace");
    y.add_terms(prog, tr, 1.0, y.last_copy(e00, id));
  }

  // Explicit formulation: U_g Y U_g^T = Y for the adjacent transpositions.
  if (!cfg.use_symmetry && cfg.n >= 2) {
    const auto functionals = hermitian_dof_functionals(full);
    for (int g = 0; g + 1 < cfg.n; ++g) {
      std::vector<int> perm(cfg.n);
      for (int j = 0; j < cfg.n; ++j) perm[j] = j;
      std::swap(perm[g], perm[g + 1]);
      const auto map = permutation_index_map(cfg.n, q, perm);
      auto moved = [&](long i) { return map[i / d] * d + i % d; };
      for (const auto& f : functionals) {
        std::map<std::pair<long, long>, cplx> acc;
        for (const auto& e : f->entries) {
          acc[{moved(e.row), moved(e.col)}] += e.value;
          acc[{e.row, e.col}] -= e.value;
        }
        auto c = std::make_shared<HermCoeff>();
        c->dim = full;
        for (const auto& [rc, v] : acc)
          if (std::abs(v) > kDropTol) c->entries.push_back({static_cast<int>(rc.first), static_cast<int>(rc.second), v});
        if (c->entries.empty()) continue;
        const int row = prog.add_constraint(0.0, "symmetric");
        y.add_terms(prog, row, 1.0, y.general(c));
      }
    }
  }

  // Y_n^{T_S} >= 0 with S the first s copies; by symmetry every subset of size s is covered.
  if (cfg.ppt) {
    for (int s = 1; s < cfg.n; ++s) {
      std::vector<bool> mask(cfg.n, false);
      for (int j = 0; j < s; ++j) mask[j] = true;
      const int qs = prog.add_variable("Q" + std::to_string(s), full, Cone::psd);
      for (const auto& f : hermitian_dof_functionals(full)) {
        const int row = prog.add_constraint(0.0, "ppt " + std::to_string(s));
        prog.add_term(row, qs, 1.0, f);
        y.add_terms(prog, row, -1.0, y.general(partial_transpose(*f, cfg.n, q, d, mask)));
      }
    }
    y.add_full_transpose(prog);
  }

  prog.notes()["kind"] = "lower";
  prog.notes()["strategy"] = to_token(cfg.strategy.kind);
  prog.notes()["n"] = std::to_string(cfg.n);
  prog.notes()["ppt"] = cfg.ppt ? "true" : "false";
  prog.notes()["symmetry"] = cfg.use_symmetry ? "reduced" : "explicit";
  return prog;
}

BoundResult compute_lower(const ProcessData& pd, const WeightMatrix& w, const LowerBoundConfig& cfg,
                          const SolverOptions& opts) {
  const ConicProgram prog = build_lower_program(pd, w, cfg);
  BoundResult res;
  res.direction = BoundDirection::lower;
  res.strategy = cfg.strategy;
  res.m_or_n = cfg.n;
  res.ppt = cfg.ppt;
  res.attempts = 1;
  res.report = solve(prog, opts);
  res.value = res.ok() ? res.report.objective_value : std::numeric_limits<double>::quiet_NaN();
  return res;
}

BoundResult compute_lower(const ParamChannelFamily& fam, std::span<const double> theta, int n_uses,
                          const WeightMatrix& w, const LowerBoundConfig& cfg, const SolverOptions& opts) {
  return compute_lower(process_data(fam, theta, n_uses), w, cfg, opts);
}

}  // namespace qtb
