/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <limits>

#include "qtb/bounds.hpp"

namespace qtb {

namespace {

void check_upper_inputs(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                        const std::vector<RealVector>& vectors) {
  const int p = pd.params();
  if (p < 1) throw ContractError("at least one parameter is required");
  if (w.params() != p) throw DimensionError("weight matrix size does not match the parameter count");
  if (cfg.m < p + 1) throw ContractError("upper bound needs m >= p + 1 vectors");
  if (static_cast<int>(vectors.size()) != cfg.m) throw DimensionError("vector count does not match m");
  for (const auto& v : vectors)
    if (v.size() != p + 1) throw DimensionError("vectors must live in R^{p+1}");
  if (cfg.strategy.n_uses != pd.n_uses()) throw DimensionError("strategy and process disagree on N");
}

struct TesterBlocks {
  std::vector<int> vars;
  CoeffPtr c;
  std::vector<CoeffPtr> dc;
};

// Variables X_x, the objective and the unbiasedness rows shared by both upper programs.
TesterBlocks add_tester_blocks(ConicProgram& prog, const ProcessData& pd, const WeightMatrix& w,
                               const std::vector<RealVector>& vectors) {
  const int p = pd.params();
  const long d = pd.c.matrix.rows();
  const RealMatrix wt = w.augmented();
  TesterBlocks tb;
  tb.c = HermCoeff::from_dense(pd.c.matrix);
  for (const auto& dcj : pd.dc) tb.dc.push_back(HermCoeff::from_dense(dcj));

  for (std::size_t x = 0; x < vectors.size(); ++x) {
    const int v = prog.add_variable("X" + std::to_string(x), d, Cone::psd);
    tb.vars.push_back(v);
    const double s = vectors[x].dot(wt * vectors[x]);
    if (s != 0.0) prog.add_objective_term(v, s, tb.c);
  }
  for (int i = 1; i <= p; ++i)
    for (int j = 1; j <= p; ++j) {
      const int row = prog.add_constraint(i == j ? 1.0 : 0.0,
                                          "unbiased " + std::to_string(i) + "," + std::to_string(j));
      for (std::size_t x = 0; x < vectors.size(); ++x) {
        const double s = vectors[x](0) * vectors[x](i);
        if (s != 0.0) prog.add_term(row, tb.vars[x], s, tb.dc[j - 1]);
      }
    }
  return tb;
}

CoeffPtr identity_coeff(long d) { return HermCoeff::from_dense(ComplexMatrix::Identity(d, d)); }

}  // namespace

ConicProgram build_upper_program(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                                 const std::vector<RealVector>& vectors) {
  if (cfg.strategy.kind == StrategyKind::causal_superposition)
    throw ContractError("causal superposition uses build_upper_program_csup");
  check_upper_inputs(pd, w, cfg, vectors);
  const long d = pd.c.matrix.rows();
  ConicProgram prog;
  const TesterBlocks tb = add_tester_blocks(prog, pd, w, vectors);

  // sum_x |<w_x|0>|^2 X_x in the tester set.
  const TesterConstraintSet tcs = tester_constraints(cfg.strategy, pd.c.layout);
  for (const auto& f : complement_functionals(tcs.orders.front(), d)) {
    const int row = prog.add_constraint(0.0, "invariance");
    for (std::size_t x = 0; x < vectors.size(); ++x) {
      const double s = vectors[x](0) * vectors[x](0);
      if (s != 0.0) prog.add_term(row, tb.vars[x], s, f);
    }
  }
  const int tr = prog.add_constraint(tcs.trace_value, "trace");
  const CoeffPtr id = identity_coeff(d);
  for (std::size_t x = 0; x < vectors.size(); ++x) {
    const double s = vectors[x](0) * vectors[x](0);
    if (s != 0.0) prog.add_term(tr, tb.vars[x], s, id);
  }
  prog.notes()["kind"] = "upper";
  prog.notes()["strategy"] = to_token(cfg.strategy.kind);
  prog.notes()["m"] = std::to_string(cfg.m);
  return prog;
}

ConicProgram build_upper_program_csup(const ProcessData& pd, const WeightMatrix& w,
                                      const UpperBoundConfig& cfg, const std::vector<RealVector>& vectors) {
  if (cfg.strategy.kind != StrategyKind::causal_superposition)
    throw ContractError("build_upper_program_csup requires the causal-superposition class");
  if (pd.n_uses() != 2) throw ContractError("causal superposition is supported for N = 2 only");
  check_upper_inputs(pd, w, cfg, vectors);
  const long d = pd.c.matrix.rows();
  ConicProgram prog;
  const TesterBlocks tb = add_tester_blocks(prog, pd, w, vectors);
  const int x12 = prog.add_variable("X12", d, Cone::psd);
  const int x21 = prog.add_variable("X21", d, Cone::psd);

  // sum_x |<w_x|0>|^2 X_x = X12 + X21, coordinate by coordinate.
  for (const auto& b : hermitian_dof_functionals(d)) {
    const int row = prog.add_constraint(0.0, "split");
    for (std::size_t x = 0; x < vectors.size(); ++x) {
      const double s = vectors[x](0) * vectors[x](0);
      if (s != 0.0) prog.add_term(row, tb.vars[x], s, b);
    }
    prog.add_term(row, x12, -1.0, b);
    prog.add_term(row, x21, -1.0, b);
  }
  const TesterConstraintSet tcs = tester_constraints(cfg.strategy, pd.c.layout);
  const int parts[2] = {x12, x21};
  for (int k = 0; k < 2; ++k)
    for (const auto& f : complement_functionals(tcs.orders[k], d)) {
      const int row = prog.add_constraint(0.0, k == 0 ? "invariance 1<2" : "invariance 2<1");
      prog.add_term(row, parts[k], 1.0, f);
    }
  const int tr = prog.add_constraint(tcs.trace_value, "trace");
  const CoeffPtr id = identity_coeff(d);
  prog.add_term(tr, x12, 1.0, id);
  prog.add_term(tr, x21, 1.0, id);
  prog.notes()["kind"] = "upper";
  prog.notes()["strategy"] = to_token(cfg.strategy.kind);
  prog.notes()["m"] = std::to_string(cfg.m);
  return prog;
}

BoundResult solve_upper(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                        const std::vector<RealVector>& vectors, const SolverOptions& opts) {
  const ConicProgram prog = cfg.strategy.kind == StrategyKind::causal_superposition
                                ? build_upper_program_csup(pd, w, cfg, vectors)
                                : build_upper_program(pd, w, cfg, vectors);
  BoundResult res;
  res.direction = BoundDirection::upper;
  res.strategy = cfg.strategy;
  res.m_or_n = cfg.m;
  res.seed = cfg.seed;
  res.attempts = 1;
  res.vectors = vectors;
  res.report = solve(prog, opts);
  // Keep only the tester blocks; split variables are internal.
  res.report.primal.resize(vectors.size());
  res.value = res.ok() ? res.report.objective_value : std::numeric_limits<double>::quiet_NaN();
  return res;
}

BoundResult compute_upper(const ProcessData& pd, const WeightMatrix& w, const UpperBoundConfig& cfg,
                          const SolverOptions& opts) {
  if (cfg.restarts < 1) throw ContractError("restarts must be at least 1");
  const int dim = pd.params() + 1;
  BoundResult best;
  bool have_best = false;
  int attempts = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::uint64_t stream = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    UpperBoundConfig sub = cfg;
    sub.seed = stream;
    BoundResult res = solve_upper(pd, w, sub, sample_unit_vectors(cfg.m, dim, stream), opts);
    ++attempts;
    if (res.report.status == SolverStatus::infeasible) {
      stream = derive_seed(stream, 1);
      sub.seed = stream;
      res = solve_upper(pd, w, sub, sample_unit_vectors(cfg.m, dim, stream), opts);
      res.note = "resampled after an infeasible vector set";
      ++attempts;
    }
    const bool better = res.ok() && (!have_best || !best.ok() || res.value < best.value);
    if (!have_best || better) {
      best = std::move(res);
      have_best = true;
    }
  }
  best.attempts = attempts;
  return best;
}

BoundResult compute_upper(const ParamChannelFamily& fam, std::span<const double> theta, int n_uses,
                          const WeightMatrix& w, const UpperBoundConfig& cfg, const SolverOptions& opts) {
  return compute_upper(process_data(fam, theta, n_uses), w, cfg, opts);
}

}  // namespace qtb
