/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/testers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qtb/conic.hpp"
#include "qtb/ipm.hpp"

namespace qtb {

StrategyClass::StrategyClass(StrategyKind k, int n) : kind(k), n_uses(n) {
  if (n < 1) throw ContractError("number of channel uses must be at least 1");
  if (k == StrategyKind::causal_superposition && n != 2)
    throw ContractError("causal superposition strategies are supported for exactly 2 channel uses");
}

std::string to_token(StrategyKind k) {
  switch (k) {
    case StrategyKind::parallel: return "parallel";
    case StrategyKind::sequential: return "sequential";
    case StrategyKind::causal_superposition: return "causal-superposition";
    case StrategyKind::general_ico: return "general-ico";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& token) {
  if (token == "parallel") return StrategyKind::parallel;
  if (token == "sequential") return StrategyKind::sequential;
  if (token == "causal-superposition") return StrategyKind::causal_superposition;
  if (token == "general-ico") return StrategyKind::general_ico;
  throw std::invalid_argument("unknown strategy class '" + token + "'");
}

std::string roman(StrategyKind k) {
  switch (k) {
    case StrategyKind::parallel: return "i";
    case StrategyKind::sequential: return "ii";
    case StrategyKind::causal_superposition: return "iii";
    case StrategyKind::general_ico: return "iv";
  }
  return "?";
}

// ---------------------------------------------------------------------------

LambdaMap::LambdaMap(SubsystemLayout layout, std::vector<SignedWord> terms)
    : layout_(std::move(layout)), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    for (const auto& lit : t.word.literals())
      for (const auto& l : lit.factors) (void)layout_.index_of(l);
}

ComplexMatrix LambdaMap::apply(const ComplexMatrix& x) const {
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& t : terms_) out += t.coefficient * apply_word(t.word, x, layout_);
  return out;
}

ComplexMatrix LambdaMap::complement(const ComplexMatrix& x) const { return x - apply(x); }

std::string LambdaMap::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first || t.coefficient < 0) os << (t.coefficient < 0 ? " - " : " + ");
    const double a = std::abs(t.coefficient);
    if (a != 1.0) os << a << "*";
    os << t.word.to_string();
    first = false;
  }
  return os.str();
}

namespace {

std::string in_label(int c) { return "I" + std::to_string(c + 1); }
std::string out_label(int c) { return "O" + std::to_string(c + 1); }

int uses_of(const SubsystemLayout& layout) {
  int n = 0;
  while (layout.contains(in_label(n)) && layout.contains(out_label(n))) ++n;
  if (n == 0 || static_cast<std::size_t>(2 * n) != layout.size())
    throw DimensionError("layout is not the canonical I_1,O_1,...,I_N,O_N layout");
  return n;
}

LambdaMap parallel_map(const SubsystemLayout& layout, int n) {
  LabelSet outs;
  for (int c = 0; c < n; ++c) outs.insert(out_label(c));
  return LambdaMap(layout, {{1.0, SuperopWord({Literal::replace(outs)})}});
}

LambdaMap ico_map(const SubsystemLayout& layout, int n) {
  // Id - prod_j (Id - D_{O_j} + D_{I_j O_j}) + prod_j D_{I_j O_j}, expanded over the 3^n
  // choices per copy. Disjoint D's compose into D of the union.
  std::map<LabelSet, double> coeff;
  coeff[{}] += 1.0;
  long combos = 1;
  for (int j = 0; j < n; ++j) combos *= 3;
  for (long code = 0; code < combos; ++code) {
    long rem = code;
    double c = 1.0;
    LabelSet q;
    for (int j = 0; j < n; ++j) {
      const int pick = static_cast<int>(rem % 3);
      rem /= 3;
      if (pick == 1) {
        c = -c;
        q.insert(out_label(j));
      } else if (pick == 2) {
        q.insert(in_label(j));
        q.insert(out_label(j));
      }
    }
    coeff[q] -= c;
  }
  LabelSet all;
  for (int j = 0; j < n; ++j) {
    all.insert(in_label(j));
    all.insert(out_label(j));
  }
  coeff[all] += 1.0;

  std::vector<SignedWord> terms;
  for (const auto& [q, c] : coeff) {
    if (c == 0.0) continue;
    terms.push_back({c, q.empty() ? SuperopWord() : SuperopWord({Literal::replace(q)})});
  }
  return LambdaMap(layout, std::move(terms));
}

}  // namespace

LambdaMap sequential_map(const SubsystemLayout& layout, const std::vector<int>& order) {
  const int n = uses_of(layout);
  if (static_cast<int>(order.size()) != n) throw ContractError("order must list every channel use once");
  std::vector<SignedWord> terms;
  terms.push_back({1.0, SuperopWord({Literal::replace({out_label(order[n - 1])})})});
  // - (Id - D_{O_{c_k}}) D_{I_{c_{k+1}} O_{c_{k+1}} ... I_{c_N} O_{c_N}}
  for (int k = n - 2; k >= 0; --k) {
    LabelSet tail;
    for (int j = k + 1; j < n; ++j) {
      tail.insert(in_label(order[j]));
      tail.insert(out_label(order[j]));
    }
    terms.push_back(
        {-1.0, SuperopWord({Literal::complement({out_label(order[k])}), Literal::replace(tail)})});
  }
  return LambdaMap(layout, std::move(terms));
}

LambdaMap lambda_map(const StrategyClass& sc, const SubsystemLayout& layout) {
  const int n = uses_of(layout);
  if (n != sc.n_uses) throw DimensionError("layout does not match the number of channel uses");
  switch (sc.kind) {
    case StrategyKind::parallel: return parallel_map(layout, n);
    case StrategyKind::sequential: {
      std::vector<int> order(n);
      for (int j = 0; j < n; ++j) order[j] = j;
      return sequential_map(layout, order);
    }
    case StrategyKind::general_ico: return ico_map(layout, n);
    case StrategyKind::causal_superposition: break;
  }
  throw ContractError("causal superposition has no single projector; use causal_orders");
}

std::vector<LambdaMap> causal_orders(const StrategyClass& sc, const SubsystemLayout& layout) {
  if (sc.kind != StrategyKind::causal_superposition)
    throw ContractError("causal_orders requires the causal-superposition class");
  if (uses_of(layout) != 2) throw ContractError("causal superposition is supported for N = 2 only");
  return {sequential_map(layout, {0, 1}), sequential_map(layout, {1, 0})};
}

double output_dimension(const SubsystemLayout& layout) {
  double d = 1.0;
  for (const auto& f : layout.factors())
    if (!f.label.empty() && f.label[0] == 'O') d *= f.dim;
  return d;
}

TesterConstraintSet tester_constraints(const StrategyClass& sc, const SubsystemLayout& layout) {
  TesterConstraintSet out;
  out.strategy = sc;
  out.layout = layout;
  out.trace_value = output_dimension(layout);
  if (sc.kind == StrategyKind::causal_superposition)
    out.orders = causal_orders(sc, layout);
  else
    out.orders = {lambda_map(sc, layout)};
  return out;
}

std::vector<CoeffPtr> complement_functionals(const LambdaMap& map, long d) {
  const auto basis = hermitian_dof_basis(d);
  const long nb = static_cast<long>(basis.size());
  std::vector<ComplexMatrix> images;
  RealMatrix cols(nb, nb);
  for (long k = 0; k < nb; ++k) {
    images.push_back(map.complement(basis[k]));
    cols.col(k) = hermitian_dofs(images.back());
  }
  // Column-pivoted QR keeps a maximal independent subset of the images.
  Eigen::ColPivHouseholderQR<RealMatrix> qr(cols);
  qr.setThreshold(1e-10);
  const long rank = qr.rank();
  std::vector<long> picked;
  for (long k = 0; k < rank; ++k) picked.push_back(qr.colsPermutation().indices()(k));
  std::sort(picked.begin(), picked.end());
  std::vector<CoeffPtr> out;
  for (long k : picked) out.push_back(HermCoeff::from_dense(images[k], 1e-15));
  return out;
}

// ---------------------------------------------------------------------------
// Membership

namespace {

// Residual of x against the linear span range(L1) + range(L2), and the projection onto it.
std::pair<double, ComplexMatrix> project_on_ranges(const ComplexMatrix& x,
                                                   const std::vector<LambdaMap>& maps) {
  const long d = x.rows();
  const auto basis = hermitian_dof_basis(d);
  RealMatrix span(static_cast<long>(basis.size()), static_cast<long>(basis.size() * maps.size()));
  long col = 0;
  for (const auto& m : maps)
    for (const auto& b : basis) span.col(col++) = hermitian_dofs(m.apply(b));
  Eigen::JacobiSVD<RealMatrix> svd(span, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  long rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  const RealMatrix u = svd.matrixU().leftCols(rank);
  const RealVector v = hermitian_dofs(x);
  const RealVector proj = u * (u.transpose() * v);
  return {(v - proj).norm(), from_hermitian_dofs(proj, d)};
}

// Smallest s such that x + s I/d splits into order-invariant PSD parts.
double split_slack(const ComplexMatrix& x, const std::vector<LambdaMap>& maps) {
  const long d = x.rows();
  ConicProgram p;
  std::vector<int> parts;
  for (std::size_t k = 0; k < maps.size(); ++k)
    parts.push_back(p.add_variable("X" + std::to_string(k), d, Cone::psd));
  const int s = p.add_variable("s", 1, Cone::free);
  p.add_objective_term(s, 1.0, HermCoeff::from_dense(ComplexMatrix::Identity(1, 1)));

  const auto dofs = hermitian_dof_functionals(d);
  const RealVector xv = hermitian_dofs(x);
  const RealVector iv = hermitian_dofs(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const int row = p.add_constraint(xv(static_cast<long>(k)));
    for (int v : parts) p.add_term(row, v, 1.0, dofs[k]);
    if (iv(static_cast<long>(k)) != 0.0)
      p.add_term(row, s, -iv(static_cast<long>(k)), HermCoeff::from_dense(ComplexMatrix::Identity(1, 1)));
  }
  for (std::size_t k = 0; k < maps.size(); ++k)
    for (const auto& f : complement_functionals(maps[k], d)) {
      const int row = p.add_constraint(0.0);
      p.add_term(row, parts[k], 1.0, f);
    }
  SolverOptions opts;
  const SolverReport rep = solve(p, opts);
  if (rep.status != SolverStatus::optimal)
    throw std::runtime_error("membership split program failed: " + to_string(rep.status));
  return rep.objective_value;
}

}  // namespace

MembershipResidual membership_residual(const ComplexMatrix& x, const StrategyClass& sc,
                                       const SubsystemLayout& layout) {
  if (x.rows() != layout.total_dim() || x.cols() != layout.total_dim())
    throw DimensionError("tester matrix does not match the layout");
  MembershipResidual out;
  const ComplexMatrix h = hermitian_part(x);
  out.trace_gap = std::abs(h.trace().real() - output_dimension(layout));
  out.min_eigenvalue = min_eigenvalue(h);
  if (sc.kind != StrategyKind::causal_superposition) {
    out.residual_norm = lambda_map(sc, layout).complement(h).norm();
    return out;
  }
  const auto maps = causal_orders(sc, layout);
  const auto [dist, proj] = project_on_ranges(h, maps);
  // A positive slack s means x misses the split cone by s * I/d in Frobenius norm.
  const double slack = split_slack(proj, maps);
  const double id_norm = 1.0 / std::sqrt(static_cast<double>(h.rows()));
  out.residual_norm = dist + std::max(0.0, slack) * id_norm;
  return out;
}

}  // namespace qtb
