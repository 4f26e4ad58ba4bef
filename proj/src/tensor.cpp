/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qtb {

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const ComplexMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  if (m.size() == 0) return true;
  return min_eigenvalue(hermitian_part(m)) >= -tol;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron_power(const ComplexMatrix& a, int n) {
  if (n < 0) throw DimensionError("kron_power: negative exponent");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, a);
  return out;
}

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw DimensionError("factor '" + f.label + "' has non-positive dimension");
    if (!seen.insert(f.label).second) throw DimensionError("duplicate factor label '" + f.label + "'");
    total_dim_ *= f.dim;
  }
}

SubsystemLayout SubsystemLayout::canonical(int n_uses, int d_in, int d_out) {
  std::vector<Factor> fs;
  for (int k = 1; k <= n_uses; ++k) {
    fs.push_back({"I" + std::to_string(k), d_in});
    fs.push_back({"O" + std::to_string(k), d_out});
  }
  return SubsystemLayout(std::move(fs));
}

std::size_t SubsystemLayout::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return i;
  throw DimensionError("unknown factor label '" + label + "'");
}

bool SubsystemLayout::contains(const std::string& label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

long SubsystemLayout::dim_of(const LabelSet& labels) const {
  long d = 1;
  for (const auto& l : labels) d *= dim_of(l);
  return d;
}

SubsystemLayout SubsystemLayout::without(const LabelSet& labels) const {
  for (const auto& l : labels) (void)index_of(l);
  std::vector<Factor> kept;
  for (const auto& f : factors_)
    if (!labels.count(f.label)) kept.push_back(f);
  return SubsystemLayout(std::move(kept));
}

SubsystemLayout SubsystemLayout::then(const SubsystemLayout& tail) const {
  auto fs = factors_;
  fs.insert(fs.end(), tail.factors_.begin(), tail.factors_.end());
  return SubsystemLayout(std::move(fs));
}

// ---------------------------------------------------------------------------
// Subsystem index arithmetic. The first factor is the most significant digit.

namespace {

struct Split {
  std::vector<long> kept_offsets;    // composite offsets of kept-factor multi-indices
  std::vector<long> traced_offsets;  // composite offsets of traced-factor multi-indices
};

std::vector<long> offsets_for(const std::vector<long>& dims, const std::vector<long>& strides) {
  std::vector<long> out{0};
  for (std::size_t f = 0; f < dims.size(); ++f) {
    std::vector<long> next;
    next.reserve(out.size() * dims[f]);
    for (long base : out)
      for (long i = 0; i < dims[f]; ++i) next.push_back(base + i * strides[f]);
    out = std::move(next);
  }
  return out;
}

Split split_layout(const SubsystemLayout& layout, const LabelSet& traced) {
  for (const auto& l : traced) (void)layout.index_of(l);
  const auto& fs = layout.factors();
  std::vector<long> strides(fs.size());
  long s = 1;
  for (std::size_t i = fs.size(); i-- > 0;) {
    strides[i] = s;
    s *= fs[i].dim;
  }
  std::vector<long> kd, ks, td, ts;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (traced.count(fs[i].label)) {
      td.push_back(fs[i].dim);
      ts.push_back(strides[i]);
    } else {
      kd.push_back(fs[i].dim);
      ks.push_back(strides[i]);
    }
  }
  return {offsets_for(kd, ks), offsets_for(td, ts)};
}

void check_square(const ComplexMatrix& m, const SubsystemLayout& layout) {
  if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim())
    throw DimensionError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " but layout has dimension " + std::to_string(layout.total_dim()));
}

}  // namespace

Reduced partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout, const LabelSet& over) {
  check_square(m, layout);
  const Split sp = split_layout(layout, over);
  const long dk = static_cast<long>(sp.kept_offsets.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (long c = 0; c < dk; ++c)
    for (long r = 0; r < dk; ++r) {
      cplx acc = 0.0;
      for (long t : sp.traced_offsets) acc += m(sp.kept_offsets[r] + t, sp.kept_offsets[c] + t);
      out(r, c) = acc;
    }
  return {std::move(out), layout.without(over)};
}

ComplexMatrix trace_and_replace(const ComplexMatrix& m, const SubsystemLayout& layout,
                                const LabelSet& q) {
  if (q.empty()) {
    check_square(m, layout);
    return m;
  }
  const Reduced red = partial_trace(m, layout, q);
  const Split sp = split_layout(layout, q);
  const double inv_dq = 1.0 / static_cast<double>(sp.traced_offsets.size());
  const long dk = static_cast<long>(sp.kept_offsets.size());
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (long c = 0; c < dk; ++c)
    for (long r = 0; r < dk; ++r) {
      const cplx v = red.matrix(r, c) * inv_dq;
      if (v == cplx(0.0)) continue;
      for (long t : sp.traced_offsets) out(sp.kept_offsets[r] + t, sp.kept_offsets[c] + t) = v;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Superoperator words

SuperopWord::SuperopWord(std::vector<Literal> literals) : literals_(std::move(literals)) {
  LabelSet seen;
  for (const auto& lit : literals_)
    for (const auto& l : lit.factors)
      if (!seen.insert(l).second)
        throw ContractError("superoperator word literals overlap on factor '" + l + "'");
}

std::string SuperopWord::to_string() const {
  if (literals_.empty()) return "Id";
  std::ostringstream os;
  for (const auto& lit : literals_) {
    os << (lit.kind == Literal::Kind::replace ? "D[" : "(Id-D[");
    bool first = true;
    for (const auto& l : lit.factors) {
      os << (first ? "" : ",") << l;
      first = false;
    }
    os << (lit.kind == Literal::Kind::replace ? "]" : "])");
  }
  return os.str();
}

ComplexMatrix apply_word(const SuperopWord& w, const ComplexMatrix& m, const SubsystemLayout& layout) {
  check_square(m, layout);
  for (const auto& lit : w.literals())
    for (const auto& l : lit.factors) (void)layout.index_of(l);
  ComplexMatrix cur = m;
  for (const auto& lit : w.literals()) {
    ComplexMatrix d = trace_and_replace(cur, layout, lit.factors);
    if (lit.kind == Literal::Kind::replace)
      cur = std::move(d);
    else
      cur -= d;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Permutations of copies

namespace {
void check_permutation(const std::vector<int>& perm, int copies) {
  if (static_cast<int>(perm.size()) != copies)
    throw ContractError("permutation has " + std::to_string(perm.size()) + " entries, expected " +
                        std::to_string(copies));
  std::vector<bool> hit(copies, false);
  for (int p : perm) {
    if (p < 0 || p >= copies || hit[p]) throw ContractError("invalid permutation");
    hit[p] = true;
  }
}
}  // namespace

std::vector<long> permutation_index_map(int copies, int dim_per_copy, const std::vector<int>& perm) {
  check_permutation(perm, copies);
  long total = 1;
  for (int k = 0; k < copies; ++k) total *= dim_per_copy;
  std::vector<long> stride(copies);
  long s = 1;
  for (int k = copies; k-- > 0;) {
    stride[k] = s;
    s *= dim_per_copy;
  }
  std::vector<long> out(total);
  for (long a = 0; a < total; ++a) {
    long rem = a, b = 0;
    for (int j = 0; j < copies; ++j) {
      const long digit = rem / stride[j];
      rem %= stride[j];
      b += digit * stride[perm[j]];
    }
    out[a] = b;
  }
  return out;
}

ComplexMatrix permutation_operator(int copies, int dim_per_copy, const std::vector<int>& perm) {
  const auto map = permutation_index_map(copies, dim_per_copy, perm);
  const long total = static_cast<long>(map.size());
  ComplexMatrix u = ComplexMatrix::Zero(total, total);
  for (long a = 0; a < total; ++a) u(map[a], a) = 1.0;
  return u;
}

ComplexMatrix random_hermitian(long dim, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(dim, dim);
  for (long j = 0; j < dim; ++j)
    for (long i = 0; i < dim; ++i) m(i, j) = cplx(g(rng), g(rng));
  return hermitian_part(m);
}

}  // namespace qtb
