/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/conic.hpp"

#include <cmath>
#include <cstdlib>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qtb {

// ---------------------------------------------------------------------------
// HermCoeff

CoeffPtr HermCoeff::from_dense(const ComplexMatrix& m, double drop_tol) {
  if (m.rows() != m.cols()) throw DimensionError("coefficient matrix must be square");
  auto c = std::make_shared<HermCoeff>();
  c->dim = m.rows();
  for (long j = 0; j < m.cols(); ++j)
    for (long i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > drop_tol) c->entries.push_back({int(i), int(j), m(i, j)});
  return c;
}

ComplexMatrix HermCoeff::to_dense() const {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : entries) m(e.row, e.col) += e.value;
  return m;
}

double HermCoeff::pair(const ComplexMatrix& m) const {
  // tr(F m) = sum_{r,c} F(r,c) m(c,r)
  cplx acc = 0.0;
  for (const auto& e : entries) acc += e.value * m(e.col, e.row);
  return acc.real();
}

double HermCoeff::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += std::norm(e.value);
  return std::sqrt(s);
}

bool HermCoeff::is_real() const {
  for (const auto& e : entries)
    if (e.value.imag() != 0.0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// ConicProgram

int ConicProgram::add_variable(std::string name, long dim, Cone cone) {
  if (dim < 1) throw DimensionError("variable '" + name + "' must have positive dimension");
  variables_.push_back({std::move(name), dim, cone});
  return static_cast<int>(variables_.size()) - 1;
}

namespace {
void check_term(const std::vector<Variable>& vars, int var, const CoeffPtr& coeff) {
  if (var < 0 || var >= static_cast<int>(vars.size())) throw DimensionError("unknown variable index");
  if (!coeff || coeff->dim != vars[var].dim)
    throw DimensionError("coefficient dimension does not match variable '" + vars[var].name + "'");
}
}  // namespace

void ConicProgram::add_objective_term(int var, double scale, CoeffPtr coeff) {
  check_term(variables_, var, coeff);
  objective_.push_back({var, scale, std::move(coeff)});
}

int ConicProgram::add_constraint(double rhs, std::string tag) {
  equalities_.push_back({{}, rhs, std::move(tag)});
  return static_cast<int>(equalities_.size()) - 1;
}

void ConicProgram::add_term(int row, int var, double scale, CoeffPtr coeff) {
  if (row < 0 || row >= static_cast<int>(equalities_.size())) throw DimensionError("unknown constraint row");
  check_term(variables_, var, coeff);
  equalities_[row].terms.push_back({var, scale, std::move(coeff)});
}

int ConicProgram::find_variable(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {
double eval_terms(const std::vector<Term>& terms, const std::vector<ComplexMatrix>& a) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.scale * t.coeff->pair(a.at(t.var));
  return acc;
}
}  // namespace

double ConicProgram::objective_value(const std::vector<ComplexMatrix>& assignment) const {
  return eval_terms(objective_, assignment);
}

double ConicProgram::constraint_value(int row, const std::vector<ComplexMatrix>& assignment) const {
  return eval_terms(equalities_.at(row).terms, assignment);
}

double ConicProgram::max_residual(const std::vector<ComplexMatrix>& assignment) const {
  double worst = 0.0;
  for (std::size_t c = 0; c < equalities_.size(); ++c)
    worst = std::max(worst, std::abs(constraint_value(static_cast<int>(c), assignment) - equalities_[c].rhs));
  return worst;
}

void ConicProgram::validate(double tol) const {
  auto check = [&](const Term& t) {
    check_term(variables_, t.var, t.coeff);
    if (!is_hermitian(t.coeff->to_dense(), tol)) throw ContractError("coefficient data must be Hermitian");
  };
  std::unordered_map<const HermCoeff*, bool> seen;
  for (const auto& t : objective_)
    if (seen.emplace(t.coeff.get(), true).second) check(t);
  for (const auto& e : equalities_)
    for (const auto& t : e.terms)
      if (seen.emplace(t.coeff.get(), true).second) check(t);
}

// ---------------------------------------------------------------------------
// Real embedding

RealMatrix embed_matrix(const ComplexMatrix& m) {
  const long r = m.rows(), c = m.cols();
  RealMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = m.real();
  out.topRightCorner(r, c) = -m.imag();
  out.bottomLeftCorner(r, c) = m.imag();
  out.bottomRightCorner(r, c) = m.real();
  return out;
}

ComplexMatrix deembed_matrix(const RealMatrix& x) {
  if (x.rows() % 2 || x.cols() % 2) throw DimensionError("embedded matrix must have even dimensions");
  const long r = x.rows() / 2, c = x.cols() / 2;
  const RealMatrix re = 0.5 * (x.topLeftCorner(r, c) + x.bottomRightCorner(r, c));
  const RealMatrix im = 0.5 * (x.bottomLeftCorner(r, c) - x.topRightCorner(r, c));
  ComplexMatrix out(r, c);
  out.real() = re;
  out.imag() = im;
  return out;
}

namespace {
CoeffPtr embed_coeff(const HermCoeff& f) {
  auto c = std::make_shared<HermCoeff>();
  const long d = f.dim;
  c->dim = 2 * d;
  c->entries.reserve(f.entries.size() * 4);
  for (const auto& e : f.entries) {
    const double re = e.value.real(), im = e.value.imag();
    if (re != 0.0) {
      c->entries.push_back({e.row, e.col, re});
      c->entries.push_back({int(e.row + d), int(e.col + d), re});
    }
    if (im != 0.0) {
      c->entries.push_back({e.row, int(e.col + d), -im});
      c->entries.push_back({int(e.row + d), e.col, im});
    }
  }
  return c;
}
}  // namespace

ConicProgram real_embed(const ConicProgram& p) {
  if (p.real_embedded_) return p;
  p.validate();
  ConicProgram q;
  for (const auto& v : p.variables_) q.variables_.push_back({v.name, 2 * v.dim, v.cone});
  std::unordered_map<const HermCoeff*, CoeffPtr> memo;
  auto map_term = [&](const Term& t) {
    auto it = memo.find(t.coeff.get());
    if (it == memo.end()) it = memo.emplace(t.coeff.get(), embed_coeff(*t.coeff)).first;
    return Term{t.var, 0.5 * t.scale, it->second};
  };
  for (const auto& t : p.objective_) q.objective_.push_back(map_term(t));
  for (const auto& e : p.equalities_) {
    Equality f{{}, e.rhs, e.tag};
    f.terms.reserve(e.terms.size());
    for (const auto& t : e.terms) f.terms.push_back(map_term(t));
    q.equalities_.push_back(std::move(f));
  }
  q.notes_ = p.notes_;
  q.real_embedded_ = true;
  return q;
}

std::vector<RealMatrix> embed_assignment(const std::vector<ComplexMatrix>& values) {
  std::vector<RealMatrix> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(embed_matrix(v));
  return out;
}

std::vector<ComplexMatrix> deembed_assignment(const std::vector<RealMatrix>& values) {
  std::vector<ComplexMatrix> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(deembed_matrix(v));
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian coordinates

std::vector<ComplexMatrix> hermitian_dof_basis(long d) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<ComplexMatrix> out;
  out.reserve(d * d);
  for (long p = 0; p < d; ++p) {
    ComplexMatrix b = ComplexMatrix::Zero(d, d);
    b(p, p) = 1.0;
    out.push_back(std::move(b));
    for (long q = p + 1; q < d; ++q) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d), im = ComplexMatrix::Zero(d, d);
      re(p, q) = re(q, p) = s;
      im(p, q) = cplx(0.0, s);
      im(q, p) = cplx(0.0, -s);
      out.push_back(std::move(re));
      out.push_back(std::move(im));
    }
  }
  return out;
}

std::vector<CoeffPtr> hermitian_dof_functionals(long d) {
  std::vector<CoeffPtr> out;
  out.reserve(d * d);
  for (const auto& b : hermitian_dof_basis(d)) out.push_back(HermCoeff::from_dense(b));
  return out;
}

RealVector hermitian_dofs(const ComplexMatrix& x) {
  const long d = x.rows();
  const double s = std::sqrt(2.0);
  RealVector v(d * d);
  long k = 0;
  for (long p = 0; p < d; ++p) {
    v(k++) = x(p, p).real();
    for (long q = p + 1; q < d; ++q) {
      // tr(B x) for the two off-diagonal basis elements
      v(k++) = s * 0.5 * (x(p, q) + x(q, p)).real();
      v(k++) = s * 0.5 * (x(p, q) - x(q, p)).imag();
    }
  }
  return v;
}

ComplexMatrix from_hermitian_dofs(const RealVector& v, long d) {
  if (v.size() != d * d) throw DimensionError("coordinate vector has the wrong length");
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix x = ComplexMatrix::Zero(d, d);
  long k = 0;
  for (long p = 0; p < d; ++p) {
    x(p, p) = v(k++);
    for (long q = p + 1; q < d; ++q) {
      const double re = v(k++) * s, im = v(k++) * s;
      x(p, q) = cplx(re, im);
      x(q, p) = cplx(re, -im);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::unbounded: return "unbounded";
    case SolverStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

int solver_threads(const SolverOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("BOUNDS_SOLVER_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

SolverReport solve(const ConicProgram& p, const SolverOptions& opts) {
  return InteriorPointBackend().solve(p, opts);
}

}  // namespace qtb
