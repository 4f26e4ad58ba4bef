/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/schur.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qtb::sdp {

void RealCoeff::finalize() {
  support = rows;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  // Dense kernel once the low-rank gather stops paying off.
  use_dense = support.size() * 2 > static_cast<std::size_t>(dim);
  if (use_dense) dense = to_dense();
}

RealMatrix RealCoeff::to_dense() const {
  RealMatrix m = RealMatrix::Zero(dim, dim);
  for (std::size_t e = 0; e < vals.size(); ++e) m(rows[e], cols[e]) += vals[e];
  return m;
}

double RealCoeff::pair(const RealMatrix& v) const {
  double acc = 0.0;
  for (std::size_t e = 0; e < vals.size(); ++e) acc += vals[e] * v(cols[e], rows[e]);
  return acc;
}

double RealCoeff::frobenius_sq() const {
  double s = 0.0;
  for (double v : vals) s += v * v;
  return s;
}

namespace {

int clamp_threads(int threads) { return std::max(1, threads); }

// P = X A Zinv.
void left_right_product(const RealCoeff& a, const RealMatrix& x, const RealMatrix& zinv,
                        RealMatrix& p, RealMatrix& work, RealMatrix& gather) {
  if (a.use_dense) {
    work.noalias() = a.dense * zinv;
    p.noalias() = x * work;
    return;
  }
  const long n = a.dim;
  const long r = static_cast<long>(a.support.size());
  // work(k, :) = sum_q A(support_k, q) Zinv(q, :)
  work.setZero(r, n);
  for (std::size_t e = 0; e < a.vals.size(); ++e) {
    const long k = std::lower_bound(a.support.begin(), a.support.end(), a.rows[e]) - a.support.begin();
    work.row(k).noalias() += a.vals[e] * zinv.row(a.cols[e]);
  }
  gather.resize(n, r);
  for (long k = 0; k < r; ++k) gather.col(k) = x.col(a.support[k]);
  p.noalias() = gather * work;
}

double trace_with(const RealCoeff& a, const RealMatrix& p) {
  if (a.use_dense) return a.dense.cwiseProduct(p.transpose()).sum();
  return a.pair(p);
}

void block_contribution(const SdpData& d, std::size_t b, const RealMatrix& x, const RealMatrix& zinv,
                        RealMatrix& m, RealMatrix& p, RealMatrix& work, RealMatrix& gather) {
  const auto& terms = d.blocks[b].terms;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& ti = terms[i];
    left_right_product(d.coeffs[ti.coeff], x, zinv, p, work, gather);
    for (std::size_t j = i; j < terms.size(); ++j) {
      const auto& tj = terms[j];
      const double v = ti.scale * tj.scale * trace_with(d.coeffs[tj.coeff], p);
      m(ti.row, tj.row) += v;
      if (ti.row != tj.row) m(tj.row, ti.row) += v;
    }
  }
}

}  // namespace

RealMatrix schur_matrix(const SdpData& d, const std::vector<RealMatrix>& x,
                        const std::vector<RealMatrix>& zinv, int threads) {
  const int rows = d.num_rows();
  const long nb = static_cast<long>(d.blocks.size());
  const int nt = clamp_threads(threads);
  std::vector<RealMatrix> partial(nt, RealMatrix::Zero(rows, rows));
#pragma omp parallel num_threads(nt)
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    RealMatrix p, work, gather;
#pragma omp for schedule(static)
    for (long b = 0; b < nb; ++b) block_contribution(d, b, x[b], zinv[b], partial[tid], p, work, gather);
  }
  for (int t = 1; t < nt; ++t) partial[0] += partial[t];
  return partial[0];
}

RealMatrix schur_matrix_reference(const SdpData& d, const std::vector<RealMatrix>& x,
                                  const std::vector<RealMatrix>& zinv) {
  const int rows = d.num_rows();
  RealMatrix m = RealMatrix::Zero(rows, rows);
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    const auto& terms = d.blocks[b].terms;
    std::vector<RealMatrix> dense;
    for (const auto& t : terms) dense.push_back(t.scale * d.coeffs[t.coeff].to_dense());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const RealMatrix left = dense[i] * x[b];
      for (std::size_t j = 0; j < terms.size(); ++j)
        m(terms[i].row, terms[j].row) += (left * dense[j] * zinv[b]).trace();
    }
  }
  return m;
}

RealVector apply_a(const SdpData& d, const std::vector<RealMatrix>& v, int threads) {
  const int rows = d.num_rows();
  const long nb = static_cast<long>(d.blocks.size());
  const int nt = clamp_threads(threads);
  std::vector<RealVector> partial(nt, RealVector::Zero(rows));
#pragma omp parallel num_threads(nt)
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
#pragma omp for schedule(static)
    for (long b = 0; b < nb; ++b)
      for (const auto& t : d.blocks[b].terms) partial[tid](t.row) += t.scale * d.coeffs[t.coeff].pair(v[b]);
  }
  for (int t = 1; t < nt; ++t) partial[0] += partial[t];
  return partial[0];
}

std::vector<RealMatrix> apply_at(const SdpData& d, const RealVector& y, int threads) {
  const long nb = static_cast<long>(d.blocks.size());
  std::vector<RealMatrix> out(nb);
#pragma omp parallel for schedule(static) num_threads(clamp_threads(threads))
  for (long b = 0; b < nb; ++b) {
    const auto& blk = d.blocks[b];
    RealMatrix m = RealMatrix::Zero(blk.dim, blk.dim);
    for (const auto& t : blk.terms) {
      const auto& a = d.coeffs[t.coeff];
      const double s = t.scale * y(t.row);
      if (s == 0.0) continue;
      for (std::size_t e = 0; e < a.vals.size(); ++e) m(a.rows[e], a.cols[e]) += s * a.vals[e];
    }
    out[b] = std::move(m);
  }
  return out;
}

}  // namespace qtb::sdp
