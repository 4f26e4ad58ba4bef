/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qtb::sdp {

// ---------------------------------------------------------------------------
// Lowering

namespace {

RealCoeff combine(const std::vector<std::pair<double, const RealCoeff*>>& parts) {
  std::map<std::pair<int, int>, double> acc;
  int dim = 0;
  for (const auto& [s, c] : parts) {
    dim = c->dim;
    for (std::size_t e = 0; e < c->vals.size(); ++e) acc[{c->rows[e], c->cols[e]}] += s * c->vals[e];
  }
  RealCoeff out;
  out.dim = dim;
  for (const auto& [rc, v] : acc) {
    if (v == 0.0) continue;
    out.rows.push_back(rc.first);
    out.cols.push_back(rc.second);
    out.vals.push_back(v);
  }
  out.finalize();
  return out;
}

}  // namespace

LoweredProgram lower_program(const ConicProgram& q) {
  if (!q.real_embedded()) throw ContractError("lower_program expects a real-embedded program");
  LoweredProgram out;
  SdpData& d = out.data;
  for (const auto& v : q.variables()) {
    const int n = static_cast<int>(v.dim);
    std::vector<std::pair<int, double>> blocks{{static_cast<int>(d.blocks.size()), 1.0}};
    d.blocks.push_back({n, {}, RealMatrix::Zero(n, n)});
    if (v.cone == Cone::free) {
      blocks.push_back({static_cast<int>(d.blocks.size()), -1.0});
      d.blocks.push_back({n, {}, RealMatrix::Zero(n, n)});
    }
    out.var_blocks.push_back(std::move(blocks));
  }

  std::unordered_map<const HermCoeff*, int> index;
  auto coeff_index = [&](const CoeffPtr& c) {
    const auto it = index.find(c.get());
    if (it != index.end()) return it->second;
    RealCoeff r;
    r.dim = static_cast<int>(c->dim);
    for (const auto& e : c->entries) {
      if (e.value.imag() != 0.0) throw ContractError("embedded coefficient has an imaginary entry");
      if (e.value.real() == 0.0) continue;
      r.rows.push_back(e.row);
      r.cols.push_back(e.col);
      r.vals.push_back(e.value.real());
    }
    r.finalize();
    d.coeffs.push_back(std::move(r));
    const int idx = static_cast<int>(d.coeffs.size()) - 1;
    index.emplace(c.get(), idx);
    return idx;
  };

  for (const auto& t : q.objective())
    for (const auto& [blk, sgn] : out.var_blocks[t.var])
      for (const auto& e : t.coeff->entries) d.blocks[blk].c(e.row, e.col) += sgn * t.scale * e.value.real();

  const auto& eqs = q.equalities();
  d.b.resize(static_cast<long>(eqs.size()));
  for (std::size_t row = 0; row < eqs.size(); ++row) {
    d.b(static_cast<long>(row)) = eqs[row].rhs;
    for (const auto& t : eqs[row].terms) {
      const int ci = coeff_index(t.coeff);
      for (const auto& [blk, sgn] : out.var_blocks[t.var])
        d.blocks[blk].terms.push_back({static_cast<int>(row), sgn * t.scale, ci});
    }
  }

  // At most one term per (block, row).
  for (auto& blk : d.blocks) {
    auto& terms = blk.terms;
    std::stable_sort(terms.begin(), terms.end(),
                     [](const BlockTerm& a, const BlockTerm& b) { return a.row < b.row; });
    std::vector<BlockTerm> merged;
    for (std::size_t i = 0; i < terms.size();) {
      std::size_t j = i;
      while (j < terms.size() && terms[j].row == terms[i].row) ++j;
      if (j - i == 1) {
        merged.push_back(terms[i]);
      } else {
        bool same = true;
        double scale = 0.0;
        for (std::size_t k = i; k < j; ++k) {
          same = same && terms[k].coeff == terms[i].coeff;
          scale += terms[k].scale;
        }
        if (same) {
          if (scale != 0.0) merged.push_back({terms[i].row, scale, terms[i].coeff});
        } else {
          std::vector<std::pair<double, const RealCoeff*>> parts;
          for (std::size_t k = i; k < j; ++k) parts.push_back({terms[k].scale, &d.coeffs[terms[k].coeff]});
          RealCoeff c = combine(parts);
          if (!c.vals.empty()) {
            d.coeffs.push_back(std::move(c));
            merged.push_back({terms[i].row, 1.0, static_cast<int>(d.coeffs.size()) - 1});
          }
        }
      }
      i = j;
    }
    terms = std::move(merged);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presolve

namespace {

double coeff_inner(const RealCoeff& a, const RealMatrix& b_dense) {
  double s = 0.0;
  for (std::size_t e = 0; e < a.vals.size(); ++e) s += a.vals[e] * b_dense(a.rows[e], a.cols[e]);
  return s;
}

RealMatrix gram_matrix(const SdpData& d) {
  const int m = d.num_rows();
  RealMatrix g = RealMatrix::Zero(m, m);
  // Blocks with the same (row, coefficient) pattern differ only in their scales.
  std::map<std::vector<std::pair<int, int>>, std::vector<int>> groups;
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    std::vector<std::pair<int, int>> sig;
    for (const auto& t : d.blocks[b].terms) sig.push_back({t.row, t.coeff});
    if (!sig.empty()) groups[sig].push_back(static_cast<int>(b));
  }
  for (const auto& [sig, members] : groups) {
    const long r = static_cast<long>(sig.size());
    RealMatrix pair(r, r);
    for (long j = 0; j < r; ++j) {
      const RealMatrix dj = d.coeffs[sig[j].second].to_dense();
      for (long i = 0; i <= j; ++i) pair(i, j) = pair(j, i) = coeff_inner(d.coeffs[sig[i].second], dj);
    }
    RealMatrix s(r, static_cast<long>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k)
      for (long i = 0; i < r; ++i) s(i, static_cast<long>(k)) = d.blocks[members[k]].terms[i].scale;
    const RealMatrix ss = s * s.transpose();
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < r; ++j) g(sig[i].first, sig[j].first) += ss(i, j) * pair(i, j);
  }
  return g;
}

}  // namespace

PresolveResult find_independent_rows(const SdpData& d, double tol) {
  const int m = d.num_rows();
  PresolveResult out;
  if (m == 0) return out;
  const RealMatrix g = gram_matrix(d);
  RealVector norm(m);
  for (int k = 0; k < m; ++k) norm(k) = std::sqrt(std::max(0.0, g(k, k)));

  RealMatrix gn = RealMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (norm(i) > 0.0 && norm(j) > 0.0) gn(i, j) = g(i, j) / (norm(i) * norm(j));

  // Greedy pivoted Cholesky.
  RealVector diag = gn.diagonal();
  RealMatrix l = RealMatrix::Zero(m, m);
  std::vector<int> piv;
  std::vector<bool> used(m, false);
  for (int step = 0; step < m; ++step) {
    int best = -1;
    double best_val = tol;
    for (int k = 0; k < m; ++k)
      if (!used[k] && diag(k) > best_val) {
        best = k;
        best_val = diag(k);
      }
    if (best < 0) break;
    used[best] = true;
    const int c = static_cast<int>(piv.size());
    piv.push_back(best);
    const double root = std::sqrt(diag(best));
    for (int k = 0; k < m; ++k) {
      if (used[k] && k != best) continue;
      double v = gn(k, best);
      for (int t = 0; t < c; ++t) v -= l(k, t) * l(best, t);
      l(k, c) = v / root;
      if (k != best) diag(k) -= l(k, c) * l(k, c);
    }
  }
  out.keep = piv;
  std::sort(out.keep.begin(), out.keep.end());
  if (static_cast<int>(out.keep.size()) == m) return out;

  // Consistency of dropped rows with the kept right-hand sides.
  const long r = static_cast<long>(out.keep.size());
  RealVector bn(m);
  for (int k = 0; k < m; ++k) bn(k) = norm(k) > 0.0 ? d.b(k) / norm(k) : d.b(k);
  RealMatrix gkk(r, r);
  RealVector bk(r);
  for (long i = 0; i < r; ++i) {
    bk(i) = bn(out.keep[i]);
    for (long j = 0; j < r; ++j) gkk(i, j) = gn(out.keep[i], out.keep[j]);
  }
  Eigen::LDLT<RealMatrix> fact(gkk);
  const double bscale = 1.0 + bn.cwiseAbs().maxCoeff();
  for (int k = 0; k < m; ++k) {
    if (std::binary_search(out.keep.begin(), out.keep.end(), k)) continue;
    double mismatch;
    if (norm(k) == 0.0) {
      mismatch = std::abs(d.b(k));
    } else {
      RealVector col(r);
      for (long i = 0; i < r; ++i) col(i) = gn(out.keep[i], k);
      const RealVector c = r > 0 ? RealVector(fact.solve(col)) : RealVector();
      mismatch = std::abs(bn(k) - (r > 0 ? c.dot(bk) : 0.0));
    }
    out.worst_mismatch = std::max(out.worst_mismatch, mismatch);
  }
  out.consistent = out.worst_mismatch <= 1e-7 * bscale;
  return out;
}

SdpData restrict_rows(const SdpData& d, const std::vector<int>& keep) {
  std::vector<int> map(d.num_rows(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) map[keep[i]] = static_cast<int>(i);
  SdpData out;
  out.coeffs = d.coeffs;
  out.b.resize(static_cast<long>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.b(static_cast<long>(i)) = d.b(keep[i]);
  for (const auto& blk : d.blocks) {
    Block nb{blk.dim, {}, blk.c};
    for (const auto& t : blk.terms)
      if (map[t.row] >= 0) nb.terms.push_back({map[t.row], t.scale, t.coeff});
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interior point

namespace {

using Blocks = std::vector<RealMatrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

RealMatrix sym(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with x + alpha dx >= 0, given the Cholesky factor of x.
double max_step(const std::vector<Eigen::LLT<RealMatrix>>& chol, const Blocks& dx, int threads) {
  const long nb = static_cast<long>(dx.size());
  double alpha = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : alpha) num_threads(threads)
  for (long b = 0; b < nb; ++b) {
    const auto lower = chol[b].matrixL();
    const RealMatrix w = lower.solve(dx[b]);
    RealMatrix t = lower.solve(w.transpose());
    t = sym(t);
    double lmin;
    if (t.rows() == 1) {
      lmin = t(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(t, Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues()(0);
    }
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

class SchurSolver {
 public:
  bool factor(const RealMatrix& m) {
    m_ = m;
    llt_.compute(m_);
    if (llt_.info() == Eigen::Success) return true;
    const double reg = 1e-13 * std::max(1.0, m_.diagonal().cwiseAbs().maxCoeff());
    RealMatrix shifted = m_;
    shifted.diagonal().array() += reg;
    llt_.compute(shifted);
    if (llt_.info() == Eigen::Success) return true;
    use_ldlt_ = true;
    ldlt_.compute(shifted);
    return ldlt_.info() == Eigen::Success;
  }

  RealVector solve(const RealVector& rhs) const {
    RealVector x = use_ldlt_ ? RealVector(ldlt_.solve(rhs)) : RealVector(llt_.solve(rhs));
    // Iterative refinement against the unregularized matrix while the residual shrinks.
    RealVector r = rhs - m_ * x;
    double rn = r.norm();
    for (int k = 0; k < 5 && rn > 1e-15 * rhs.norm(); ++k) {
      const RealVector x1 = x + (use_ldlt_ ? RealVector(ldlt_.solve(r)) : RealVector(llt_.solve(r)));
      const RealVector r1 = rhs - m_ * x1;
      const double rn1 = r1.norm();
      if (!(rn1 < rn)) break;
      x = x1;
      r = r1;
      rn = rn1;
    }
    return x;
  }

 private:
  RealMatrix m_;
  Eigen::LLT<RealMatrix> llt_;
  Eigen::LDLT<RealMatrix> ldlt_;
  bool use_ldlt_ = false;
};

}  // namespace

IpmResult run_ipm(const SdpData& d0, const SolverOptions& opts) {
  const int threads = solver_threads(opts);
  IpmResult res;
  SdpData d = d0;
  const int m = d.num_rows();
  const long nb = static_cast<long>(d.blocks.size());

  // Row normalization.
  RealVector row_norm = RealVector::Zero(m);
  for (const auto& blk : d.blocks)
    for (const auto& t : blk.terms) row_norm(t.row) += t.scale * t.scale * d.coeffs[t.coeff].frobenius_sq();
  for (int k = 0; k < m; ++k) {
    row_norm(k) = std::sqrt(row_norm(k));
    if (row_norm(k) == 0.0) {
      if (d.b(k) != 0.0) {
        res.status = SolverStatus::infeasible;
        res.message = "equality row with no coefficients has a nonzero right-hand side";
        return res;
      }
      row_norm(k) = 1.0;
    }
    d.b(k) /= row_norm(k);
  }
  for (auto& blk : d.blocks)
    for (auto& t : blk.terms) t.scale /= row_norm(t.row);

  // Data scaling.
  double c_norm = 0.0;
  for (const auto& blk : d.blocks) c_norm += blk.c.squaredNorm();
  c_norm = std::sqrt(c_norm);
  const double bscale = std::max(1.0, d.b.norm());
  const double cscale = std::max(1.0, c_norm);
  d.b /= bscale;
  for (auto& blk : d.blocks) blk.c /= cscale;
  const double b_norm = d.b.norm();
  c_norm /= cscale;

  // Starting point.
  Blocks x(nb), z(nb);
  long total_dim = 0;
  for (long b = 0; b < nb; ++b) {
    const auto& blk = d.blocks[b];
    const double n = blk.dim;
    double xi = std::max(10.0, std::sqrt(n)), eta = std::max(10.0, std::sqrt(n));
    eta = std::max(eta, blk.c.norm());
    for (const auto& t : blk.terms) {
      const double an = std::abs(t.scale) * std::sqrt(d.coeffs[t.coeff].frobenius_sq());
      xi = std::max(xi, n * (1.0 + std::abs(d.b(t.row))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    x[b] = xi * RealMatrix::Identity(blk.dim, blk.dim);
    z[b] = eta * RealMatrix::Identity(blk.dim, blk.dim);
    total_dim += blk.dim;
  }
  RealVector y = RealVector::Zero(m);

  const double ptol = 0.1 * opts.feasibility_tol;
  const double dtol = opts.feasibility_tol;
  const double gtol = opts.gap_tol;
  int stalls = 0;

  // Best iterate seen, for acceptance at reduced accuracy after a breakdown.
  struct Snapshot {
    bool reduced = false;
    double merit = std::numeric_limits<double>::infinity();
    Blocks x, z;
    RealVector y;
    double relp = 0.0, reld = 0.0, gap = 0.0, pobj = 0.0, dobj = 0.0;
    int it = 0;
  } best;

  for (int it = 0;; ++it) {
    res.iterations = it;
    const RealVector ax = apply_a(d, x, threads);
    const RealVector rp = d.b - ax;
    const Blocks aty = apply_at(d, y, threads);
    Blocks rd(nb);
    for (long b = 0; b < nb; ++b) rd[b] = d.blocks[b].c - z[b] - aty[b];
    Blocks cblocks(nb);
    for (long b = 0; b < nb; ++b) cblocks[b] = d.blocks[b].c;
    const double pobj = inner(cblocks, x);
    const double dobj = d.b.dot(y);
    const double relp = rp.norm() / (1.0 + b_norm);
    const double reld = frob(rd) / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = inner(x, z) / static_cast<double>(total_dim);
    res.primal_infeasibility = relp;
    res.dual_infeasibility = reld;
    res.relative_gap = gap;
    res.primal_objective = pobj * bscale * cscale;
    res.dual_objective = dobj * bscale * cscale;
    const double merit = std::max({relp / ptol, reld / dtol, gap / gtol});
    // Iterates within the reduced tolerance rank ahead of all others.
    const bool reduced = relp <= opts.reduced_tol && reld <= opts.reduced_tol && gap <= opts.reduced_tol;
    if ((reduced && !best.reduced) || (reduced == best.reduced && merit < best.merit)) {
      best.reduced = reduced;
      best.merit = merit;
      best.x = x;
      best.z = z;
      best.y = y;
      best.relp = relp;
      best.reld = reld;
      best.gap = gap;
      best.pobj = res.primal_objective;
      best.dobj = res.dual_objective;
      best.it = it;
    }
    if (opts.verbose)
      std::fprintf(stderr, "ipm %3d  p %.9e  d %.9e  relp %.2e  reld %.2e  gap %.2e  mu %.2e\n", it,
                   res.primal_objective, res.dual_objective, relp, reld, gap, mu);

    if (relp <= ptol && reld <= dtol && gap <= gtol) {
      res.status = SolverStatus::optimal;
      res.message = "converged";
      break;
    }
    if (dobj > 0.0) {
      Blocks s(nb);
      for (long b = 0; b < nb; ++b) s[b] = aty[b] + z[b];
      if (frob(s) / dobj < 1e-8) {
        res.status = SolverStatus::infeasible;
        res.message = "primal infeasibility certificate found";
        break;
      }
    }
    if (pobj < 0.0 && ax.norm() / -pobj < 1e-8) {
      res.status = SolverStatus::unbounded;
      res.message = "dual infeasibility certificate found";
      break;
    }
    // Once a reduced-accuracy iterate exists, a large jump in primal residual means the
    // Newton systems have become too ill-conditioned to recover; stop and restore it.
    if (best.reduced && relp > 100.0 * std::max(best.relp, ptol)) {
      res.status = SolverStatus::numerical_failure;
      res.message = "primal feasibility lost near the optimum";
      break;
    }
    if (it >= opts.max_iterations) {
      res.status = SolverStatus::numerical_failure;
      std::ostringstream os;
      os << "iteration limit reached (relp " << relp << ", reld " << reld << ", gap " << gap << ")";
      res.message = os.str();
      break;
    }

    std::vector<Eigen::LLT<RealMatrix>> xchol(nb), zchol(nb);
    Blocks zi(nb);
    bool ok = true;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(&& : ok)
    for (long b = 0; b < nb; ++b) {
      xchol[b].compute(x[b]);
      zchol[b].compute(z[b]);
      if (xchol[b].info() != Eigen::Success || zchol[b].info() != Eigen::Success) {
        ok = false;
        continue;
      }
      zi[b] = zchol[b].solve(RealMatrix::Identity(z[b].rows(), z[b].cols()));
      zi[b] = sym(zi[b]);
    }
    if (!ok) {
      res.status = SolverStatus::numerical_failure;
      res.message = "iterate lost positive definiteness";
      break;
    }

    SchurSolver schur;
    if (!schur.factor(schur_matrix(d, x, zi, threads))) {
      res.status = SolverStatus::numerical_failure;
      res.message = "Schur complement factorization failed";
      break;
    }

    // Predictor.
    Blocks xrz(nb);
    for (long b = 0; b < nb; ++b) xrz[b] = x[b] * rd[b] * zi[b];
    const RealVector h = apply_a(d, xrz, threads);
    RealVector dy = schur.solve(d.b + h);
    Blocks atdy = apply_at(d, dy, threads);
    Blocks dz(nb), dx(nb);
    for (long b = 0; b < nb; ++b) {
      dz[b] = rd[b] - atdy[b];
      dx[b] = -x[b] - sym(x[b] * dz[b] * zi[b]);
    }
    const double ap_aff = std::min(1.0, max_step(xchol, dx, threads));
    const double ad_aff = std::min(1.0, max_step(zchol, dz, threads));
    Blocks xa(nb), za(nb);
    for (long b = 0; b < nb; ++b) {
      xa[b] = x[b] + ap_aff * dx[b];
      za[b] = z[b] + ad_aff * dz[b];
    }
    const double mu_aff = inner(xa, za) / static_cast<double>(total_dim);
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2));
    const double sigma = std::min(1.0, std::pow(std::max(0.0, mu_aff / mu), expon));

    // Corrector.
    Blocks kzi(nb);
    for (long b = 0; b < nb; ++b) kzi[b] = dx[b] * dz[b] * zi[b];
    const RealVector azi = apply_a(d, zi, threads);
    const RealVector akz = apply_a(d, kzi, threads);
    dy = schur.solve(d.b - sigma * mu * azi + h + akz);
    atdy = apply_at(d, dy, threads);
    for (long b = 0; b < nb; ++b) {
      dz[b] = rd[b] - atdy[b];
      dx[b] = sigma * mu * zi[b] - x[b] - sym(x[b] * dz[b] * zi[b]) - sym(kzi[b]);
    }
    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    double ap = std::min(1.0, gamma * max_step(xchol, dx, threads));
    double ad = std::min(1.0, gamma * max_step(zchol, dz, threads));
    // Backtrack while rounding leaves a new iterate without a Cholesky factor.
    Blocks xn(nb), zn(nb);
    for (int tries = 0;; ++tries) {
      bool pd = true;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(&& : pd)
      for (long b = 0; b < nb; ++b) {
        xn[b] = x[b] + ap * dx[b];
        zn[b] = z[b] + ad * dz[b];
        pd = Eigen::LLT<RealMatrix>(xn[b]).info() == Eigen::Success &&
             Eigen::LLT<RealMatrix>(zn[b]).info() == Eigen::Success;
      }
      if (pd || tries == 8) break;
      ap *= 0.8;
      ad *= 0.8;
    }
    x.swap(xn);
    z.swap(zn);
    y += ad * dy;

    stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;
    if (stalls >= 3) {
      res.status = SolverStatus::numerical_failure;
      res.message = "step lengths collapsed";
      break;
    }
  }

  if (res.status == SolverStatus::numerical_failure && best.merit < std::numeric_limits<double>::infinity()) {
    x = best.x;
    y = best.y;
    res.primal_infeasibility = best.relp;
    res.dual_infeasibility = best.reld;
    res.relative_gap = best.gap;
    res.primal_objective = best.pobj;
    res.dual_objective = best.dobj;
    if (best.reduced) {
      res.status = SolverStatus::optimal;
      res.reduced_accuracy = true;
      std::ostringstream os;
      os << "converged to reduced accuracy at iteration " << best.it << " (" << res.message << ")";
      res.message = os.str();
    }
  }
  res.x.resize(nb);
  for (long b = 0; b < nb; ++b) res.x[b] = bscale * x[b];
  res.y.resize(m);
  for (int k = 0; k < m; ++k) res.y(k) = cscale * y(k) / row_norm(k);
  return res;
}

}  // namespace qtb::sdp

// ---------------------------------------------------------------------------

namespace qtb {

namespace {

// max_c |value_c - b_c| / max(1, ||row_c||_F)
double scaled_residual(const ConicProgram& p, const std::vector<ComplexMatrix>& values) {
  double worst = 0.0;
  const auto& eqs = p.equalities();
  for (std::size_t c = 0; c < eqs.size(); ++c) {
    double norm_sq = 0.0;
    for (const auto& t : eqs[c].terms) norm_sq += t.scale * t.scale * std::pow(t.coeff->frobenius_norm(), 2);
    const double r = std::abs(p.constraint_value(static_cast<int>(c), values) - eqs[c].rhs);
    worst = std::max(worst, r / std::max(1.0, std::sqrt(norm_sq)));
  }
  return worst;
}

}  // namespace

SolverReport InteriorPointBackend::solve(const ConicProgram& p, const SolverOptions& opts) const {
  const auto t0 = std::chrono::steady_clock::now();
  SolverReport rep;
  auto finish = [&]() {
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  };

  const ConicProgram q = real_embed(p);
  sdp::LoweredProgram low = sdp::lower_program(q);
  if (opts.presolve) {
    const auto pre = sdp::find_independent_rows(low.data);
    if (!pre.consistent) {
      rep.status = SolverStatus::infeasible;
      std::ostringstream os;
      os << "presolve: dependent equality rows disagree (mismatch " << pre.worst_mismatch << ")";
      rep.message = os.str();
      return finish();
    }
    if (static_cast<int>(pre.keep.size()) < low.data.num_rows()) {
      rep.removed_rows = low.data.num_rows() - static_cast<int>(pre.keep.size());
      low.data = sdp::restrict_rows(low.data, pre.keep);
    }
  }

  const sdp::IpmResult r = sdp::run_ipm(low.data, opts);
  rep.status = r.status;
  rep.iterations = r.iterations;
  rep.dual_objective = r.dual_objective;
  rep.primal_infeasibility = r.primal_infeasibility;
  rep.dual_infeasibility = r.dual_infeasibility;
  rep.relative_gap = r.relative_gap;
  rep.message = r.message;

  for (const auto& blocks : low.var_blocks) {
    RealMatrix acc = RealMatrix::Zero(r.x[blocks.front().first].rows(), r.x[blocks.front().first].cols());
    for (const auto& [blk, sgn] : blocks) acc += sgn * r.x[blk];
    rep.primal.push_back(deembed_matrix(acc));
  }
  rep.objective_value = p.objective_value(rep.primal);
  rep.max_residual = scaled_residual(p, rep.primal);
  const double accept = r.reduced_accuracy ? opts.reduced_tol : opts.feasibility_tol;
  if (rep.status == SolverStatus::optimal && !(rep.max_residual <= accept)) {
    rep.status = SolverStatus::numerical_failure;
    std::ostringstream os;
    os << "converged iterate misses the feasibility tolerance (residual " << rep.max_residual << ")";
    rep.message = os.str();
  }
  return finish();
}

}  // namespace qtb
