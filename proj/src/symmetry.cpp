/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qtb {

namespace {

void partitions_rec(int remaining, int max_part, Partition& cur, std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(remaining - p, p, cur, out);
    cur.pop_back();
  }
}

void tableaux_rec(const Partition& shape, int next, int n, Tableau& t, std::vector<Tableau>& out) {
  if (next > n) {
    out.push_back(t);
    return;
  }
  for (std::size_t r = 0; r < shape.size(); ++r) {
    const int len = static_cast<int>(t[r].size());
    if (len >= shape[r]) continue;
    if (r > 0 && static_cast<int>(t[r - 1].size()) <= len) continue;
    t[r].push_back(next);
    tableaux_rec(shape, next + 1, n, t, out);
    t[r].pop_back();
  }
}

int factorial(int n) {
  int f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

long ipow(long b, int e) {
  long r = 1;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

}  // namespace

std::vector<Partition> partitions(int n) {
  if (n < 1) throw ContractError("partitions require n >= 1");
  std::vector<Partition> out;
  Partition cur;
  partitions_rec(n, n, cur, out);
  return out;
}

std::vector<Tableau> standard_tableaux(const Partition& shape) {
  int n = 0;
  for (int p : shape) n += p;
  std::vector<Tableau> out;
  Tableau t(shape.size());
  tableaux_rec(shape, 1, n, t, out);
  return out;
}

std::vector<RealMatrix> young_generators(const Partition& shape) {
  const auto tabs = standard_tableaux(shape);
  const long dim = static_cast<long>(tabs.size());
  int n = 0;
  for (int p : shape) n += p;

  // Position lookup and tableau index by content.
  std::map<Tableau, long> index;
  for (long i = 0; i < dim; ++i) index[tabs[i]] = i;
  auto locate = [](const Tableau& t, int v) {
    for (std::size_t r = 0; r < t.size(); ++r)
      for (std::size_t c = 0; c < t[r].size(); ++c)
        if (t[r][c] == v) return std::pair<int, int>(static_cast<int>(r), static_cast<int>(c));
    throw ContractError("value missing from tableau");
  };

  std::vector<RealMatrix> gens;
  for (int g = 0; g + 1 < n; ++g) {
    const int a = g + 1, b = g + 2;  // values exchanged
    RealMatrix m = RealMatrix::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
      const auto [ra, ca] = locate(tabs[i], a);
      const auto [rb, cb] = locate(tabs[i], b);
      const double r = static_cast<double>((cb - rb) - (ca - ra));
      m(i, i) = 1.0 / r;
      if (std::abs(r) > 1.0) {
        Tableau s = tabs[i];
        s[ra][ca] = b;
        s[rb][cb] = a;
        const long j = index.at(s);
        m(j, i) = std::sqrt(1.0 - 1.0 / (r * r));
      }
    }
    gens.push_back(std::move(m));
  }
  return gens;
}

std::vector<GroupElement> young_representation(const Partition& shape) {
  int n = 0;
  for (int p : shape) n += p;
  const auto gens = young_generators(shape);
  const long dim = gens.empty() ? 1 : gens.front().rows();

  std::vector<int> id(n);
  for (int j = 0; j < n; ++j) id[j] = j;
  std::vector<GroupElement> out{{id, RealMatrix::Identity(dim, dim)}};
  std::map<std::vector<int>, std::size_t> seen{{id, 0}};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (int g = 0; g + 1 < n; ++g) {
      std::vector<int> s(id);
      std::swap(s[g], s[g + 1]);
      std::vector<int> prod(n);
      for (int j = 0; j < n; ++j) prod[j] = out[head].perm[s[j]];
      if (seen.count(prod)) continue;
      seen[prod] = out.size();
      out.push_back({prod, out[head].rho * gens[g]});
    }
  }
  if (static_cast<int>(out.size()) != factorial(n)) throw ContractError("group enumeration is incomplete");
  return out;
}

std::vector<IsotypicBlock> isotypic_decomposition(int copies, int dim) {
  if (copies < 1 || dim < 1) throw DimensionError("isotypic decomposition needs copies, dim >= 1");
  const long total = ipow(dim, copies);
  const double order = factorial(copies);

  // Letter multisets: orbit key = sorted digits.
  auto digits = [&](long w) {
    std::vector<int> d(copies);
    for (int j = copies - 1; j >= 0; --j) {
      d[j] = static_cast<int>(w % dim);
      w /= dim;
    }
    return d;
  };
  std::map<std::vector<int>, std::vector<long>> orbits;
  for (long w = 0; w < total; ++w) {
    auto d = digits(w);
    std::sort(d.begin(), d.end());
    orbits[d].push_back(w);
  }

  std::vector<IsotypicBlock> out;
  for (const auto& shape : partitions(copies)) {
    const auto group = young_representation(shape);
    const int dl = static_cast<int>(group.front().rho.rows());
    std::vector<std::vector<long>> maps;
    for (const auto& g : group) maps.push_back(permutation_index_map(copies, dim, g.perm));

    // E_kl v = (d / n!) sum_g rho(g)_kl U_g v
    auto apply_unit = [&](int k, int l, const RealVector& v) {
      RealVector r = RealVector::Zero(total);
      for (std::size_t gi = 0; gi < group.size(); ++gi) {
        const double c = group[gi].rho(k, l);
        if (c == 0.0) continue;
        for (long w = 0; w < total; ++w)
          if (v(w) != 0.0) r(maps[gi][w]) += c * v(w);
      }
      return RealVector(r * (dl / order));
    };

    std::vector<RealVector> cols;
    for (const auto& [key, members] : orbits) {
      std::vector<RealVector> local;
      for (long w : members) {
        RealVector e = RealVector::Zero(total);
        e(w) = 1.0;
        RealVector u = apply_unit(0, 0, e);
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& q : local) u -= q.dot(u) * q;
        const double nrm = u.norm();
        if (nrm > 1e-10) local.push_back(u / nrm);
      }
      for (auto& q : local) {
        for (long w = 0; w < total; ++w)
          if (std::abs(q(w)) < 1e-15) q(w) = 0.0;
        cols.push_back(std::move(q));
      }
    }
    if (cols.empty()) continue;

    IsotypicBlock blk;
    blk.shape = shape;
    blk.irrep_dim = dl;
    blk.multiplicity = static_cast<int>(cols.size());
    RealMatrix v1(total, blk.multiplicity);
    for (int c = 0; c < blk.multiplicity; ++c) v1.col(c) = cols[c];
    blk.v.push_back(v1);
    for (int k = 1; k < dl; ++k) {
      RealMatrix vk(total, blk.multiplicity);
      for (int c = 0; c < blk.multiplicity; ++c) {
        RealVector col = apply_unit(k, 0, v1.col(c));
        for (long w = 0; w < total; ++w)
          if (std::abs(col(w)) < 1e-15) col(w) = 0.0;
        vk.col(c) = col;
      }
      blk.v.push_back(std::move(vk));
    }
    out.push_back(std::move(blk));
  }
  return out;
}

RealMatrix compress(const IsotypicBlock& block, const RealMatrix& f) {
  RealMatrix out = RealMatrix::Zero(block.multiplicity, block.multiplicity);
  for (const auto& v : block.v) out.noalias() += v.transpose() * f * v;
  return out;
}

}  // namespace qtb
