/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

// End-to-end acceptance checks. Each criterion prints detail lines followed by exactly one
// "CRITERION k: PASS|FAIL ..." line. Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../oracles.hpp"
#include "qtb/bounds.hpp"
#include "qtb/experiment.hpp"

using namespace qtb;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Options {
  bool full = false;
  bool ppt_info = true;
  std::set<int> only;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

bool report(int k, bool pass, const std::string& summary) {
  std::printf("CRITERION %d: %s  %s\n", k, pass ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  return pass;
}

BoundResult upper_at(const ProcessData& pd, int params, StrategyKind k, int n_uses, int m, std::uint64_t seed,
                     int restarts = 1) {
  UpperBoundConfig cfg;
  cfg.m = m;
  cfg.seed = seed;
  cfg.restarts = restarts;
  cfg.strategy = StrategyClass(k, n_uses);
  return compute_upper(pd, WeightMatrix::identity(params), cfg);
}

BoundResult lower_at(const ProcessData& pd, int params, StrategyKind k, int n_uses, int n, bool ppt) {
  LowerBoundConfig cfg;
  cfg.n = n;
  cfg.ppt = ppt;
  cfg.strategy = StrategyClass(k, n_uses);
  return compute_lower(pd, WeightMatrix::identity(params), cfg);
}

std::string status_of(const BoundResult& r) { return r.ok() ? "" : "  [" + to_string(r.report.status) + "]"; }

// Upper bounds of the noiseless parallel sweep, shared by criteria 1 and 2. At m = 125 about one
// vector set in four misses the optimum by 1e-2 or more, so each point keeps the best of three.
constexpr int kSweepRestarts = 3;

struct SweepPoint {
  double t = 0.0;
  BoundResult upper;
};

const std::vector<SweepPoint>& fig3_uppers() {
  static const std::vector<SweepPoint> pts = [] {
    const ExperimentConfig c = preset("fig3");
    std::vector<SweepPoint> out;
    for (std::size_t k = 0; k < c.sweep.size(); ++k) {
      const ChannelSpec ch = channel_at(c, k);
      const ProcessData pd = process_data(make_family(ch), ch.theta, 2);
      out.push_back({ch.t, upper_at(pd, 3, StrategyKind::parallel, 2, 125, derive_seed(kSeed, k), kSweepRestarts)});
    }
    return out;
  }();
  return pts;
}

bool criterion1(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig c = preset("fig3");
  const auto& ups = fig3_uppers();
  bool ok = true;
  double worst_up = 0.0, worst_low = 0.0, worst_gap = 0.0, worst_ppt = 0.0;
  std::printf("  criterion 1: noiseless parallel, theta=(0.5,0.5,0.7071), N=2, m=125 (best of %d), n=2\n",
              kSweepRestarts);
  std::printf("  %6s %11s %11s %11s %11s %9s %9s %9s\n", "t", "analytic", "B+", "B-(n=2)", "B-(ppt,1)", "relB+",
              "relB-", "gap");
  for (std::size_t k = 0; k < ups.size(); ++k) {
    const ChannelSpec ch = channel_at(c, k);
    const ProcessData pd = process_data(make_family(ch), ch.theta, 2);
    const double a = analytic_parallel_lower_bound(ch.theta, ch.t, 2);
    const BoundResult& up = ups[k].upper;
    const BoundResult lo = lower_at(pd, 3, StrategyKind::parallel, 2, 2, false);
    // PPT at n=1 is informational only: the criterion fixes the plain n=2 extension.
    const bool want_ppt = o.ppt_info && (k == 0 || k == ups.size() / 2 || k + 1 == ups.size());
    const BoundResult pl = want_ppt ? lower_at(pd, 3, StrategyKind::parallel, 2, 1, true) : BoundResult{};
    const double ru = rel(up.value, a), rl = rel(lo.value, a), gap = (up.value - lo.value) / up.value;
    worst_up = std::max(worst_up, ru);
    worst_low = std::max(worst_low, rl);
    worst_gap = std::max(worst_gap, gap);
    if (want_ppt && pl.ok()) worst_ppt = std::max(worst_ppt, rel(pl.value, a));
    ok = ok && up.ok() && lo.ok() && ru <= 0.05 && rl <= 0.05 && gap <= 0.05;
    if (want_ppt)
      std::printf("  %6.3f %11.6f %11.6f %11.6f %11.6f %9.2e %9.2e %9.2e%s%s\n", ch.t, a, up.value, lo.value, pl.value,
                  ru, rl, gap, status_of(up).c_str(), status_of(lo).c_str());
    else
      std::printf("  %6.3f %11.6f %11.6f %11.6f %11s %9.2e %9.2e %9.2e%s%s\n", ch.t, a, up.value, lo.value, "-", ru,
                  rl, gap, status_of(up).c_str(), status_of(lo).c_str());
  }
  if (o.ppt_info)
    std::printf("  info: PPT n=1 lower bound worst relative deviation from analytic %.2e (not part of the criterion)\n",
                worst_ppt);
  char buf[256];
  std::snprintf(buf, sizeof buf, "max rel |B+ - A| %.2e, max rel |B- - A| %.2e, max rel (B+ - B-) %.2e, tol 5e-2 (%.0f s)",
                worst_up, worst_low, worst_gap, seconds_since(t0));
  return report(1, ok, buf);
}

bool criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& ups = fig3_uppers();
  const std::array<double, 3> th{0.5, 0.5, std::sqrt(2.0) / 2.0};
  bool ok = true;
  double min_margin = 1e300;
  std::printf("  criterion 2: heuristic probe error against B+ (parallel, N=2, m=125)\n");
  std::printf("  %6s %11s %11s %11s\n", "t", "heuristic", "B+", "margin");
  for (const auto& p : ups) {
    const double h = heuristic_error(th, p.t, 2);
    const double margin = h - p.upper.value;
    min_margin = std::min(min_margin, margin);
    ok = ok && p.upper.ok() && margin >= 1e-3;
    std::printf("  %6.3f %11.6f %11.6f %11.2e%s\n", p.t, h, p.upper.value, margin, status_of(p.upper).c_str());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "min margin heuristic - B+ = %.3e, required >= 1e-3 (%.0f s)", min_margin,
                seconds_since(t0));
  return report(2, ok, buf);
}

bool criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig c = preset("fig3-grid");
  bool ok = true;
  double worst = 0.0;
  std::printf("  criterion 3: 25 points with |theta| = 1, t = 3, N = 2, m = 700\n");
  std::printf("  %7s %7s %7s %11s %11s %9s\n", "theta1", "theta2", "theta3", "analytic", "B+", "rel");
  for (std::size_t k = 0; k < c.sweep.size(); ++k) {
    const ChannelSpec ch = channel_at(c, k);
    const ProcessData pd = process_data(make_family(ch), ch.theta, 2);
    const double a = analytic_parallel_lower_bound(ch.theta, ch.t, 2);
    const BoundResult up = upper_at(pd, 3, StrategyKind::parallel, 2, 700, derive_seed(kSeed + 3, k));
    const double r = rel(up.value, a);
    worst = std::max(worst, r);
    ok = ok && up.ok() && r <= 0.05;
    std::printf("  %7.3f %7.3f %7.3f %11.6f %11.6f %9.2e%s\n", ch.theta[0], ch.theta[1], ch.theta[2], a, up.value, r,
                status_of(up).c_str());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel |B+ - A| = %.3e over %zu points, tol 5e-2 (%.0f s)", worst, c.sweep.size(),
                seconds_since(t0));
  return report(3, ok, buf);
}

bool criterion4(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig c = preset("hierarchy");
  const int m = o.full ? 1500 : 300;
  const StrategyKind order[4] = {StrategyKind::parallel, StrategyKind::sequential, StrategyKind::causal_superposition,
                                 StrategyKind::general_ico};
  // The smoke variant is required to keep the first and third orderings only.
  const bool check_middle = o.full;
  bool ok = true;
  double min_gap[3] = {1e300, 1e300, 1e300};
  std::printf("  criterion 4: hierarchy, theta=(0.5,0.5,0.7071), t=0.1, N=2, m=%d, n=2%s\n", m,
              o.full ? "" : " (smoke variant)");
  std::printf("  %5s %12s %12s %12s %12s %12s %12s\n", "gamma", "B-(i)", "B+(ii)", "B-(ii)", "B+(iii)", "B-(iii)",
              "B+(iv)");
  for (std::size_t k = 0; k < c.sweep.size(); ++k) {
    const ChannelSpec ch = channel_at(c, k);
    const ProcessData pd = process_data(make_family(ch), ch.theta, 2);
    // One vector set per sweep point, shared across classes.
    const std::uint64_t seed = derive_seed(kSeed + 4, k);
    double lo[3], up[3];
    std::string notes;
    for (int j = 0; j < 3; ++j) {
      const BoundResult l = lower_at(pd, 3, order[j], 2, 2, false);
      const BoundResult u = upper_at(pd, 3, order[j + 1], 2, m, seed);
      lo[j] = l.value;
      up[j] = u.value;
      notes += status_of(l) + status_of(u);
      const bool required = j != 1 || check_middle;
      const double gap = lo[j] - up[j];
      min_gap[j] = std::min(min_gap[j], gap);
      if (required) ok = ok && l.ok() && u.ok() && gap > 1e-6;
    }
    std::printf("  %5.2f %12.6f %12.6f %12.6f %12.6f %12.6f %12.6f%s\n", ch.gamma, lo[0], up[0], lo[1], up[1], lo[2],
                up[2], notes.c_str());
  }
  std::printf("  min gaps: B-(i)-B+(ii) %.3e, B-(ii)-B+(iii) %.3e%s, B-(iii)-B+(iv) %.3e\n", min_gap[0], min_gap[1],
              check_middle ? "" : " (not required)", min_gap[2]);
  char buf[200];
  std::snprintf(buf, sizeof buf, "orderings %s strict with gap > 1e-6 at all 9 gamma, m=%d (%.0f s)",
                check_middle ? "(1,2,3)" : "(1,3)", m, seconds_since(t0));
  return report(4, ok, buf);
}

bool criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const double theta = 0.4, t = 1.0;
  const std::array<double, 1> th{theta};
  bool ok = true;
  std::string summary;
  std::printf("  criterion 5: H = theta s3, gamma = 0, t = 1, parallel\n");
  for (int n_uses : {1, 2}) {
    // Independent oracle: best entangled-probe QFI of U^(x)N, bound 1/QFI.
    const oracle::CMat s3 = oracle::pauli(3);
    const oracle::CMat u = (oracle::cplx(0.0, -theta * t) * s3).exp();
    const oracle::CMat du = oracle::cplx(0.0, -t) * s3 * u;
    oracle::CMat un = u, dun = du;
    if (n_uses == 2) {
      un = oracle::kron(u, u);
      dun = oracle::kron(du, u) + oracle::kron(u, du);
    }
    const double qfi_bound = 1.0 / oracle::max_unitary_qfi(un, dun);
    const double closed = 1.0 / (4.0 * n_uses * n_uses * t * t);
    const ProcessData pd = process_data(hamiltonian_family({pauli(3)}, t, 0.0), th, n_uses);
    const BoundResult up = upper_at(pd, 1, StrategyKind::parallel, n_uses, 125, derive_seed(kSeed + 5, n_uses));
    const double r = rel(up.value, qfi_bound);
    ok = ok && up.ok() && r <= 0.03 && std::abs(qfi_bound - closed) <= 1e-12;
    std::printf("  N=%d  oracle 1/QFI %.6f  closed form %.6f  B+ %.6f  rel %.2e%s\n", n_uses, qfi_bound, closed,
                up.value, r, status_of(up).c_str());
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sN=%d rel %.2e", summary.empty() ? "" : ", ", n_uses, r);
    summary += buf;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s, tol 3e-2 (%.0f s)", summary.c_str(), seconds_since(t0));
  return report(5, ok, buf);
}

bool criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, bool>> checks;
  auto add = [&](const std::string& name, bool pass, double value) {
    std::printf("  %-44s %s  (%.3e)\n", name.c_str(), pass ? "ok" : "VIOLATED", value);
    checks.emplace_back(name, pass);
  };
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  {
    const SubsystemLayout layout = SubsystemLayout::canonical(2, 2, 2);
    const long d = layout.total_dim();
    std::vector<LambdaMap> maps;
    for (StrategyKind k : {StrategyKind::parallel, StrategyKind::sequential, StrategyKind::general_ico})
      maps.push_back(lambda_map(StrategyClass(k, 2), layout));
    for (const LambdaMap& m : causal_orders(StrategyClass(StrategyKind::causal_superposition, 2), layout))
      maps.push_back(m);
    double idem = 0.0, tp = 0.0;
    for (const LambdaMap& map : maps)
      for (int rep = 0; rep < 5; ++rep) {
        const ComplexMatrix a = oracle::random_hermitian(d, rng);
        const ComplexMatrix la = map.apply(a);
        idem = std::max(idem, (map.apply(la) - la).norm());
        tp = std::max(tp, std::abs(la.trace() - a.trace()));
      }
    add("Lambda idempotence", idem <= 1e-10, idem);
    add("Lambda trace preservation", tp <= 1e-10, tp);
  }
  {
    double worst = 0.0;
    for (double gamma : {0.0, 0.3, 0.9}) {
      const std::array<double, 3> th{unif(rng), unif(rng), unif(rng)};
      const ChoiOperator e = choi_from_kraus(magnetic_field_family(1.3, gamma).at(th).channel);
      worst = std::max({worst, e.marginal_residual(), -oracle::min_eig(e.matrix)});
      worst = std::max(worst, choi_n_fold(e, {}, 2).choi.marginal_residual());
    }
    add("CPTP Choi marginals and positivity", worst <= 1e-10, worst);
  }
  {
    const auto fam = magnetic_field_family(0.9, 0.35);
    const double h = 1e-5;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const std::array<double, 3> th{unif(rng), unif(rng), unif(rng)};
      const ProcessData pd = process_data(fam, th, 2);
      for (int j = 0; j < 3; ++j) {
        auto plus = th, minus = th;
        plus[j] += h;
        minus[j] -= h;
        const oracle::CMat ep = oracle::choi(oracle::field_kraus(plus.data(), 0.9, 0.35));
        const oracle::CMat em = oracle::choi(oracle::field_kraus(minus.data(), 0.9, 0.35));
        const oracle::CMat fd = (oracle::kron(ep, ep) - oracle::kron(em, em)) / (2.0 * h);
        worst = std::max(worst, (pd.dc[j] - fd).norm() / std::max(1e-3, fd.norm()));
      }
    }
    add("derivative vs central difference, 20 points", worst <= 1e-6, worst);
  }

  // Bounds on a small noisy instance with one shared vector set.
  const std::array<double, 1> th{0.3};
  const ProcessData pd = process_data(hamiltonian_family({pauli(3)}, 1.0, 0.3), th, 2);
  const StrategyKind all[4] = {StrategyKind::parallel, StrategyKind::sequential, StrategyKind::causal_superposition,
                               StrategyKind::general_ico};
  double up[4], lo[4];
  bool solved = true;
  BoundResult seq_upper;
  for (int k = 0; k < 4; ++k) {
    const BoundResult u = upper_at(pd, 1, all[k], 2, 24, 5);
    const BoundResult l = lower_at(pd, 1, all[k], 2, 2, false);
    solved = solved && u.ok() && l.ok();
    up[k] = u.value;
    lo[k] = l.value;
    if (k == 1) seq_upper = u;
  }
  add("all property-suite solves optimal", solved, 0.0);
  {
    double worst = -1e300;
    for (int k = 0; k < 4; ++k) worst = std::max(worst, lo[k] - up[k]);
    add("sandwich B- <= B+ + 1e-6", worst <= 1e-6, worst);
  }
  {
    double worst_u = -1e300, worst_l = -1e300;
    for (int k = 0; k + 1 < 4; ++k) {
      worst_u = std::max(worst_u, up[k + 1] - up[k]);
      worst_l = std::max(worst_l, lo[k + 1] - lo[k]);
    }
    add("class monotonicity of B+ (shared vectors)", worst_u <= 1e-6, worst_u);
    add("class monotonicity of B- (n = 2)", worst_l <= 1e-6, worst_l);
  }
  {
    const ProcessData pd1 = process_data(hamiltonian_family({pauli(3)}, 1.0, 0.3), th, 1);
    // Causal superposition needs two uses; the remaining classes must coincide.
    const double a = upper_at(pd1, 1, StrategyKind::parallel, 1, 24, 5).value;
    const double b = upper_at(pd1, 1, StrategyKind::sequential, 1, 24, 5).value;
    const double c = upper_at(pd1, 1, StrategyKind::general_ico, 1, 24, 5).value;
    const double spread = std::max({a, b, c}) - std::min({a, b, c});
    add("N = 1 class collapse", spread <= 1e-6, spread);
  }
  {
    const ExtractedStrategy es = extract_strategy(seq_upper, th);
    const StrategyCheck chk = check_strategy(es, pd, WeightMatrix::identity(1));
    const double worst = std::max({chk.probability_sum_gap, chk.unbiasedness_residual, chk.membership.residual_norm,
                                   chk.membership.trace_gap, -chk.membership.min_eigenvalue,
                                   std::abs(chk.objective - seq_upper.value)});
    add("extracted strategy residuals", worst <= 1e-6, worst);
    const MonteCarloResult mc = monte_carlo_validate(es, pd.c.matrix, WeightMatrix::identity(1), 1000000, 11);
    const double z = std::abs(mc.value - seq_upper.value) / mc.std_error;
    add("Monte Carlo within 3 sigma at 1e6 shots", mc.shots == 1000000 && z <= 3.0, z);
  }
  {
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const ComplexMatrix f = oracle::random_hermitian(6, rng), x = oracle::random_hermitian(6, rng);
      const double direct = (f * x).trace().real();
      const double embedded = 0.5 * (embed_matrix(f) * embed_matrix(x)).trace();
      worst = std::max({worst, std::abs(direct - embedded), (deembed_matrix(embed_matrix(x)) - x).norm()});
    }
    add("real embedding preserves values", worst <= 1e-12, worst);
  }

  int failed = 0;
  for (const auto& c : checks) failed += c.second ? 0 : 1;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu of %zu properties hold (%.0f s)", checks.size() - failed, checks.size(),
                seconds_since(t0));
  return report(6, failed == 0, buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the strategy-class bounds"};
  Options o;
  std::vector<int> only;
  bool no_ppt = false;
  app.add_flag("--full", o.full, "Run the hierarchy check at m = 1500 with all three orderings");
  app.add_flag("--no-ppt-info", no_ppt, "Skip the informational PPT lower bounds");
  app.add_option("--only", only, "Criteria to run (default: all)")->check(CLI::Range(1, 6));
  CLI11_PARSE(app, argc, argv);
  o.ppt_info = !no_ppt;
  o.only = std::set<int>(only.begin(), only.end());
  auto selected = [&](int k) { return o.only.empty() || o.only.count(k) > 0; };

  std::map<int, bool> results;
  auto run = [&](int k, const auto& fn) {
    if (!selected(k)) return;
    try {
      results[k] = fn();
    } catch (const std::exception& e) {
      results[k] = report(k, false, std::string("aborted: ") + e.what());
    }
  };
  run(6, [] { return criterion6(); });
  run(5, [] { return criterion5(); });
  run(1, [&] { return criterion1(o); });
  run(2, [] { return criterion2(); });
  run(3, [] { return criterion3(); });
  run(4, [&] { return criterion4(o); });
  int failed = 0;
  std::printf("summary:");
  for (const auto& [k, pass] : results) {
    std::printf(" %d=%s", k, pass ? "PASS" : "FAIL");
    failed += pass ? 0 : 1;
  }
  std::printf("\n");
  return failed == 0 ? 0 : 1;
}
