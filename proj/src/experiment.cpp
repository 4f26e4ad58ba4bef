/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "qtb/experiment.hpp"

#ifndef QTB_VERSION
#define QTB_VERSION "unknown"
#endif

namespace qtb {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_token(BoundKind k) {
  switch (k) {
    case BoundKind::upper: return "upper";
    case BoundKind::lower: return "lower";
    case BoundKind::heuristic: return "heuristic";
    case BoundKind::analytic: return "analytic";
  }
  return "?";
}

BoundKind parse_bound_kind(const std::string& token) {
  if (token == "upper") return BoundKind::upper;
  if (token == "lower") return BoundKind::lower;
  if (token == "heuristic") return BoundKind::heuristic;
  if (token == "analytic") return BoundKind::analytic;
  throw ConfigError("unknown bound kind '" + token + "'");
}

namespace {

bool closed_form(BoundKind k) { return k == BoundKind::heuristic || k == BoundKind::analytic; }

int param_count(const ChannelSpec& c) { return static_cast<int>(c.theta.size()); }

std::string label_of(const BoundSpec& b, bool ppt) {
  if (!b.label.empty()) return b.label;
  if (b.kind == BoundKind::lower && ppt) return "lower-ppt";
  return to_token(b.kind);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Task {
  std::size_t point;
  StrategyKind strategy;
  std::size_t bound;
};

std::vector<Task> enumerate_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < c.sweep.size(); ++k)
    for (auto s : c.strategies)
      for (std::size_t b = 0; b < c.bounds.size(); ++b) {
        const auto& spec = c.bounds[b];
        if (!spec.strategies.empty()) {
          if (std::find(spec.strategies.begin(), spec.strategies.end(), s) == spec.strategies.end()) continue;
        } else if (closed_form(spec.kind) && s != StrategyKind::parallel) {
          continue;
        }
        tasks.push_back({k, s, b});
      }
  return tasks;
}

WeightMatrix weight_of(const ExperimentConfig& c, const ChannelSpec& at) {
  return c.weight ? WeightMatrix(*c.weight) : WeightMatrix::identity(param_count(at));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (strategies.empty()) throw ConfigError("strategy list is empty");
  if (bounds.empty()) throw ConfigError("bound list is empty");
  if (sweep.size() == 0) throw ConfigError("sweep grid is empty");
  const std::vector<std::string> vars = {"t", "gamma", "theta1", "theta2", "theta3", "theta"};
  if (std::find(vars.begin(), vars.end(), sweep.variable) == vars.end())
    throw ConfigError("unknown sweep variable '" + sweep.variable + "'");
  if (n_uses < 1) throw ConfigError("n_uses must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");

  auto check_theta = [&](const std::vector<double>& th) {
    if (channel.name == "magnetic_field" && th.size() != 3)
      throw ConfigError("magnetic_field needs a parameter vector of length 3");
    if (channel.name == "hamiltonian" && th.size() != channel.generators.size())
      throw ConfigError("hamiltonian needs one parameter per generator");
    if (th.empty()) throw ConfigError("parameter vector is empty");
  };
  if (channel.name == "magnetic_field") {
  } else if (channel.name == "hamiltonian") {
    if (channel.generators.empty()) throw ConfigError("hamiltonian channel needs generators");
    for (int g : channel.generators)
      if (g < 1 || g > 3) throw ConfigError("hamiltonian generators are Pauli indices 1..3");
  } else if (channel.name == "json") {
    if (channel.file.empty() || !fs::exists(channel.file))
      throw ConfigError("channel file '" + channel.file + "' does not exist");
  } else {
    throw ConfigError("unknown channel '" + channel.name + "'");
  }
  if (sweep.variable == "theta") {
    for (const auto& p : sweep.points) check_theta(p);
  } else {
    check_theta(channel.theta);
    if (sweep.variable.rfind("theta", 0) == 0) {
      const std::size_t idx = static_cast<std::size_t>(sweep.variable.back() - '1');
      if (idx >= channel.theta.size()) throw ConfigError("sweep component exceeds the parameter count");
    }
  }
  if (channel.name != "json" && (channel.t <= 0.0 && sweep.variable != "t")) throw ConfigError("t must be positive");
  if (channel.gamma < 0.0 || channel.gamma > 1.0) throw ConfigError("gamma must lie in [0, 1]");
  if (sweep.variable == "t")
    for (double t : sweep.grid)
      if (!(t > 0.0)) throw ConfigError("t grid values must be positive");
  if (sweep.variable == "gamma")
    for (double g : sweep.grid)
      if (g < 0.0 || g > 1.0) throw ConfigError("gamma grid values must lie in [0, 1]");

  const int p = sweep.variable == "theta" ? static_cast<int>(sweep.points.front().size()) : param_count(channel);
  if (weight && (weight->rows() != p || weight->cols() != p)) throw ConfigError("weight matrix size differs from p");
  for (const auto& b : bounds) {
    if (b.kind == BoundKind::upper) {
      if (b.m.value_or(m) < p + 1) throw ConfigError("upper bounds need m >= p + 1");
      if (b.restarts.value_or(restarts) < 1) throw ConfigError("restarts must be at least 1");
    }
    if (b.kind == BoundKind::lower && b.n.value_or(n) < 1) throw ConfigError("lower bounds need n >= 1");
    if (closed_form(b.kind) && channel.name != "magnetic_field")
      throw ConfigError("closed-form rows are defined for the magnetic_field channel only");
  }
  for (auto s : strategies)
    if (s == StrategyKind::causal_superposition && n_uses != 2)
      throw ConfigError("causal superposition is supported for n_uses = 2 only");
}

std::vector<double> preset_t_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 12; ++k) g.push_back(0.2 + 2.8 * k / 12.0);
  return g;
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig3-grid", "fig4", "fig5", "fig6", "hierarchy"}; }

ExperimentConfig preset(const std::string& name) {
  const std::vector<double> theta0 = {0.5, 0.5, std::sqrt(2.0) / 2.0};
  const std::string grid_note = "t grid: 12 evenly spaced points t_k = 0.2 + 2.8 k / 12, k = 1..12, in (0.2, 3.0]";
  ExperimentConfig c;
  c.name = name;
  c.channel.name = "magnetic_field";
  c.channel.theta = theta0;
  c.n_uses = 2;
  c.output = "runs/" + name;
  auto upper = [](int m) {
    BoundSpec b;
    b.kind = BoundKind::upper;
    b.m = m;
    return b;
  };
  auto lower = [](int n, bool ppt) {
    BoundSpec b;
    b.kind = BoundKind::lower;
    b.n = n;
    b.ppt = ppt;
    return b;
  };
  auto kind = [](BoundKind k) {
    BoundSpec b;
    b.kind = k;
    return b;
  };
  auto only = [](BoundSpec b, StrategyKind s) {
    b.strategies = {s};
    return b;
  };
  const std::vector<double> gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  if (name == "fig2" || name == "fig3") {
    c.strategies = {StrategyKind::parallel};
    c.sweep.variable = "t";
    c.sweep.grid = preset_t_grid();
    c.bounds = {upper(125)};
    if (name == "fig3") c.bounds.push_back(lower(2, false)), c.bounds.push_back(lower(1, true));
    c.bounds.push_back(kind(BoundKind::heuristic));
    c.bounds.push_back(kind(BoundKind::analytic));
    c.note = grid_note;
  } else if (name == "fig3-grid") {
    c.strategies = {StrategyKind::parallel};
    c.channel.t = 3.0;
    c.sweep.variable = "theta";
    const double vals[5] = {-0.6, -0.3, 0.0, 0.3, 0.6};
    for (double a : vals)
      for (double b : vals) c.sweep.points.push_back({a, b, std::sqrt(1.0 - a * a - b * b)});
    c.bounds = {upper(700), kind(BoundKind::analytic)};
    c.note = "parameter grid: theta1, theta2 in {-0.6, -0.3, 0, 0.3, 0.6}, theta3 = sqrt(1 - theta1^2 - theta2^2)";
  } else if (name == "fig4" || name == "fig5" || name == "fig6" || name == "hierarchy") {
    c.channel.t = 0.1;
    c.sweep.variable = "gamma";
    c.sweep.grid = gammas;
    const StrategyKind order[4] = {StrategyKind::parallel, StrategyKind::sequential,
                                   StrategyKind::causal_superposition, StrategyKind::general_ico};
    if (name == "hierarchy") {
      c.strategies = {order[0], order[1], order[2], order[3]};
      c.bounds = {upper(1500), lower(2, false), lower(1, true)};
    } else {
      const int k = name == "fig4" ? 0 : name == "fig5" ? 1 : 2;
      c.strategies = {order[k], order[k + 1]};
      c.bounds = {only(lower(2, false), order[k]), only(lower(1, true), order[k]), only(upper(1500), order[k + 1])};
    }
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Sweep

double sweep_value_at(const ExperimentConfig& c, std::size_t k) {
  return c.sweep.variable == "theta" ? static_cast<double>(k) : c.sweep.grid.at(k);
}

ChannelSpec channel_at(const ExperimentConfig& c, std::size_t k) {
  ChannelSpec s = c.channel;
  const std::string& v = c.sweep.variable;
  if (v == "t") s.t = c.sweep.grid.at(k);
  else if (v == "gamma") s.gamma = c.sweep.grid.at(k);
  else if (v == "theta") s.theta = c.sweep.points.at(k);
  else s.theta.at(static_cast<std::size_t>(v.back() - '1')) = c.sweep.grid.at(k);
  return s;
}

ParamChannelFamily make_family(const ChannelSpec& spec) {
  if (spec.name == "magnetic_field") return magnetic_field_family(spec.t, spec.gamma);
  if (spec.name == "hamiltonian") {
    std::vector<ComplexMatrix> gens;
    for (int g : spec.generators) gens.push_back(pauli(g));
    return hamiltonian_family(std::move(gens), spec.t, spec.gamma);
  }
  if (spec.name == "json") return load_channel_json(spec.file);
  throw ConfigError("unknown channel '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Run

std::string csv_header() { return "sweep_value,strategy,bound_kind,value,status,m_or_n,seed,wall_time_s"; }

std::string csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << format_double(r.sweep_value) << ',' << r.strategy << ',' << r.bound_kind << ',' << format_double(r.value)
     << ',' << r.status << ',' << r.m_or_n << ',' << r.seed << ',' << format_double(r.wall_time_s);
  return os.str();
}

namespace {

ResultRow run_task(const ExperimentConfig& c, const Task& task, std::size_t index, const fs::path& solution_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const BoundSpec& spec = c.bounds[task.bound];
  const ChannelSpec ch = channel_at(c, task.point);
  const StrategyClass sc(task.strategy, c.n_uses);
  const bool ppt = spec.ppt.value_or(c.ppt);

  ResultRow row;
  row.sweep_value = sweep_value_at(c, task.point);
  row.strategy = to_token(task.strategy);
  row.bound_kind = label_of(spec, spec.kind == BoundKind::lower && ppt);
  try {
    if (closed_form(spec.kind)) {
      row.value = spec.kind == BoundKind::heuristic ? heuristic_error(ch.theta, ch.t, c.n_uses)
                                                    : analytic_parallel_lower_bound(ch.theta, ch.t, c.n_uses);
      row.status = "closed_form";
    } else {
      const WeightMatrix w = weight_of(c, ch);
      const ProcessData pd = process_data(make_family(ch), ch.theta, c.n_uses);
      BoundResult res;
      if (spec.kind == BoundKind::upper) {
        UpperBoundConfig uc;
        uc.m = spec.m.value_or(c.m);
        uc.restarts = spec.restarts.value_or(c.restarts);
        uc.seed = derive_seed(c.seed, task.point);
        uc.strategy = sc;
        res = compute_upper(pd, w, uc, c.solver);
      } else {
        LowerBoundConfig lc;
        lc.n = spec.n.value_or(c.n);
        lc.ppt = ppt;
        lc.strategy = sc;
        res = compute_lower(pd, w, lc, c.solver);
      }
      row.is_solve = true;
      row.value = res.value;
      row.status = to_string(res.report.status);
      row.m_or_n = res.m_or_n;
      row.seed = spec.kind == BoundKind::upper ? res.seed : 0;
      row.max_residual = res.report.max_residual;
      row.primal_infeasibility = res.report.primal_infeasibility;
      row.dual_infeasibility = res.report.dual_infeasibility;
      row.relative_gap = res.report.relative_gap;
      row.iterations = res.report.iterations;
      row.attempts = res.attempts;
      row.message = res.report.message;
      if (!res.note.empty()) row.message += "; " + res.note;
      if (spec.kind == BoundKind::upper && res.ok()) {
        const ExtractedStrategy es = extract_strategy(res, ch.theta);
        row.dropped_vectors = static_cast<int>(es.dropped_indices.size());
        if (c.save_solutions) {
          char name[64];
          std::snprintf(name, sizeof name, "row_%04zu.json", index);
          json wj = json::array();
          for (long i = 0; i < w.matrix().rows(); ++i) {
            json r = json::array();
            for (long k = 0; k < w.matrix().cols(); ++k) r.push_back(w.matrix()(i, k));
            wj.push_back(r);
          }
          const json out = {{"channel", channel_to_json(ch)},
                            {"n_uses", c.n_uses},
                            {"weight", wj},
                            {"value", res.value},
                            {"strategy", strategy_to_json(es)}};
          std::ofstream f(solution_dir / name);
          f << out.dump();
          row.solution_file = (fs::path("solutions") / name).string();
        }
      }
    }
  } catch (const CapacityError& e) {
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.status = "capacity_exceeded";
    row.is_solve = true;
    row.message = e.what();
  } catch (const SingularityError& e) {
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.status = "singular";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.status = "error";
    row.is_solve = !closed_form(spec.kind);
    row.message = e.what();
  }
  if (c.record_wall_time)
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

json row_to_json(const ResultRow& r) {
  json j = {{"sweep_value", r.sweep_value},
            {"strategy", r.strategy},
            {"bound_kind", r.bound_kind},
            {"value", std::isnan(r.value) ? json(nullptr) : json(r.value)},
            {"status", r.status},
            {"m_or_n", r.m_or_n},
            {"seed", r.seed},
            {"wall_time_s", r.wall_time_s}};
  if (r.is_solve) {
    j["max_residual"] = r.max_residual;
    j["primal_infeasibility"] = r.primal_infeasibility;
    j["dual_infeasibility"] = r.dual_infeasibility;
    j["relative_gap"] = r.relative_gap;
    j["iterations"] = r.iterations;
    j["attempts"] = r.attempts;
    j["dropped_vectors"] = r.dropped_vectors;
  }
  if (!r.message.empty()) j["message"] = r.message;
  if (!r.solution_file.empty()) j["solution"] = r.solution_file;
  return j;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& c) {
  c.validate();
  const fs::path dir(c.output);
  fs::create_directories(dir);
  const fs::path solution_dir = dir / "solutions";
  if (c.save_solutions) fs::create_directories(solution_dir);

  const auto tasks = enumerate_tasks(c);
  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) rows[i] = run_task(c, tasks[i], i, solution_dir);
  };
  const int nworkers = std::min<int>(c.workers, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nworkers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunOutcome out;
  out.rows = rows;
  out.csv_path = (dir / "results.csv").string();
  out.manifest_path = (dir / "manifest.json").string();
  {
    std::ofstream csv(out.csv_path);
    csv << csv_header() << '\n';
    for (const auto& r : rows) csv << csv_line(r) << '\n';
  }
  json jrows = json::array();
  for (const auto& r : rows) {
    jrows.push_back(row_to_json(r));
    if (r.is_solve && r.status != "optimal") out.all_optimal = false;
  }
  json manifest = {{"tool", "bounds"},
                   {"version", QTB_VERSION},
                   {"config", config_to_json(c)},
                   {"csv", "results.csv"},
                   {"columns", csv_header()},
                   {"rows", jrows},
                   {"all_optimal", out.all_optimal}};
  if (!c.note.empty()) manifest["note"] = c.note;
  std::ofstream(out.manifest_path) << manifest.dump(2) << '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.residuals_ok && r.monte_carlo_ok; });
}

ValidationReport validate_run(const std::string& manifest_path, long shots, double tol, std::uint64_t seed) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open run manifest " + manifest_path);
  json manifest;
  in >> manifest;
  const fs::path base = fs::path(manifest_path).parent_path();
  ValidationReport rep;
  rep.shots = shots;
  rep.tolerance = tol;
  bool any = false;
  for (const auto& row : manifest.at("rows")) {
    if (!row.contains("solution")) continue;
    any = true;
    const fs::path file = base / row.at("solution").get<std::string>();
    std::ifstream sf(file);
    if (!sf) throw std::runtime_error("missing solution file " + file.string());
    json sol;
    sf >> sol;
    const ChannelSpec ch = channel_from_json(sol.at("channel"));
    const int n_uses = sol.at("n_uses").get<int>();
    const auto wv = sol.at("weight").get<std::vector<std::vector<double>>>();
    RealMatrix wm(static_cast<long>(wv.size()), static_cast<long>(wv.size()));
    for (std::size_t i = 0; i < wv.size(); ++i)
      for (std::size_t k = 0; k < wv.size(); ++k) wm(static_cast<long>(i), static_cast<long>(k)) = wv[i][k];
    const WeightMatrix w(wm);
    const ExtractedStrategy es = strategy_from_json(sol.at("strategy"));
    const ProcessData pd = process_data(make_family(ch), ch.theta, n_uses);

    ValidationRow vr;
    vr.solution_file = row.at("solution").get<std::string>();
    const StrategyCheck chk = check_strategy(es, pd, w);
    vr.probability_sum_gap = chk.probability_sum_gap;
    vr.unbiasedness_residual = chk.unbiasedness_residual;
    vr.membership_residual = chk.membership.residual_norm;
    vr.trace_gap = chk.membership.trace_gap;
    vr.min_eigenvalue = chk.membership.min_eigenvalue;
    vr.objective = chk.objective;
    vr.residuals_ok = vr.probability_sum_gap <= tol && vr.unbiasedness_residual <= tol && chk.membership.member(tol);
    vr.shots = shots;
    try {
      const MonteCarloResult mc = monte_carlo_validate(es, pd.c.matrix, w, shots, seed);
      vr.monte_carlo = mc.value;
      vr.monte_carlo_std_error = mc.std_error;
      vr.monte_carlo_ok = std::abs(mc.value - chk.objective) <= 3.0 * mc.std_error + 1e-12;
    } catch (const ContractError&) {
      vr.monte_carlo = std::numeric_limits<double>::quiet_NaN();
      vr.monte_carlo_ok = false;
    }
    rep.rows.push_back(vr);
  }
  if (!any) throw std::runtime_error("run manifest lists no stored upper-bound solutions");
  return rep;
}

std::string format_validation(const ValidationReport& r) {
  std::ostringstream os;
  char buf[512];
  os << "shots: " << r.shots << "  tolerance: " << r.tolerance << '\n';
  std::snprintf(buf, sizeof buf, "%-26s %10s %10s %10s %10s %11s %12s %12s %10s %s\n", "solution", "prob_gap",
                "unbiased", "member", "trace_gap", "min_eig", "objective", "monte_carlo", "mc_stderr", "result");
  os << buf;
  for (const auto& v : r.rows) {
    const bool ok = v.residuals_ok && v.monte_carlo_ok;
    std::snprintf(buf, sizeof buf, "%-26s %10.2e %10.2e %10.2e %10.2e %11.2e %12.6g %12.6g %10.2e %s\n",
                  v.solution_file.c_str(), v.probability_sum_gap, v.unbiasedness_residual, v.membership_residual,
                  v.trace_gap, v.min_eigenvalue, v.objective, v.monte_carlo, v.monte_carlo_std_error,
                  ok ? "ok" : (!v.residuals_ok ? "RESIDUAL" : "MONTE_CARLO"));
    os << buf;
  }
  os << (r.ok() ? "all checks passed" : "some checks failed") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

void dump_sdp(const ExperimentConfig& c, const std::string& path) {
  c.validate();
  for (const Task& task : enumerate_tasks(c)) {
    const BoundSpec& spec = c.bounds[task.bound];
    if (closed_form(spec.kind)) continue;
    const ChannelSpec ch = channel_at(c, task.point);
    const ProcessData pd = process_data(make_family(ch), ch.theta, c.n_uses);
    const WeightMatrix w = weight_of(c, ch);
    const StrategyClass sc(task.strategy, c.n_uses);
    ConicProgram prog;
    if (spec.kind == BoundKind::upper) {
      UpperBoundConfig uc;
      uc.m = spec.m.value_or(c.m);
      uc.seed = derive_seed(derive_seed(c.seed, task.point), 0);
      uc.strategy = sc;
      const auto vectors = sample_unit_vectors(uc.m, pd.params() + 1, uc.seed);
      prog = sc.kind == StrategyKind::causal_superposition ? build_upper_program_csup(pd, w, uc, vectors)
                                                           : build_upper_program(pd, w, uc, vectors);
    } else {
      LowerBoundConfig lc;
      lc.n = spec.n.value_or(c.n);
      lc.ppt = spec.ppt.value_or(c.ppt);
      lc.strategy = sc;
      prog = build_lower_program(pd, w, lc);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_sdpa(prog, out);
    return;
  }
  throw ConfigError("configuration has no solver-backed bound to dump");
}

}  // namespace qtb
