/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qtb/experiment.hpp"

namespace {

struct Overrides {
  std::optional<int> m, n, restarts, workers, n_uses;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  bool ppt = false;
  bool no_timing = false;
  bool no_solutions = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--m", o.m, "Random vectors per upper bound (default for bounds without their own m)");
  cmd->add_option("--n", o.n, "Extension order for lower bounds");
  cmd->add_option("--seed", o.seed, "Run seed");
  cmd->add_option("--restarts", o.restarts, "Upper-bound restarts");
  cmd->add_option("--workers", o.workers, "Concurrent sweep tasks");
  cmd->add_option("--n-uses", o.n_uses, "Channel uses N");
  cmd->add_option("--output", o.output, "Output directory");
  cmd->add_flag("--ppt", o.ppt, "Add partial-transpose constraints to lower bounds");
  cmd->add_flag("--no-timing", o.no_timing, "Write 0 in the wall_time_s column");
  cmd->add_flag("--no-solutions", o.no_solutions, "Do not store upper-bound strategies");
}

void apply(const Overrides& o, qtb::ExperimentConfig& c) {
  // A flag overrides every bound, including ones that carry their own value.
  if (o.m) {
    c.m = *o.m;
    for (auto& b : c.bounds) b.m.reset();
  }
  if (o.n) {
    c.n = *o.n;
    for (auto& b : c.bounds) b.n.reset();
  }
  if (o.restarts) {
    c.restarts = *o.restarts;
    for (auto& b : c.bounds) b.restarts.reset();
  }
  if (o.ppt) {
    c.ppt = true;
    for (auto& b : c.bounds) b.ppt.reset();
  }
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.n_uses) c.n_uses = *o.n_uses;
  if (o.output) c.output = *o.output;
  if (o.no_timing) c.record_wall_time = false;
  if (o.no_solutions) c.save_solutions = false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified bounds on multiparameter estimation error over quantum strategy classes"};
  app.set_version_flag("--version", std::string(QTB_VERSION));
  app.require_subcommand(1);

  std::string config_path, preset_name, manifest_path, out_path;
  long shots = 1000000;
  double tol = 1e-6;
  Overrides ov;

  auto* run = app.add_subcommand("run", "Run a configured experiment and write CSV plus a JSON manifest");
  auto* cfg_opt = run->add_option("--config", config_path, "Configuration JSON (or a previous run manifest)");
  auto* preset_opt = run->add_option("--preset", preset_name, "Built-in experiment")
                         ->check(CLI::IsMember(qtb::preset_names()));
  cfg_opt->excludes(preset_opt);
  add_overrides(run, ov);

  auto* val = app.add_subcommand("validate", "Re-check stored upper-bound strategies of a run");
  val->add_option("--run", manifest_path, "Run manifest")->required();
  val->add_option("--shots", shots, "Monte Carlo shots per strategy")->check(CLI::PositiveNumber);
  val->add_option("--tol", tol, "Residual tolerance");

  auto* dump = app.add_subcommand("dump-sdp", "Write the first program of a configuration in SDPA format");
  auto* dcfg = dump->add_option("--config", config_path, "Configuration JSON");
  auto* dpre = dump->add_option("--preset", preset_name, "Built-in experiment")->check(CLI::IsMember(qtb::preset_names()));
  dcfg->excludes(dpre);
  dump->add_option("--out", out_path, "Output file")->required();
  add_overrides(dump, ov);

  auto* presets = app.add_subcommand("presets", "Print the built-in experiment configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every other parse error is a configuration error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    auto load = [&]() {
      if (config_path.empty() && preset_name.empty()) throw qtb::ConfigError("give --config or --preset");
      qtb::ExperimentConfig c = config_path.empty() ? qtb::preset(preset_name) : qtb::load_config(config_path);
      apply(ov, c);
      return c;
    };
    if (*run) {
      const qtb::ExperimentConfig c = load();
      const qtb::RunOutcome out = qtb::run_experiment(c);
      std::cout << qtb::csv_header() << '\n';
      for (const auto& r : out.rows) std::cout << qtb::csv_line(r) << '\n';
      std::cerr << "wrote " << out.csv_path << " and " << out.manifest_path << '\n';
      return out.all_optimal ? 0 : 1;
    }
    if (*val) {
      const qtb::ValidationReport rep = qtb::validate_run(manifest_path, shots, tol);
      std::cout << qtb::format_validation(rep);
      return rep.ok() ? 0 : 1;
    }
    if (*dump) {
      qtb::dump_sdp(load(), out_path);
      std::cerr << "wrote " << out_path << '\n';
      return 0;
    }
    if (*presets) {
      for (const auto& name : qtb::preset_names()) std::cout << qtb::config_to_json(qtb::preset(name)).dump() << '\n';
      return 0;
    }
  } catch (const qtb::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
