/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtb/bounds.hpp"

namespace qtb {

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ChannelSpec {
  /// "magnetic_field" | "hamiltonian" (Pauli generators) | "json" (Kraus file)
  std::string name = "magnetic_field";
  std::vector<double> theta;
  double t = 1.0;
  double gamma = 0.0;
  std::vector<int> generators;  // Pauli indices 1..3 for "hamiltonian"
  std::string file;             // for "json"
};

enum class BoundKind { upper, lower, heuristic, analytic };
std::string to_token(BoundKind k);
BoundKind parse_bound_kind(const std::string& token);

struct BoundSpec {
  BoundKind kind = BoundKind::upper;
  std::optional<int> m;
  std::optional<int> n;
  std::optional<bool> ppt;
  std::optional<int> restarts;
  /// Restricts this bound to some strategies; empty means every configured strategy.
  std::vector<StrategyKind> strategies;
  /// Name written to the bound_kind column; defaults to the kind token ("lower-ppt" with ppt).
  std::string label;
};

struct SweepSpec {
  /// "t" | "gamma" | "theta1" | "theta2" | "theta3" | "theta" (explicit parameter vectors)
  std::string variable = "t";
  std::vector<double> grid;
  std::vector<std::vector<double>> points;  // for "theta"; sweep_value is the point index
  std::size_t size() const { return variable == "theta" ? points.size() : grid.size(); }
};

struct ExperimentConfig {
  std::string name = "custom";
  ChannelSpec channel;
  int n_uses = 2;
  std::vector<StrategyKind> strategies;
  std::vector<BoundSpec> bounds;
  int m = 125;
  int n = 2;
  bool ppt = false;
  int restarts = 1;
  std::uint64_t seed = 1;
  SweepSpec sweep;
  std::string output = "bounds-run";
  SolverOptions solver;
  int workers = 1;
  std::optional<RealMatrix> weight;  // identity when absent
  bool record_wall_time = true;      // false writes 0 so the CSV is byte-stable
  bool save_solutions = true;
  std::string note;

  /// Throws ConfigError.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
/// Accepts a config file or a run manifest (its "config" member is used).
ExperimentConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

/// Evenly spaced t grid used by the presets: 12 points in (0.2, 3.0].
std::vector<double> preset_t_grid();

struct ResultRow {
  double sweep_value = 0.0;
  std::string strategy;
  std::string bound_kind;
  double value = 0.0;
  std::string status;
  int m_or_n = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  // Manifest-only details.
  bool is_solve = false;
  double max_residual = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  int attempts = 0;
  int dropped_vectors = 0;
  std::string message;
  std::string solution_file;
};

struct RunOutcome {
  std::vector<ResultRow> rows;
  std::string csv_path;
  std::string manifest_path;
  bool all_optimal = true;
};

/// Parameter vector, channel and process at sweep point k.
ChannelSpec channel_at(const ExperimentConfig& c, std::size_t k);
double sweep_value_at(const ExperimentConfig& c, std::size_t k);
ParamChannelFamily make_family(const ChannelSpec& spec);

RunOutcome run_experiment(const ExperimentConfig& c);
std::string csv_header();
std::string csv_line(const ResultRow& r);

struct ValidationRow {
  std::string solution_file;
  double probability_sum_gap = 0.0;
  double unbiasedness_residual = 0.0;
  double membership_residual = 0.0;
  double trace_gap = 0.0;
  double min_eigenvalue = 0.0;
  double objective = 0.0;
  double monte_carlo = 0.0;
  double monte_carlo_std_error = 0.0;
  long shots = 0;
  bool residuals_ok = false;
  bool monte_carlo_ok = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  long shots = 0;
  double tolerance = 1e-6;
  bool ok() const;
};

/// Re-checks every stored upper-bound strategy of a run. Throws std::runtime_error when a
/// referenced solution file is missing.
ValidationReport validate_run(const std::string& manifest_path, long shots, double tol = 1e-6,
                              std::uint64_t seed = 7);
std::string format_validation(const ValidationReport& r);

/// The conic program of the first (sweep point, strategy, bound) task in SDPA text.
void dump_sdp(const ExperimentConfig& c, const std::string& path);

// Persistence of extracted strategies.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json strategy_to_json(const ExtractedStrategy& es);
ExtractedStrategy strategy_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const ChannelSpec& c);
ChannelSpec channel_from_json(const nlohmann::json& j);

}  // namespace qtb
