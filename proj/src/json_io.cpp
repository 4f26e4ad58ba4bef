/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <filesystem>
#include <fstream>

#include "qtb/experiment.hpp"

namespace qtb {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json real_matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (long k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

RealMatrix real_matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty list of rows");
  const long r = static_cast<long>(j.size()), c = static_cast<long>(j.front().size());
  RealMatrix m(r, c);
  for (long i = 0; i < r; ++i) {
    if (static_cast<long>(j[i].size()) != c) throw ConfigError("matrix rows differ in length");
    for (long k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json solver_to_json(const SolverOptions& s) {
  return {{"feasibility_tol", s.feasibility_tol}, {"gap_tol", s.gap_tol},     {"reduced_tol", s.reduced_tol},
          {"max_iterations", s.max_iterations},   {"threads", s.threads},     {"deterministic", s.deterministic},
          {"presolve", s.presolve}};
}

SolverOptions solver_from_json(const json& j) {
  SolverOptions s;
  s.feasibility_tol = get_or(j, "feasibility_tol", s.feasibility_tol);
  s.gap_tol = get_or(j, "gap_tol", s.gap_tol);
  s.reduced_tol = get_or(j, "reduced_tol", s.reduced_tol);
  s.max_iterations = get_or(j, "max_iterations", s.max_iterations);
  s.threads = get_or(j, "threads", s.threads);
  s.deterministic = get_or(j, "deterministic", s.deterministic);
  s.presolve = get_or(j, "presolve", s.presolve);
  return s;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const long r = j.at("rows").get<long>(), c = j.at("cols").get<long>();
  const json& data = j.at("data");
  if (static_cast<long>(data.size()) != r * c) throw DimensionError("matrix data has the wrong length");
  ComplexMatrix m(r, c);
  for (long i = 0; i < r; ++i)
    for (long k = 0; k < c; ++k) {
      const json& e = data[i * c + k];
      m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

json strategy_to_json(const ExtractedStrategy& es) {
  json testers = json::array(), estimator = json::array();
  for (const auto& p : es.testers) testers.push_back(matrix_to_json(p));
  for (const auto& v : es.estimator) estimator.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return {{"strategy", to_token(es.strategy.kind)},
          {"n_uses", es.strategy.n_uses},
          {"theta", std::vector<double>(es.theta.data(), es.theta.data() + es.theta.size())},
          {"kept_indices", es.kept_indices},
          {"dropped_indices", es.dropped_indices},
          {"estimator", estimator},
          {"testers", testers}};
}

ExtractedStrategy strategy_from_json(const json& j) {
  ExtractedStrategy es;
  es.strategy = StrategyClass(parse_strategy(j.at("strategy").get<std::string>()), j.at("n_uses").get<int>());
  const auto theta = j.at("theta").get<std::vector<double>>();
  es.theta = Eigen::Map<const RealVector>(theta.data(), static_cast<long>(theta.size()));
  es.kept_indices = j.at("kept_indices").get<std::vector<int>>();
  es.dropped_indices = j.at("dropped_indices").get<std::vector<int>>();
  for (const auto& v : j.at("estimator")) {
    const auto e = v.get<std::vector<double>>();
    es.estimator.push_back(Eigen::Map<const RealVector>(e.data(), static_cast<long>(e.size())));
  }
  for (const auto& p : j.at("testers")) es.testers.push_back(matrix_from_json(p));
  if (es.testers.size() != es.estimator.size()) throw DimensionError("testers and estimator disagree in length");
  return es;
}

json channel_to_json(const ChannelSpec& c) {
  json j = {{"name", c.name}, {"theta", c.theta}, {"t", c.t}, {"gamma", c.gamma}};
  if (!c.generators.empty()) j["generators"] = c.generators;
  if (!c.file.empty()) j["file"] = c.file;
  return j;
}

ChannelSpec channel_from_json(const json& j) {
  ChannelSpec c;
  c.name = get_or<std::string>(j, "name", c.name);
  c.theta = get_or<std::vector<double>>(j, "theta", {});
  c.t = get_or(j, "t", c.t);
  c.gamma = get_or(j, "gamma", c.gamma);
  c.generators = get_or<std::vector<int>>(j, "generators", {});
  c.file = get_or<std::string>(j, "file", "");
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", c.name);
    if (!j.contains("channel")) throw ConfigError("configuration needs a channel");
    c.channel = channel_from_json(j.at("channel"));
    c.n_uses = get_or(j, "n_uses", c.n_uses);
    for (const auto& s : j.value("strategies", json::array())) c.strategies.push_back(parse_strategy(s.get<std::string>()));
    c.m = get_or(j, "m", c.m);
    c.n = get_or(j, "n", c.n);
    c.ppt = get_or(j, "ppt", c.ppt);
    c.restarts = get_or(j, "restarts", c.restarts);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    for (const auto& b : j.value("bounds", json::array())) {
      BoundSpec spec;
      spec.kind = parse_bound_kind(b.at("kind").get<std::string>());
      if (b.contains("m")) spec.m = b.at("m").get<int>();
      if (b.contains("n")) spec.n = b.at("n").get<int>();
      if (b.contains("ppt")) spec.ppt = b.at("ppt").get<bool>();
      if (b.contains("restarts")) spec.restarts = b.at("restarts").get<int>();
      for (const auto& s : b.value("strategies", json::array())) spec.strategies.push_back(parse_strategy(s.get<std::string>()));
      spec.label = get_or<std::string>(b, "label", "");
      c.bounds.push_back(spec);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      c.sweep.variable = get_or<std::string>(s, "variable", c.sweep.variable);
      c.sweep.grid = get_or<std::vector<double>>(s, "grid", {});
      c.sweep.points = get_or<std::vector<std::vector<double>>>(s, "points", {});
    }
    c.output = get_or<std::string>(j, "output", c.output);
    if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
    c.workers = get_or(j, "workers", c.workers);
    if (j.contains("weight") && !j.at("weight").is_null()) c.weight = real_matrix_from_json(j.at("weight"));
    c.record_wall_time = get_or(j, "record_wall_time", c.record_wall_time);
    c.save_solutions = get_or(j, "save_solutions", c.save_solutions);
    c.note = get_or<std::string>(j, "note", "");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(to_token(s));
  json bounds = json::array();
  for (const auto& b : c.bounds) {
    json e = {{"kind", to_token(b.kind)}};
    if (b.m) e["m"] = *b.m;
    if (b.n) e["n"] = *b.n;
    if (b.ppt) e["ppt"] = *b.ppt;
    if (b.restarts) e["restarts"] = *b.restarts;
    if (!b.strategies.empty()) {
      json ss = json::array();
      for (auto s : b.strategies) ss.push_back(to_token(s));
      e["strategies"] = ss;
    }
    if (!b.label.empty()) e["label"] = b.label;
    bounds.push_back(e);
  }
  json sweep = {{"variable", c.sweep.variable}};
  if (c.sweep.variable == "theta")
    sweep["points"] = c.sweep.points;
  else
    sweep["grid"] = c.sweep.grid;
  json j = {{"name", c.name},
            {"channel", channel_to_json(c.channel)},
            {"n_uses", c.n_uses},
            {"strategies", strategies},
            {"bounds", bounds},
            {"m", c.m},
            {"n", c.n},
            {"ppt", c.ppt},
            {"restarts", c.restarts},
            {"seed", c.seed},
            {"sweep", sweep},
            {"output", c.output},
            {"solver", solver_to_json(c.solver)},
            {"workers", c.workers},
            {"record_wall_time", c.record_wall_time},
            {"save_solutions", c.save_solutions}};
  if (c.weight) j["weight"] = real_matrix_to_json(*c.weight);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("configuration " + path + " is not valid JSON: " + e.what());
  }
  ExperimentConfig c = config_from_json(j.contains("config") ? j.at("config") : j);
  // Relative channel files resolve against the configuration's directory.
  if (!c.channel.file.empty() && std::filesystem::path(c.channel.file).is_relative()) {
    const auto base = std::filesystem::path(path).parent_path();
    const auto candidate = base / c.channel.file;
    if (std::filesystem::exists(candidate)) c.channel.file = candidate.string();
  }
  return c;
}

}  // namespace qtb
