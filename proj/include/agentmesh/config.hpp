#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentmesh/generators.hpp"
#include "agentmesh/protocol.hpp"
#include "agentmesh/remote_agent.hpp"
#include "agentmesh/tasks.hpp"

namespace agentmesh {

struct SuiteSpec {
  std::vector<int> sizes = benchmark_sizes();
  std::vector<GraphFamily> families = all_families();
  int per_cell = 3;
  std::uint64_t seed = 1;
  SuiteParams params;
};

struct BackendSpec {
  std::string kind = "scripted";  // scripted | random | remote
  std::uint64_t seed = 1;
  RemoteModelConfig remote;

  std::string label() const { return kind == "remote" ? remote.model : kind; }
};

// Overrides the computed round budget: unset, T = n, or a fixed count.
struct RoundOverride {
  enum class Kind { None, EqualNodeCount, Fixed };
  Kind kind = Kind::None;
  int value = 0;

  int apply(int computed, int n) const {
    switch (kind) {
      case Kind::None: return computed;
      case Kind::EqualNodeCount: return n;
      case Kind::Fixed: return value;
    }
    return computed;
  }
};

struct ExperimentConfig {
  SuiteSpec suite;
  std::vector<TaskKind> tasks = all_tasks();
  BackendSpec backend;
  int repeats = 1;
  RoundMode round_mode = RoundMode::Benchmark;
  RoundOverride round_override;
  std::string output_dir = "runs/experiment";
  int concurrency = 1;
};

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json families = nlohmann::json::array();
  for (auto f : cfg.suite.families) families.push_back(to_string(f));
  nlohmann::json tasks = nlohmann::json::array();
  for (auto t : cfg.tasks) tasks.push_back(to_string(t));
  nlohmann::json backend{{"kind", cfg.backend.kind}, {"seed", cfg.backend.seed}};
  if (cfg.backend.kind == "remote") {
    const auto& r = cfg.backend.remote;
    backend["remote"] = {{"model", r.model},
                         {"base_url", r.base_url},
                         {"api_key_env", r.api_key_env},
                         {"max_output_tokens", r.max_output_tokens},
                         {"timeout_seconds", r.timeout_seconds},
                         {"max_attempts", r.max_attempts},
                         {"backoff_base_seconds", r.backoff_base_seconds},
                         {"max_in_flight", r.max_in_flight},
                         {"usd_per_mtok_input", r.usd_per_mtok_input},
                         {"usd_per_mtok_output", r.usd_per_mtok_output},
                         {"price_snapshot_date", r.price_snapshot_date}};
    if (r.temperature) backend["remote"]["temperature"] = *r.temperature;
  }
  nlohmann::json override_value;
  if (cfg.round_override.kind == RoundOverride::Kind::EqualNodeCount) {
    override_value = "n";
  } else if (cfg.round_override.kind == RoundOverride::Kind::Fixed) {
    override_value = cfg.round_override.value;
  }
  return nlohmann::json{{"suite",
                         {{"sizes", cfg.suite.sizes},
                          {"families", families},
                          {"per_cell", cfg.suite.per_cell},
                          {"seed", cfg.suite.seed},
                          {"ws_k", cfg.suite.params.ws_k},
                          {"ws_p", cfg.suite.params.ws_p},
                          {"ba_m", cfg.suite.params.ba_m}}},
                        {"tasks", tasks},
                        {"backend", backend},
                        {"repeats", cfg.repeats},
                        {"round_mode", to_string(cfg.round_mode)},
                        {"round_override", override_value},
                        {"output_dir", cfg.output_dir},
                        {"concurrency", cfg.concurrency}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("suite")) {
    const auto& s = j.at("suite");
    if (s.contains("sizes")) cfg.suite.sizes = s.at("sizes").get<std::vector<int>>();
    if (s.contains("families")) {
      cfg.suite.families.clear();
      for (const auto& f : s.at("families")) {
        cfg.suite.families.push_back(family_from_string(f.get<std::string>()));
      }
    }
    cfg.suite.per_cell = s.value("per_cell", cfg.suite.per_cell);
    cfg.suite.seed = s.value("seed", cfg.suite.seed);
    cfg.suite.params.ws_k = s.value("ws_k", cfg.suite.params.ws_k);
    cfg.suite.params.ws_p = s.value("ws_p", cfg.suite.params.ws_p);
    cfg.suite.params.ba_m = s.value("ba_m", cfg.suite.params.ba_m);
  }
  if (j.contains("tasks")) {
    cfg.tasks.clear();
    for (const auto& t : j.at("tasks")) cfg.tasks.push_back(task_from_string(t.get<std::string>()));
  }
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    cfg.backend.kind = b.value("kind", cfg.backend.kind);
    cfg.backend.seed = b.value("seed", cfg.backend.seed);
    if (b.contains("remote")) {
      const auto& r = b.at("remote");
      auto& rc = cfg.backend.remote;
      rc.model = r.value("model", rc.model);
      rc.base_url = r.value("base_url", rc.base_url);
      rc.api_key_env = r.value("api_key_env", rc.api_key_env);
      if (r.contains("temperature") && !r.at("temperature").is_null()) {
        rc.temperature = r.at("temperature").get<double>();
      }
      rc.max_output_tokens = r.value("max_output_tokens", rc.max_output_tokens);
      rc.timeout_seconds = r.value("timeout_seconds", rc.timeout_seconds);
      rc.max_attempts = r.value("max_attempts", rc.max_attempts);
      rc.backoff_base_seconds = r.value("backoff_base_seconds", rc.backoff_base_seconds);
      rc.max_in_flight = r.value("max_in_flight", rc.max_in_flight);
      rc.usd_per_mtok_input = r.value("usd_per_mtok_input", rc.usd_per_mtok_input);
      rc.usd_per_mtok_output = r.value("usd_per_mtok_output", rc.usd_per_mtok_output);
      rc.price_snapshot_date = r.value("price_snapshot_date", rc.price_snapshot_date);
    }
  }
  cfg.repeats = j.value("repeats", cfg.repeats);
  if (j.contains("round_mode")) {
    cfg.round_mode = round_mode_from_string(j.at("round_mode").get<std::string>());
  }
  if (j.contains("round_override") && !j.at("round_override").is_null()) {
    const auto& o = j.at("round_override");
    if (o.is_string() && o.get<std::string>() == "n") {
      cfg.round_override.kind = RoundOverride::Kind::EqualNodeCount;
    } else if (o.is_number_integer()) {
      cfg.round_override.kind = RoundOverride::Kind::Fixed;
      cfg.round_override.value = o.get<int>();
    } else {
      throw ParameterError("round_override must be null, \"n\", or an integer");
    }
  }
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.concurrency = j.value("concurrency", cfg.concurrency);
  if (cfg.repeats < 1) throw ParameterError("repeats must be >= 1");
  if (cfg.concurrency < 1) throw ParameterError("concurrency must be >= 1");
  if (cfg.backend.kind != "scripted" && cfg.backend.kind != "random" &&
      cfg.backend.kind != "remote") {
    throw ParameterError("backend.kind must be scripted, random, or remote");
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

// The large-network preset: 81 topologies, 2D+1 rounds for every task.
inline ExperimentConfig scaling_preset(ExperimentConfig cfg = {}) {
  cfg.suite.sizes = scaling_sizes();
  cfg.round_mode = RoundMode::Scaling;
  return cfg;
}

}  // namespace agentmesh
