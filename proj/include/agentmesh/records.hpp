#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentmesh/graph.hpp"
#include "agentmesh/tasks.hpp"

namespace agentmesh {

inline constexpr int kRecordSchemaVersion = 1;

// One benchmark run. (size, task, family, instance, repeat) identifies a
// record within an experiment. Wall-clock timing is deliberately not part of
// this schema: records files are byte-identical across repeated scripted
// runs, and timings go to a sidecar file instead.
struct RunRecord {
  int schema_version = kRecordSchemaVersion;
  std::string run_id;
  std::string model;  // backend label: "scripted", "random", or a model id
  TaskKind task = TaskKind::Consensus;
  std::string topology_ref;
  int size = 0;
  GraphFamily family = GraphFamily::SmallWorld;
  int instance = 0;
  int repeat = 0;
  double soft_score = 0.0;
  int solved = 0;
  int rounds = 0;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  double cost_usd = 0.0;
  bool failed = false;
  std::string failure_reason;

  using Key = std::tuple<int, TaskKind, GraphFamily, int, int>;
  Key key() const { return {size, task, family, instance, repeat}; }
};

inline nlohmann::json to_json(const RunRecord& r) {
  return nlohmann::json{{"schema_version", r.schema_version},
                        {"run_id", r.run_id},
                        {"model", r.model},
                        {"task", to_string(r.task)},
                        {"topology_ref", r.topology_ref},
                        {"size", r.size},
                        {"family", to_string(r.family)},
                        {"instance", r.instance},
                        {"repeat", r.repeat},
                        {"soft_score", r.soft_score},
                        {"solved", r.solved},
                        {"rounds", r.rounds},
                        {"prompt_tokens", r.prompt_tokens},
                        {"completion_tokens", r.completion_tokens},
                        {"cost_usd", r.cost_usd},
                        {"failed", r.failed},
                        {"failure_reason", r.failure_reason}};
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kRecordSchemaVersion) {
    throw StructuralError("unsupported record schema version " +
                          std::to_string(r.schema_version));
  }
  r.run_id = j.at("run_id").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.task = task_from_string(j.at("task").get<std::string>());
  r.topology_ref = j.at("topology_ref").get<std::string>();
  r.size = j.at("size").get<int>();
  r.family = family_from_string(j.at("family").get<std::string>());
  r.instance = j.at("instance").get<int>();
  r.repeat = j.at("repeat").get<int>();
  r.soft_score = j.at("soft_score").get<double>();
  r.solved = j.at("solved").get<int>();
  r.rounds = j.at("rounds").get<int>();
  r.prompt_tokens = j.at("prompt_tokens").get<long long>();
  r.completion_tokens = j.at("completion_tokens").get<long long>();
  r.cost_usd = j.at("cost_usd").get<double>();
  r.failed = j.at("failed").get<bool>();
  r.failure_reason = j.at("failure_reason").get<std::string>();
  return r;
}

inline std::string serialize_records(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  return out.str();
}

inline std::vector<RunRecord> parse_records(std::string_view text) {
  std::vector<RunRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

inline std::vector<RunRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_records(buf.str());
}

}  // namespace agentmesh
