#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "agentmesh/harness.hpp"
#include "test_util.hpp"

using namespace agentmesh;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("agentmesh_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig tiny_config(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.suite.sizes = {4};
  cfg.suite.families = {GraphFamily::ScaleFree};
  cfg.suite.per_cell = 1;
  cfg.suite.seed = 99;
  cfg.tasks = {TaskKind::Consensus};
  cfg.backend.kind = "scripted";
  cfg.backend.seed = 5;
  cfg.output_dir = dir.string();
  return cfg;
}

}  // namespace

TEST_CASE("experiment config round-trips through JSON") {
  ExperimentConfig cfg = tiny_config("/tmp/unused");
  cfg.round_override.kind = RoundOverride::Kind::EqualNodeCount;
  cfg.repeats = 3;
  cfg.concurrency = 2;
  const auto back = config_from_json(to_json(cfg));
  CHECK(back.suite.sizes == cfg.suite.sizes);
  CHECK(back.suite.seed == cfg.suite.seed);
  CHECK(back.tasks == cfg.tasks);
  CHECK(back.backend.kind == cfg.backend.kind);
  CHECK(back.repeats == 3);
  CHECK(back.round_override.kind == RoundOverride::Kind::EqualNodeCount);
  CHECK(back.concurrency == 2);
  CHECK_THROWS_AS(config_from_json({{"repeats", 0}}), ParameterError);
  CHECK_THROWS_AS(config_from_json({{"backend", {{"kind", "telepathy"}}}}), ParameterError);
}

TEST_CASE("the shipped example configs parse") {
  const auto bench = load_config_file(std::string(AGENTMESH_CONFIG_DIR) +
                                      "/scripted_benchmark.json");
  CHECK(bench.suite.sizes == std::vector<int>{4, 8, 16});
  CHECK(bench.tasks.size() == 5);
  const auto scaling = load_config_file(std::string(AGENTMESH_CONFIG_DIR) +
                                        "/scripted_scaling.json");
  CHECK(scaling.round_mode == RoundMode::Scaling);
  CHECK(scaling.suite.sizes.size() == 9);
  const auto remote = load_config_file(std::string(AGENTMESH_CONFIG_DIR) +
                                       "/remote_example.json");
  CHECK(remote.backend.kind == "remote");
  CHECK(remote.backend.remote.api_key_env == "AGENTMESH_API_KEY");
  CHECK_FALSE(remote.backend.remote.temperature.has_value());
  CHECK(remote.backend.remote.price_snapshot_date == "2025-05-15");
}

TEST_CASE("a tiny experiment produces records and files") {
  const auto dir = fresh_dir("tiny");
  const auto cfg = tiny_config(dir);
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].solved == 1);
  CHECK(records[0].model == "scripted");
  CHECK(records[0].size == 4);
  CHECK_FALSE(records[0].failed);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "records.jsonl"));
  CHECK(fs::exists(dir / "timings.jsonl"));
  CHECK(fs::exists(dir / "topologies" / records[0].topology_ref));
  CHECK(fs::exists(dir / "transcripts" / (records[0].run_id + ".jsonl")));
  fs::remove_all(dir);
}

TEST_CASE("repeats create distinct records over the same topology") {
  const auto dir = fresh_dir("repeats");
  auto cfg = tiny_config(dir);
  cfg.backend.kind = "random";
  cfg.repeats = 3;
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 3);
  std::set<RunRecord::Key> keys;
  for (const auto& r : records) {
    keys.insert(r.key());
    CHECK(r.topology_ref == records[0].topology_ref);
  }
  CHECK(keys.size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("an interrupted experiment resumes into an identical records file") {
  const auto dir_full = fresh_dir("full");
  auto cfg = tiny_config(dir_full);
  cfg.tasks = all_tasks();
  cfg.suite.families = all_families();
  run_experiment(cfg);
  const std::string complete = slurp(dir_full / "records.jsonl");

  // Replay: keep only the first 4 record lines, as if the process had died,
  // then run again with the same config.
  const auto dir_cut = fresh_dir("cut");
  auto cfg_cut = cfg;
  cfg_cut.output_dir = dir_cut.string();
  run_experiment(cfg_cut);
  std::istringstream lines(complete);
  std::string line, prefix;
  for (int i = 0; i < 4 && std::getline(lines, line); ++i) prefix += line + "\n";
  std::ofstream(dir_cut / "records.jsonl", std::ios::trunc) << prefix;

  const auto resumed = run_experiment(cfg_cut);
  CHECK(slurp(dir_cut / "records.jsonl") == complete);
  CHECK(resumed.size() == 15);  // 3 families x 5 tasks x 1 repeat
  fs::remove_all(dir_full);
  fs::remove_all(dir_cut);
}

TEST_CASE("scripted experiments are byte-identical across executions") {
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  auto cfg_a = tiny_config(dir_a);
  cfg_a.tasks = {TaskKind::Coloring, TaskKind::Consensus};
  cfg_a.concurrency = 4;  // commit order must still be plan order
  auto cfg_b = cfg_a;
  cfg_b.output_dir = dir_b.string();
  run_experiment(cfg_a);
  run_experiment(cfg_b);
  CHECK(slurp(dir_a / "records.jsonl") == slurp(dir_b / "records.jsonl"));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("round overrides change the budget") {
  const auto dir = fresh_dir("override");
  auto cfg = tiny_config(dir);
  cfg.round_override.kind = RoundOverride::Kind::EqualNodeCount;
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].rounds == 4);

  const auto dir2 = fresh_dir("override_fixed");
  cfg.output_dir = dir2.string();
  cfg.round_override.kind = RoundOverride::Kind::Fixed;
  cfg.round_override.value = 2;
  const auto fixed = run_experiment(cfg);
  CHECK(fixed[0].rounds == 2);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("recomputing evaluations from transcripts agrees with the records") {
  const auto dir = fresh_dir("eval");
  auto cfg = tiny_config(dir);
  cfg.tasks = all_tasks();
  run_experiment(cfg);
  CHECK(recompute_evaluations(dir.string()).empty());

  // Corrupt one record's score; the recomputation must flag it.
  auto records = read_records_file((dir / "records.jsonl").string());
  records[0].solved = 1 - records[0].solved;
  std::ofstream(dir / "records.jsonl", std::ios::trunc) << serialize_records(records);
  CHECK(recompute_evaluations(dir.string()).size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("failed backends are recorded and the experiment continues") {
  const auto dir = fresh_dir("fail");
  auto cfg = tiny_config(dir);
  cfg.backend.kind = "remote";  // nothing is listening on the default URL
  cfg.backend.remote.model = "offline";
  cfg.backend.remote.base_url = "http://127.0.0.1:9";
  cfg.backend.remote.max_attempts = 1;
  cfg.backend.remote.timeout_seconds = 0.5;
  cfg.tasks = {TaskKind::Consensus, TaskKind::Coloring};
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(r.failed);
    CHECK_FALSE(r.failure_reason.empty());
    CHECK(r.solved == 0);
  }
  fs::remove_all(dir);
}
