#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "agentmesh/config.hpp"
#include "agentmesh/generators.hpp"
#include "agentmesh/names.hpp"
#include "agentmesh/oracle.hpp"
#include "agentmesh/protocol.hpp"
#include "agentmesh/records.hpp"
#include "agentmesh/remote_agent.hpp"
#include "agentmesh/scripted_agents.hpp"
#include "agentmesh/stats.hpp"

namespace agentmesh {

struct SuiteInstance {
  Topology topology;
  int instance = 0;  // index within the (size, family) cell
  std::string file_name;
};

inline std::string topology_file_name(int size, GraphFamily family, int instance) {
  return "s" + std::to_string(size) + "-" + to_string(family) + "-i" + std::to_string(instance) +
         ".graph";
}

inline std::vector<SuiteInstance> build_suite(const SuiteSpec& spec) {
  auto topologies = gen_benchmark_suite(spec.sizes, spec.families, spec.per_cell, spec.seed,
                                        spec.params);
  std::vector<SuiteInstance> suite;
  std::map<std::pair<int, GraphFamily>, int> counters;
  for (auto& t : topologies) {
    SuiteInstance inst;
    inst.instance = counters[{t.node_count, t.family}]++;
    inst.file_name = topology_file_name(t.node_count, t.family, inst.instance);
    inst.topology = std::move(t);
    suite.push_back(std::move(inst));
  }
  return suite;
}

struct RunPlanItem {
  SuiteInstance suite_instance;
  TaskKind task = TaskKind::Consensus;
  int repeat = 0;

  std::string run_id() const {
    const auto& t = suite_instance.topology;
    return "s" + std::to_string(t.node_count) + "-" + to_string(t.family) + "-i" +
           std::to_string(suite_instance.instance) + "-" + to_string(task) + "-r" +
           std::to_string(repeat);
  }
  RunRecord::Key key() const {
    return {suite_instance.topology.node_count, task, suite_instance.topology.family,
            suite_instance.instance, repeat};
  }
};

inline std::vector<RunPlanItem> build_plan(const ExperimentConfig& cfg,
                                           const std::vector<SuiteInstance>& suite) {
  std::vector<RunPlanItem> plan;
  for (const auto& inst : suite) {
    for (TaskKind task : cfg.tasks) {
      for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
        plan.push_back({inst, task, repeat});
      }
    }
  }
  return plan;
}

// Per-run seeds. Names depend only on the topology, so repeats change agent
// behavior but never the network or who sits where.
inline std::uint64_t names_seed(const ExperimentConfig& cfg, const Topology& t) {
  return derive_seed(cfg.suite.seed, hash64("names"), t.seed);
}

inline std::uint64_t behavior_seed(const ExperimentConfig& cfg, const RunPlanItem& item) {
  return derive_seed(cfg.backend.seed, item.suite_instance.topology.seed,
                     hash64(to_string(item.task)), static_cast<std::uint64_t>(item.repeat));
}

struct RunOutcome {
  RunRecord record;
  RunTranscript transcript;
  long long wall_ms = 0;
};

// Executes one planned run: assign names, compute the round budget, drive
// the message-passing engine, collect and evaluate final answers.
inline RunOutcome execute_run(const ExperimentConfig& cfg, const RunPlanItem& item,
                              const std::shared_ptr<RequestLimiter>& limiter,
                              const std::function<void(const std::string&)>& log = {}) {
  const auto started = std::chrono::steady_clock::now();
  Topology topo = item.suite_instance.topology;
  auto identities = assign_names(topo, default_name_pool(), names_seed(cfg, topo));
  apply_labels(topo, identities);

  const int computed = compute_round_budget(item.task, topo, cfg.round_mode, log);
  const int rounds = cfg.round_override.apply(computed, topo.node_count);

  const std::uint64_t seed = behavior_seed(cfg, item);
  std::vector<std::unique_ptr<AgentBackend>> owned;
  std::map<std::string, AgentBackend*> backends;
  if (cfg.backend.kind == "remote") {
    for (const auto& id : identities) {
      owned.push_back(std::make_unique<RemoteModelAgent>(cfg.backend.remote, limiter));
      backends[id.name] = owned.back().get();
    }
  } else {
    owned.push_back(cfg.backend.kind == "random" ? make_random_agent(item.task, seed)
                                                 : make_scripted_agent(item.task, seed));
    for (const auto& id : identities) backends[id.name] = owned.front().get();
  }

  EngineOptions opts;
  opts.run_id = item.run_id();
  opts.topology_ref = item.suite_instance.file_name;
  opts.wall_clock = cfg.backend.kind == "remote";
  opts.warn = log;

  RunOutcome outcome;
  outcome.record.run_id = item.run_id();
  outcome.record.model = cfg.backend.label();
  outcome.record.task = item.task;
  outcome.record.topology_ref = item.suite_instance.file_name;
  outcome.record.size = topo.node_count;
  outcome.record.family = topo.family;
  outcome.record.instance = item.suite_instance.instance;
  outcome.record.repeat = item.repeat;
  outcome.record.rounds = rounds;

  MessagePassingEngine engine(topo, identities, backends, make_task_spec(item.task, topo), opts);
  engine.run_rounds(rounds);
  auto answers = engine.collect_final_answers();
  if (engine.failed()) {
    outcome.record.failed = true;
    outcome.record.failure_reason = engine.failure_reason();
  } else {
    const Evaluation ev = evaluate(item.task, topo, answers);
    outcome.record.soft_score = ev.soft_score;
    outcome.record.solved = ev.solved ? 1 : 0;
  }
  const TokenUsage usage = engine.total_usage();
  outcome.record.prompt_tokens = usage.prompt_tokens;
  outcome.record.completion_tokens = usage.completion_tokens;
  outcome.record.cost_usd = usage.cost_usd;
  outcome.transcript = engine.transcript();
  outcome.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
  return outcome;
}

// Runs the experiment described by the config. Topologies, transcripts, and
// records are persisted under the output directory; records are committed in
// plan order regardless of completion order, so records files are
// byte-identical across runs with the same seeds. Runs whose
// (size, task, family, instance, repeat) key already appears in the records
// file are skipped, which makes interrupted experiments resumable. Failed
// runs are recorded with their reason and the experiment continues.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg,
                                             const std::function<void(const std::string&)>& log = {}) {
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir / "topologies");
  fs::create_directories(out_dir / "transcripts");

  {
    std::ofstream cfg_out(out_dir / "config.json");
    cfg_out << to_json(cfg).dump(2) << '\n';
  }

  const auto suite = build_suite(cfg.suite);
  for (const auto& inst : suite) {
    std::ofstream topo_out(out_dir / "topologies" / inst.file_name);
    topo_out << serialize_topology(inst.topology);
  }

  std::vector<RunRecord> done = read_records_file((out_dir / "records.jsonl").string());
  std::set<RunRecord::Key> completed;
  for (const auto& r : done) completed.insert(r.key());

  std::vector<RunPlanItem> pending;
  for (const auto& item : build_plan(cfg, suite)) {
    if (!completed.count(item.key())) pending.push_back(item);
  }

  auto limiter = std::make_shared<RequestLimiter>(cfg.backend.remote.max_in_flight);

  std::vector<std::optional<RunOutcome>> results(pending.size());
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      RunOutcome outcome;
      try {
        outcome = execute_run(cfg, pending[i], limiter, log);
      } catch (const std::exception& e) {
        outcome.record.run_id = pending[i].run_id();
        outcome.record.model = cfg.backend.label();
        outcome.record.task = pending[i].task;
        outcome.record.topology_ref = pending[i].suite_instance.file_name;
        outcome.record.size = pending[i].suite_instance.topology.node_count;
        outcome.record.family = pending[i].suite_instance.topology.family;
        outcome.record.instance = pending[i].suite_instance.instance;
        outcome.record.repeat = pending[i].repeat;
        outcome.record.failed = true;
        outcome.record.failure_reason = e.what();
      }
      {
        std::lock_guard lock(mutex);
        results[i] = std::move(outcome);
      }
      ready.notify_all();
    }
  };

  const int threads = std::min<int>(cfg.concurrency, std::max<std::size_t>(pending.size(), 1));
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);

  // Commit results in plan order as they become available; an interrupted
  // experiment leaves a clean ordered prefix behind.
  std::ofstream records_out(out_dir / "records.jsonl", std::ios::app);
  std::ofstream timings_out(out_dir / "timings.jsonl", std::ios::app);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return results[i].has_value(); });
    RunOutcome outcome = std::move(*results[i]);
    results[i].reset();
    lock.unlock();

    std::ofstream transcript_out(out_dir / "transcripts" / (outcome.record.run_id + ".jsonl"));
    transcript_out << serialize_transcript(outcome.transcript);
    records_out << to_json(outcome.record).dump() << '\n';
    records_out.flush();
    timings_out << nlohmann::json{{"run_id", outcome.record.run_id},
                                  {"wall_ms", outcome.wall_ms}}
                       .dump()
                << '\n';
    done.push_back(std::move(outcome.record));
    if (log) {
      const auto& r = done.back();
      log("run " + r.run_id + (r.failed ? " FAILED" : " solved=" + std::to_string(r.solved)));
    }
  }
  for (auto& t : pool) t.join();
  return done;
}

struct EvalMismatch {
  std::string run_id;
  double stored_soft = 0.0, recomputed_soft = 0.0;
  int stored_solved = 0, recomputed_solved = 0;
};

// Re-derives final answers from persisted transcripts and re-evaluates them
// against the persisted topologies, reporting any disagreement with the
// records file.
inline std::vector<EvalMismatch> recompute_evaluations(const std::string& experiment_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(experiment_dir);
  std::ifstream cfg_in(dir / "config.json");
  if (!cfg_in) throw ParameterError("no config.json under " + experiment_dir);
  nlohmann::json cfg_json;
  cfg_in >> cfg_json;
  const ExperimentConfig cfg = config_from_json(cfg_json);

  std::vector<EvalMismatch> mismatches;
  for (const auto& record : read_records_file((dir / "records.jsonl").string())) {
    if (record.failed) continue;
    std::ifstream topo_in(dir / "topologies" / record.topology_ref);
    if (!topo_in) throw StructuralError("missing topology file " + record.topology_ref);
    std::ostringstream topo_buf;
    topo_buf << topo_in.rdbuf();
    Topology topo = parse_topology(topo_buf.str());
    auto identities = assign_names(topo, default_name_pool(), names_seed(cfg, topo));
    apply_labels(topo, identities);

    std::ifstream tr_in(dir / "transcripts" / (record.run_id + ".jsonl"));
    if (!tr_in) throw StructuralError("missing transcript for " + record.run_id);
    std::ostringstream tr_buf;
    tr_buf << tr_in.rdbuf();
    const RunTranscript transcript = parse_transcript(tr_buf.str());

    AnswerContext ctx;
    ctx.delta_plus_one = metrics(topo).max_degree + 1;
    for (const auto& id : identities) ctx.agent_names.push_back(id.name);
    AnswerMap answers;
    for (const auto& e : transcript.events) {
      if (e.kind != EventKind::Final) continue;
      FinalAnswer answer = FinalAnswer::invalid();
      if (auto text = extract_final_answer_text(e.content)) {
        answer = parse_final_answer(record.task, *text, ctx);
      }
      answers[e.agent] = answer;
    }
    const Evaluation ev = evaluate(record.task, topo, answers);
    const bool same = ev.soft_score == record.soft_score && (ev.solved ? 1 : 0) == record.solved;
    if (!same) {
      mismatches.push_back({record.run_id, record.soft_score, ev.soft_score, record.solved,
                            ev.solved ? 1 : 0});
    }
  }
  return mismatches;
}

}  // namespace agentmesh
