#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agentmesh/harness.hpp"
#include "agentmesh/oracle.hpp"
#include "agentmesh/plots.hpp"
#include "agentmesh/report.hpp"

namespace fs = std::filesystem;
using namespace agentmesh;

namespace {

void log_line(const std::string& msg) { std::cerr << msg << '\n'; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<GraphFamily> parse_families(const std::vector<std::string>& names) {
  if (names.empty() || (names.size() == 1 && names[0] == "all")) return all_families();
  std::vector<GraphFamily> families;
  for (const auto& n : names) families.push_back(family_from_string(n));
  return families;
}

int cmd_gen(const std::string& out_dir, std::vector<int> sizes,
            const std::vector<std::string>& family_names, int per_cell, std::uint64_t seed,
            const std::string& preset) {
  SuiteSpec spec;
  spec.per_cell = per_cell;
  spec.seed = seed;
  spec.families = parse_families(family_names);
  if (preset == "scaling") {
    spec.sizes = scaling_sizes();
  } else if (!sizes.empty()) {
    spec.sizes = std::move(sizes);
  }
  const auto suite = build_suite(spec);
  fs::create_directories(out_dir);
  for (const auto& inst : suite) {
    std::ofstream out(fs::path(out_dir) / inst.file_name);
    out << serialize_topology(inst.topology);
  }
  std::cout << "wrote " << suite.size() << " topologies to " << out_dir << '\n';
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& output_dir, bool quiet) {
  ExperimentConfig cfg = load_config_file(config_path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  const auto records = run_experiment(cfg, quiet ? nullptr : log_line);
  int failed = 0, solved = 0;
  for (const auto& r : records) {
    failed += r.failed;
    solved += r.solved;
  }
  std::cout << records.size() << " runs (" << solved << " solved, " << failed
            << " failed) recorded in " << cfg.output_dir << '\n';
  return 0;
}

int cmd_eval(const std::string& experiment_dir) {
  const auto mismatches = recompute_evaluations(experiment_dir);
  if (mismatches.empty()) {
    std::cout << "all records match their transcripts\n";
    return 0;
  }
  for (const auto& m : mismatches) {
    std::cout << m.run_id << ": stored soft=" << m.stored_soft << " solved=" << m.stored_solved
              << ", recomputed soft=" << m.recomputed_soft << " solved=" << m.recomputed_solved
              << '\n';
  }
  return 1;
}

std::vector<RunRecord> load_all_records(const std::vector<std::string>& paths) {
  std::vector<RunRecord> records;
  for (const auto& p : paths) {
    auto part = read_records_file(p);
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

std::set<CellKey> expected_from(const std::string& config_path,
                                const std::vector<RunRecord>& records) {
  if (!config_path.empty()) {
    const ExperimentConfig cfg = load_config_file(config_path);
    return expected_cells(cfg.suite.sizes, cfg.tasks, cfg.suite.families);
  }
  std::set<CellKey> present;
  for (const auto& r : records) present.insert({r.size, r.task, r.family});
  return present;
}

int cmd_report(const std::vector<std::string>& record_paths, const std::string& config_path,
               const std::string& format, const std::string& metric, bool allow_partial,
               const std::string& out_path) {
  const auto records = load_all_records(record_paths);
  const auto report =
      build_report(records, expected_from(config_path, records),
                   metric == "soft" ? Metric::Soft : Metric::Solved, allow_partial);
  const std::string rendered = render_report(report, report_format_from_string(format));
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream(out_path) << rendered;
  }
  if (report.rows.empty()) return 2;  // nothing to report
  return 0;
}

int cmd_plot(const std::vector<std::string>& record_paths, const std::string& config_path,
             const std::string& out_dir, bool allow_partial) {
  const auto records = load_all_records(record_paths);
  const auto report = build_report(records, expected_from(config_path, records), Metric::Solved,
                                   allow_partial);
  std::vector<std::string> files;
  for (const auto& f : write_cost_plot(report, out_dir, log_line)) files.push_back(f);
  for (const auto& f : write_size_breakdown_plot(records, out_dir)) files.push_back(f);
  for (const auto& f : write_scaling_plot(records, out_dir)) files.push_back(f);
  for (const auto& f : files) std::cout << f << '\n';
  return 0;
}

int cmd_oracle(const std::string& topology_path, const std::string& task_name,
               const std::string& answers_path) {
  const TaskKind task = task_from_string(task_name);
  const Topology topo = parse_topology(slurp(topology_path));
  const auto answers_json = nlohmann::json::parse(slurp(answers_path));
  AnswerContext ctx;
  ctx.delta_plus_one = metrics(topo).max_degree + 1;
  for (int u = 0; u < topo.node_count; ++u) ctx.agent_names.push_back(topo.label_of(u));
  AnswerMap answers;
  for (const auto& [name, value] : answers_json.items()) {
    answers[name] = parse_final_answer(task, value.get<std::string>(), ctx);
  }
  const Evaluation ev = evaluate(task, topo, answers);
  const bool oracle = oracle_check(task, topo, answers);
  nlohmann::json out{{"task", to_string(task)},
                     {"soft_score", ev.soft_score},
                     {"solved", ev.solved},
                     {"oracle_solved", oracle},
                     {"diagnostics", ev.diagnostics}};
  std::cout << out.dump(2) << '\n';
  return ev.solved == oracle ? 0 : 3;  // disagreement would be a bug
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for multi-agent coordination on networks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate benchmark topologies");
  std::string gen_out = "topologies";
  std::vector<int> gen_sizes;
  std::vector<std::string> gen_families{"all"};
  int gen_per_cell = 3;
  std::uint64_t gen_seed = 1;
  std::string gen_preset = "benchmark";
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--sizes", gen_sizes, "Graph sizes (default 4 8 16)");
  gen->add_option("--families", gen_families,
                  "Graph families: small_world scale_free delaunay, or all");
  gen->add_option("--per-cell", gen_per_cell, "Instances per (size, family) cell");
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--preset", gen_preset, "benchmark (4/8/16) or scaling (20..100)")
      ->check(CLI::IsMember({"benchmark", "scaling"}));

  // run
  auto* run = app.add_subcommand("run", "Execute an experiment from a config file");
  std::string run_config, run_out;
  bool run_quiet = false;
  run->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--output-dir", run_out, "Override the config's output directory");
  run->add_flag("--quiet", run_quiet, "Suppress per-run progress output");

  // eval
  auto* eval = app.add_subcommand("eval", "Recompute evaluations from stored transcripts");
  std::string eval_dir;
  eval->add_option("--experiment", eval_dir, "Experiment directory")->required();

  // report
  auto* report = app.add_subcommand("report", "Render the results table");
  std::vector<std::string> report_records;
  std::string report_config, report_format = "text", report_metric = "solved", report_out;
  bool report_partial = false;
  report->add_option("--records", report_records, "records.jsonl files (one per model)")
      ->required();
  report->add_option("--config", report_config, "Config defining the expected cells");
  report->add_option("--format", report_format, "text, csv, or markdown")
      ->check(CLI::IsMember({"text", "csv", "markdown"}));
  report->add_option("--metric", report_metric, "solved or soft")
      ->check(CLI::IsMember({"solved", "soft"}));
  report->add_flag("--allow-partial", report_partial, "Tolerate missing cells");
  report->add_option("--out", report_out, "Write to a file instead of stdout");

  // plot
  auto* plot = app.add_subcommand("plot", "Emit SVG figures with CSV sidecars");
  std::vector<std::string> plot_records;
  std::string plot_config, plot_out = "plots";
  bool plot_partial = false;
  plot->add_option("--records", plot_records, "records.jsonl files")->required();
  plot->add_option("--config", plot_config, "Config defining the expected cells");
  plot->add_option("--out", plot_out, "Output directory");
  plot->add_flag("--allow-partial", plot_partial, "Tolerate missing cells");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Run the brute-force validators on answers");
  std::string oracle_topology, oracle_task, oracle_answers;
  oracle->add_option("--topology", oracle_topology, "Topology file (.graph)")->required();
  oracle->add_option("--task", oracle_task, "Task name")->required();
  oracle->add_option("--answers", oracle_answers,
                     "JSON file mapping node index to an answer string")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_out, gen_sizes, gen_families, gen_per_cell, gen_seed, gen_preset);
    }
    if (run->parsed()) return cmd_run(run_config, run_out, run_quiet);
    if (eval->parsed()) return cmd_eval(eval_dir);
    if (report->parsed()) {
      return cmd_report(report_records, report_config, report_format, report_metric,
                        report_partial, report_out);
    }
    if (plot->parsed()) return cmd_plot(plot_records, plot_config, plot_out, plot_partial);
    if (oracle->parsed()) return cmd_oracle(oracle_topology, oracle_task, oracle_answers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
