#pragma once

#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "agentmesh/records.hpp"

namespace agentmesh {

// Which per-run score feeds the statistics. The headline benchmark score
// aggregates solved flags; soft scores are reported per task and never
// averaged across tasks.
enum class Metric { Solved, Soft };

struct CellKey {
  int size = 0;
  TaskKind task = TaskKind::Consensus;
  GraphFamily family = GraphFamily::SmallWorld;

  auto operator<=>(const CellKey&) const = default;
};

struct CellStat {
  CellKey key;
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
  bool se_defined = false;  // false for single-run cells
};

// Per-cell mean and standard error over all non-failed runs of a
// (size, task, family) configuration. The standard error uses the sample
// standard deviation (N-1 denominator) divided by sqrt(N).
inline std::vector<CellStat> cell_stats(const std::vector<RunRecord>& records, Metric metric) {
  std::map<CellKey, std::vector<double>> cells;
  for (const auto& r : records) {
    if (r.failed) continue;
    const double x = metric == Metric::Solved ? static_cast<double>(r.solved) : r.soft_score;
    cells[{r.size, r.task, r.family}].push_back(x);
  }
  std::vector<CellStat> stats;
  for (const auto& [key, xs] : cells) {
    CellStat s;
    s.key = key;
    s.count = static_cast<int>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / s.count;
    if (s.count > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - s.mean) * (x - s.mean);
      s.se = std::sqrt(ss / (s.count - 1)) / std::sqrt(static_cast<double>(s.count));
      s.se_defined = true;
    }
    stats.push_back(s);
  }
  return stats;
}

struct Breakdown {
  double mean = 0.0;
  double se = 0.0;
  int cells = 0;
};

struct AggregateReport {
  double mean = 0.0;
  double se = 0.0;
  int cell_count = 0;
  bool partial = false;  // aggregated over fewer cells than configured
  std::map<TaskKind, Breakdown> per_task;
  std::map<int, Breakdown> per_size;
  // Cost totals, filled from the underlying records.
  double total_cost_usd = 0.0;
  long long total_prompt_tokens = 0;
  long long total_completion_tokens = 0;
  int failed_runs = 0;
  int total_runs = 0;
};

namespace stats_detail {

// Mean of cell means with error propagation: SE = sqrt(sum SE_i^2 / |C|^2).
inline Breakdown combine(const std::vector<const CellStat*>& cells) {
  Breakdown b;
  b.cells = static_cast<int>(cells.size());
  if (cells.empty()) return b;
  double sum = 0.0, sq = 0.0;
  for (const auto* c : cells) {
    sum += c->mean;
    sq += c->se * c->se;
  }
  b.mean = sum / b.cells;
  b.se = std::sqrt(sq / (static_cast<double>(b.cells) * b.cells));
  return b;
}

}  // namespace stats_detail

// Aggregates cell statistics into the benchmark score with propagated
// standard errors, plus per-task and per-size breakdowns computed the same
// way over the matching cells. Refuses incomplete configuration coverage
// unless allow_partial is set.
inline AggregateReport aggregate(const std::vector<CellStat>& cells,
                                 const std::set<CellKey>& expected, bool allow_partial = false) {
  std::set<CellKey> present;
  for (const auto& c : cells) present.insert(c.key);
  if (!expected.empty() && present != expected && !allow_partial) {
    throw StructuralError("aggregate: " + std::to_string(expected.size() - present.size()) +
                          " configured cells have no records (use allow-partial to override)");
  }
  AggregateReport report;
  report.partial = !expected.empty() && present != expected;
  std::vector<const CellStat*> all;
  std::map<TaskKind, std::vector<const CellStat*>> by_task;
  std::map<int, std::vector<const CellStat*>> by_size;
  for (const auto& c : cells) {
    all.push_back(&c);
    by_task[c.key.task].push_back(&c);
    by_size[c.key.size].push_back(&c);
  }
  const Breakdown overall = stats_detail::combine(all);
  report.mean = overall.mean;
  report.se = overall.se;
  report.cell_count = overall.cells;
  for (const auto& [task, group] : by_task) report.per_task[task] = stats_detail::combine(group);
  for (const auto& [size, group] : by_size) report.per_size[size] = stats_detail::combine(group);
  return report;
}

inline void fill_cost_totals(AggregateReport& report, const std::vector<RunRecord>& records) {
  for (const auto& r : records) {
    ++report.total_runs;
    if (r.failed) {
      ++report.failed_runs;
      continue;
    }
    report.total_cost_usd += r.cost_usd;
    report.total_prompt_tokens += r.prompt_tokens;
    report.total_completion_tokens += r.completion_tokens;
  }
}

inline std::set<CellKey> expected_cells(const std::vector<int>& sizes,
                                        const std::vector<TaskKind>& tasks,
                                        const std::vector<GraphFamily>& families) {
  std::set<CellKey> keys;
  for (int s : sizes) {
    for (TaskKind t : tasks) {
      for (GraphFamily g : families) keys.insert({s, t, g});
    }
  }
  return keys;
}

}  // namespace agentmesh
