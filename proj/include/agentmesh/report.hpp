#pragma once

#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agentmesh/stats.hpp"

namespace agentmesh {

struct ModelRow {
  std::string model;
  AggregateReport report;
};

struct BenchmarkReport {
  std::vector<TaskKind> task_order;
  std::vector<ModelRow> rows;  // sorted by model name
};

enum class ReportFormat { TextTable, Delimited, Markdown };

inline ReportFormat report_format_from_string(std::string_view s) {
  if (s == "text") return ReportFormat::TextTable;
  if (s == "csv" || s == "delimited") return ReportFormat::Delimited;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  throw ParameterError("unknown report format: " + std::string(s));
}

// Groups records by model and aggregates each group. The expected cell set
// applies to every model; partial coverage is refused unless allowed.
inline BenchmarkReport build_report(const std::vector<RunRecord>& records,
                                    const std::set<CellKey>& expected, Metric metric,
                                    bool allow_partial = false) {
  std::map<std::string, std::vector<RunRecord>> by_model;
  for (const auto& r : records) by_model[r.model].push_back(r);
  BenchmarkReport report;
  std::set<TaskKind> tasks;
  for (const auto& key : expected) tasks.insert(key.task);
  if (tasks.empty()) {
    for (const auto& r : records) tasks.insert(r.task);
  }
  report.task_order.assign(tasks.begin(), tasks.end());
  for (const auto& [model, group] : by_model) {
    ModelRow row;
    row.model = model;
    row.report = aggregate(cell_stats(group, metric), expected, allow_partial);
    fill_cost_totals(row.report, group);
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace report_detail {

inline std::string fmt(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << x;
  return out.str();
}

inline std::string score_cell(const Breakdown& b) {
  return fmt(b.mean) + " (" + fmt(b.se) + ")";
}

inline std::vector<std::string> header_cells(const BenchmarkReport& r) {
  std::vector<std::string> cells{"Model"};
  for (TaskKind t : r.task_order) cells.push_back(display_name(t));
  cells.push_back("Aggregate");
  cells.push_back("Failures");
  return cells;
}

inline std::vector<std::string> row_cells(const BenchmarkReport& r, const ModelRow& row) {
  std::vector<std::string> cells{row.model};
  for (TaskKind t : r.task_order) {
    auto it = row.report.per_task.find(t);
    cells.push_back(it != row.report.per_task.end() ? score_cell(it->second) : "-");
  }
  Breakdown overall;
  overall.mean = row.report.mean;
  overall.se = row.report.se;
  cells.push_back(score_cell(overall));
  cells.push_back(std::to_string(row.report.failed_runs));
  return cells;
}

}  // namespace report_detail

// One row per model, one column per task plus the aggregate column, standard
// errors in parentheses. Rows are ordered by model name, so output is
// deterministic for a given record set.
inline std::string render_report(const BenchmarkReport& report, ReportFormat format) {
  using report_detail::header_cells;
  using report_detail::row_cells;
  std::vector<std::vector<std::string>> table{header_cells(report)};
  for (const auto& row : report.rows) table.push_back(row_cells(report, row));

  std::ostringstream out;
  switch (format) {
    case ReportFormat::Delimited: {
      for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << row[i];
          if (i + 1 < row.size()) out << '\t';
        }
        out << '\n';
      }
      break;
    }
    case ReportFormat::Markdown: {
      for (std::size_t r = 0; r < table.size(); ++r) {
        out << "|";
        for (const auto& cell : table[r]) out << ' ' << cell << " |";
        out << '\n';
        if (r == 0) {
          out << "|";
          for (std::size_t i = 0; i < table[0].size(); ++i) out << " --- |";
          out << '\n';
        }
      }
      break;
    }
    case ReportFormat::TextTable: {
      std::vector<std::size_t> widths(table[0].size(), 0);
      for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
      }
      for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << std::left << std::setw(static_cast<int>(widths[i]) + 2) << row[i];
        }
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

// Parses a rendered delimited or markdown report back into its cells; used
// to check that the formats agree value for value.
inline std::vector<std::vector<std::string>> parse_report_cells(const std::string& text,
                                                                ReportFormat format) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    if (format == ReportFormat::Markdown) {
      if (line.find("---") != std::string::npos) continue;
      std::size_t pos = 1;  // skip leading '|'
      while (pos < line.size()) {
        const auto next = line.find('|', pos);
        if (next == std::string::npos) break;
        std::string cell = line.substr(pos, next - pos);
        const auto a = cell.find_first_not_of(' ');
        const auto b = cell.find_last_not_of(' ');
        cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
        pos = next + 1;
      }
    } else {
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace agentmesh
