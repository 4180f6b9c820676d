#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agentmesh/report.hpp"

namespace agentmesh {

// Plot emission. Each figure is written as a self-contained SVG plus a CSV
// sidecar holding the exact plotted values, so downstream checks can read
// numbers back without parsing the drawing.

namespace plot_detail {

inline std::string fmt(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

struct Canvas {
  double width = 640, height = 420;
  double left = 70, right = 20, top = 20, bottom = 50;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

  double px(double x) const {
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    return left + (x - x_min) / span * (width - left - right);
  }
  double py(double y) const {
    const double span = y_max > y_min ? y_max - y_min : 1.0;
    return height - bottom - (y - y_min) / span * (height - top - bottom);
  }
};

inline void open_svg(std::ostringstream& out, const Canvas& c, const std::string& x_label,
                     const std::string& y_label) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width << "\" height=\""
      << c.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << c.left << "\" y1=\"" << c.height - c.bottom << "\" x2=\""
      << c.width - c.right << "\" y2=\"" << c.height - c.bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << c.left << "\" y1=\"" << c.top << "\" x2=\"" << c.left << "\" y2=\""
      << c.height - c.bottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (c.left + c.width - c.right) / 2 << "\" y=\"" << c.height - 10
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (c.top + c.height - c.bottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (c.top + c.height - c.bottom) / 2 << ")\">" << y_label << "</text>\n";
}

inline const char* color_for(std::size_t i) {
  static const char* palette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52",
                                  "#8172b3", "#937860", "#da8bc3", "#8c8c8c"};
  return palette[i % 8];
}

}  // namespace plot_detail

struct CostPoint {
  std::string model;
  double cost = 0.0;
  double mean = 0.0;
  double se = 0.0;
  bool pareto = false;
};

// A model is Pareto-optimal when no other model is at least as good on both
// axes (cheaper-or-equal and scoring higher-or-equal) and strictly better on
// one of them.
inline void mark_pareto(std::vector<CostPoint>& points) {
  for (auto& p : points) {
    p.pareto = true;
    for (const auto& q : points) {
      if (&p == &q) continue;
      const bool weakly_dominates = q.cost <= p.cost && q.mean >= p.mean;
      const bool strictly = q.cost < p.cost || q.mean > p.mean;
      if (weakly_dominates && strictly) {
        p.pareto = false;
        break;
      }
    }
  }
}

// Score-versus-cost scatter with standard-error bars; Pareto-optimal models
// get a star marker. Returns the written file paths; empty when no cost data
// is present (the plot is skipped with a warning through `warn`).
inline std::vector<std::string> write_cost_plot(const BenchmarkReport& report,
                                                const std::string& out_dir,
                                                const std::function<void(const std::string&)>& warn = {}) {
  std::vector<CostPoint> points;
  for (const auto& row : report.rows) {
    const double repeats = std::max(1, row.report.total_runs - row.report.failed_runs);
    CostPoint p;
    p.model = row.model;
    p.cost = row.report.total_cost_usd;
    p.mean = row.report.mean;
    p.se = row.report.se;
    (void)repeats;
    points.push_back(p);
  }
  const bool any_cost = std::any_of(points.begin(), points.end(),
                                    [](const CostPoint& p) { return p.cost > 0; });
  if (!any_cost) {
    if (warn) warn("no cost data in records; skipping the score-vs-cost plot");
    return {};
  }
  mark_pareto(points);

  namespace pd = plot_detail;
  pd::Canvas c;
  c.x_min = 0;
  c.x_max = 0;
  for (const auto& p : points) c.x_max = std::max(c.x_max, p.cost * 1.15);
  std::ostringstream svg;
  pd::open_svg(svg, c, "cost (USD)", "benchmark score");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const double x = c.px(p.cost), y = c.py(p.mean);
    svg << "<line x1=\"" << x << "\" y1=\"" << c.py(p.mean - p.se) << "\" x2=\"" << x
        << "\" y2=\"" << c.py(p.mean + p.se) << "\" stroke=\"" << pd::color_for(i) << "\"/>\n";
    svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << pd::color_for(i)
        << "\"/>\n";
    if (p.pareto) {
      svg << "<text x=\"" << x << "\" y=\"" << y - 8
          << "\" text-anchor=\"middle\" fill=\"#b8860b\" font-size=\"16\">&#9733;</text>\n";
    }
    svg << "<text x=\"" << x + 6 << "\" y=\"" << y + 4 << "\">" << p.model << "</text>\n";
  }
  svg << "</svg>\n";

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string svg_path = (fs::path(out_dir) / "score_vs_cost.svg").string();
  const std::string csv_path = (fs::path(out_dir) / "score_vs_cost.csv").string();
  std::ofstream(svg_path) << svg.str();
  std::ofstream csv(csv_path);
  csv << "model,cost_usd,mean,se,pareto\n";
  for (const auto& p : points) {
    csv << p.model << ',' << pd::fmt(p.cost) << ',' << pd::fmt(p.mean) << ',' << pd::fmt(p.se)
        << ',' << (p.pareto ? 1 : 0) << '\n';
  }
  return {svg_path, csv_path};
}

// Stacked per-size task breakdown: for each graph size, each task's bar
// segment is its mean solved fraction divided by the task count, so a
// perfect model stacks to 1.
inline std::vector<std::string> write_size_breakdown_plot(const std::vector<RunRecord>& records,
                                                          const std::string& out_dir) {
  std::map<int, std::map<TaskKind, std::pair<double, int>>> sums;  // size -> task -> (sum, n)
  std::set<TaskKind> tasks;
  for (const auto& r : records) {
    if (r.failed) continue;
    auto& cell = sums[r.size][r.task];
    cell.first += r.solved;
    cell.second += 1;
    tasks.insert(r.task);
  }
  namespace pd = plot_detail;
  pd::Canvas c;
  std::ostringstream svg;
  pd::open_svg(svg, c, "graph size", "solved fraction (stacked by task)");
  const double bar_width = (c.width - c.left - c.right) / std::max<std::size_t>(sums.size(), 1) * 0.6;
  std::ostringstream csv;
  csv << "size,task,mean,segment\n";
  std::size_t bar_index = 0;
  for (const auto& [size, by_task] : sums) {
    const double x_center =
        c.left + (bar_index + 0.5) * (c.width - c.left - c.right) / sums.size();
    double y_acc = 0.0;
    std::size_t color = 0;
    for (TaskKind t : std::vector<TaskKind>(tasks.begin(), tasks.end())) {
      auto it = by_task.find(t);
      const double mean = it == by_task.end() || it->second.second == 0
                              ? 0.0
                              : it->second.first / it->second.second;
      const double segment = mean / static_cast<double>(tasks.size());
      const double y0 = c.py(y_acc), y1 = c.py(y_acc + segment);
      svg << "<rect x=\"" << x_center - bar_width / 2 << "\" y=\"" << y1 << "\" width=\""
          << bar_width << "\" height=\"" << y0 - y1 << "\" fill=\"" << pd::color_for(color)
          << "\"/>\n";
      csv << size << ',' << to_string(t) << ',' << pd::fmt(mean) << ',' << pd::fmt(segment)
          << '\n';
      y_acc += segment;
      ++color;
    }
    svg << "<text x=\"" << x_center << "\" y=\"" << c.height - c.bottom + 16
        << "\" text-anchor=\"middle\">" << size << "</text>\n";
    ++bar_index;
  }
  svg << "</svg>\n";

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string svg_path = (fs::path(out_dir) / "size_breakdown.svg").string();
  const std::string csv_path = (fs::path(out_dir) / "size_breakdown.csv").string();
  std::ofstream(svg_path) << svg.str();
  std::ofstream(csv_path) << csv.str();
  return {svg_path, csv_path};
}

// Solved-fraction curves over network size, one polyline per task; used for
// the scaling experiments.
inline std::vector<std::string> write_scaling_plot(const std::vector<RunRecord>& records,
                                                   const std::string& out_dir) {
  std::map<TaskKind, std::map<int, std::pair<double, int>>> series;
  std::set<int> sizes;
  for (const auto& r : records) {
    if (r.failed) continue;
    auto& cell = series[r.task][r.size];
    cell.first += r.solved;
    cell.second += 1;
    sizes.insert(r.size);
  }
  namespace pd = plot_detail;
  pd::Canvas c;
  c.x_min = sizes.empty() ? 0 : *sizes.begin();
  c.x_max = sizes.empty() ? 1 : *sizes.rbegin();
  std::ostringstream svg;
  pd::open_svg(svg, c, "network size", "solved fraction");
  std::ostringstream csv;
  csv << "task,size,mean\n";
  std::size_t color = 0;
  for (const auto& [task, by_size] : series) {
    std::string path;
    for (const auto& [size, cell] : by_size) {
      const double mean = cell.second == 0 ? 0.0 : cell.first / cell.second;
      path += (path.empty() ? "M" : " L") + std::to_string(c.px(size)) + " " +
              std::to_string(c.py(mean));
      csv << to_string(task) << ',' << size << ',' << pd::fmt(mean) << '\n';
    }
    svg << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << pd::color_for(color)
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << c.width - c.right - 140 << "\" y=\"" << c.top + 16 * (color + 1)
        << "\" fill=\"" << pd::color_for(color) << "\">" << display_name(task) << "</text>\n";
    ++color;
  }
  svg << "</svg>\n";

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string svg_path = (fs::path(out_dir) / "scaling_curves.svg").string();
  const std::string csv_path = (fs::path(out_dir) / "scaling_curves.csv").string();
  std::ofstream(svg_path) << svg.str();
  std::ofstream(csv_path) << csv.str();
  return {svg_path, csv_path};
}

}  // namespace agentmesh
