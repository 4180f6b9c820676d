#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "agentmesh/chat.hpp"
#include "agentmesh/graph.hpp"
#include "agentmesh/rng.hpp"

namespace testutil {

inline agentmesh::Topology make_topology(int n, std::vector<agentmesh::Edge> edges,
                                         std::vector<std::string> labels = {}) {
  agentmesh::Topology t;
  t.node_count = n;
  t.edges = agentmesh::normalize_edges(std::move(edges));
  for (std::size_t i = 0; i < labels.size(); ++i) t.labels[static_cast<int>(i)] = labels[i];
  return t;
}

inline agentmesh::Topology path_graph(int n, std::vector<std::string> labels = {}) {
  std::vector<agentmesh::Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return make_topology(n, std::move(edges), std::move(labels));
}

inline agentmesh::Topology cycle_graph(int n, std::vector<std::string> labels = {}) {
  std::vector<agentmesh::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back(agentmesh::make_edge(i, (i + 1) % n));
  return make_topology(n, std::move(edges), std::move(labels));
}

inline agentmesh::Topology complete_graph(int n, std::vector<std::string> labels = {}) {
  std::vector<agentmesh::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return make_topology(n, std::move(edges), std::move(labels));
}

inline agentmesh::Topology star_graph(int leaves, std::vector<std::string> labels = {}) {
  std::vector<agentmesh::Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return make_topology(leaves + 1, std::move(edges), std::move(labels));
}

// Independent diameter computation by Floyd-Warshall, for checking the BFS
// metrics against a second route.
inline int floyd_warshall_diameter(const agentmesh::Topology& t) {
  const int n = t.node_count;
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [u, v] : t.edges) d[u][v] = d[v][u] = 1;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  int diameter = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (d[i][j] >= inf) return -1;  // disconnected
      diameter = std::max(diameter, d[i][j]);
    }
  }
  return diameter;
}

// Degree recount straight from an edge list, independent of GraphMetrics.
inline std::vector<int> recount_degrees(const agentmesh::Topology& t) {
  std::vector<int> deg(t.node_count, 0);
  for (const auto& [u, v] : t.edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

// Connectivity via union-find, independent of the BFS in graph.hpp.
inline bool union_find_connected(const agentmesh::Topology& t) {
  std::vector<int> parent(t.node_count);
  for (int i = 0; i < t.node_count; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& [u, v] : t.edges) parent[find(u)] = find(v);
  for (int i = 1; i < t.node_count; ++i) {
    if (find(i) != find(0)) return false;
  }
  return true;
}

// A random connected labeled graph: random spanning tree plus extra edges.
inline agentmesh::Topology random_connected_graph(int n, double extra_edge_prob,
                                                  std::uint64_t seed,
                                                  std::vector<std::string> labels = {}) {
  agentmesh::Rng rng(seed);
  std::vector<agentmesh::Edge> edges;
  for (int v = 1; v < n; ++v) {
    edges.push_back(agentmesh::make_edge(v, rng.below_int(v)));
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.bernoulli(extra_edge_prob)) edges.push_back({u, v});
    }
  }
  return make_topology(n, std::move(edges), std::move(labels));
}

// Backend driven by a plain function; handy for scripting protocol tests.
class FunctionBackend final : public agentmesh::AgentBackend {
 public:
  using Fn = std::function<std::string(const agentmesh::ChatHistory&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
  std::string generate(const agentmesh::ChatHistory& history) override { return fn_(history); }

 private:
  Fn fn_;
};

inline std::vector<std::string> letter_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return names;
}

}  // namespace testutil
