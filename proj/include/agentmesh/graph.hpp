#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace agentmesh {

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GraphFamily { SmallWorld, ScaleFree, Delaunay };

inline std::string to_string(GraphFamily f) {
  switch (f) {
    case GraphFamily::SmallWorld: return "small_world";
    case GraphFamily::ScaleFree: return "scale_free";
    case GraphFamily::Delaunay: return "delaunay";
  }
  throw ParameterError("unknown graph family");
}

inline GraphFamily family_from_string(std::string_view s) {
  if (s == "small_world") return GraphFamily::SmallWorld;
  if (s == "scale_free") return GraphFamily::ScaleFree;
  if (s == "delaunay") return GraphFamily::Delaunay;
  throw ParameterError("unknown graph family: " + std::string(s));
}

// Undirected edge, always stored with u < v.
using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) {
  if (u == v) throw StructuralError("self-loop edge");
  return u < v ? Edge{u, v} : Edge{v, u};
}

struct Topology {
  int node_count = 0;
  std::vector<Edge> edges;  // sorted, unique, u < v
  GraphFamily family = GraphFamily::SmallWorld;
  std::uint64_t seed = 0;
  std::map<int, std::string> labels;  // optional node index -> agent name

  bool has_edge(int u, int v) const {
    if (u == v) return false;
    return std::binary_search(edges.begin(), edges.end(), make_edge(u, v));
  }

  int degree_of(int u) const {
    int d = 0;
    for (const auto& [a, b] : edges) {
      if (a == u || b == u) ++d;
    }
    return d;
  }

  // Agent name for a node; falls back to the node index as a string.
  std::string label_of(int u) const {
    auto it = labels.find(u);
    return it != labels.end() ? it->second : std::to_string(u);
  }
};

// Sort ascending by (u, v), orient u < v, drop duplicates. Rejects self-loops.
inline std::vector<Edge> normalize_edges(std::vector<Edge> edges) {
  for (auto& e : edges) e = make_edge(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline std::vector<std::vector<int>> adjacency_list(const Topology& t) {
  std::vector<std::vector<int>> adj(t.node_count);
  for (const auto& [u, v] : t.edges) {
    if (u < 0 || v >= t.node_count) throw StructuralError("edge endpoint out of range");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

inline std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Topology& t) {
  if (t.node_count <= 0) return false;
  if (t.node_count == 1) return true;
  auto dist = bfs_distances(adjacency_list(t), 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

struct GraphMetrics {
  int max_degree = 0;        // Delta
  int diameter = 0;          // D, hop count
  std::vector<int> degree_sequence;
};

// Exact max degree by degree scan and exact diameter by all-pairs BFS.
inline GraphMetrics metrics(const Topology& t) {
  if (t.node_count <= 0) throw StructuralError("metrics on empty topology");
  GraphMetrics m;
  m.degree_sequence.assign(t.node_count, 0);
  for (const auto& [u, v] : t.edges) {
    ++m.degree_sequence[u];
    ++m.degree_sequence[v];
  }
  m.max_degree = *std::max_element(m.degree_sequence.begin(), m.degree_sequence.end());
  auto adj = adjacency_list(t);
  for (int s = 0; s < t.node_count; ++s) {
    auto dist = bfs_distances(adj, s);
    for (int d : dist) {
      if (d < 0) throw StructuralError("diameter undefined: graph is disconnected");
      m.diameter = std::max(m.diameter, d);
    }
  }
  return m;
}

// Graph exchange format: header line "n family seed" followed by one "u v"
// edge per line, u < v, ascending. Serialization is bit-exact for a given
// topology; labels are presentation state and are not part of the format.
inline std::string serialize_topology(const Topology& t) {
  std::ostringstream out;
  out << t.node_count << ' ' << to_string(t.family) << ' ' << t.seed << '\n';
  for (const auto& [u, v] : t.edges) {
    out << u << ' ' << v << '\n';
  }
  return out.str();
}

inline Topology parse_topology(std::string_view text) {
  std::istringstream in{std::string(text)};
  Topology t;
  std::string family;
  if (!(in >> t.node_count >> family >> t.seed)) {
    throw StructuralError("malformed topology header");
  }
  t.family = family_from_string(family);
  int u = 0, v = 0;
  while (in >> u >> v) {
    if (u >= v || u < 0 || v >= t.node_count) {
      throw StructuralError("malformed topology edge");
    }
    t.edges.emplace_back(u, v);
  }
  if (!std::is_sorted(t.edges.begin(), t.edges.end())) {
    throw StructuralError("topology edges not sorted");
  }
  return t;
}

}  // namespace agentmesh
