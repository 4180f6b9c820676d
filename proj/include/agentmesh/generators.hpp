#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "agentmesh/delaunay.hpp"
#include "agentmesh/graph.hpp"
#include "agentmesh/rng.hpp"

namespace agentmesh {

// Attempts per generator call before giving up on connectivity or geometry.
inline constexpr int kGeneratorRetryBudget = 64;

// Watts-Strogatz ring lattice with rewiring. Resampled with a derived seed
// until connected; deterministic given (n, k, p, seed).
inline Topology gen_small_world(int n, int k, double p, std::uint64_t seed) {
  if (n < 4) throw ParameterError("small_world: n must be >= 4");
  if (k < 2 || k >= n) throw ParameterError("small_world: need 2 <= k < n");
  if (k % 2 != 0) throw ParameterError("small_world: k must be even");
  if (p < 0.0 || p > 1.0) throw ParameterError("small_world: p must be in [0, 1]");

  for (int attempt = 0; attempt < kGeneratorRetryBudget; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt), hash64("ws")));
    std::set<Edge> edges;
    for (int j = 1; j <= k / 2; ++j) {
      for (int i = 0; i < n; ++i) {
        edges.insert(make_edge(i, (i + j) % n));
      }
    }
    // Rewire each lattice edge (i, i+j) with probability p, keeping i fixed.
    for (int j = 1; j <= k / 2; ++j) {
      for (int i = 0; i < n; ++i) {
        if (!rng.bernoulli(p)) continue;
        Edge old = make_edge(i, (i + j) % n);
        if (!edges.count(old)) continue;  // already rewired away by an earlier pass
        int degree_i = 0;
        for (const auto& e : edges) degree_i += (e.first == i || e.second == i);
        if (degree_i >= n - 1) continue;  // saturated, nothing to rewire to
        int w;
        do {
          w = rng.below_int(n);
        } while (w == i || edges.count(make_edge(i, w)));
        edges.erase(old);
        edges.insert(make_edge(i, w));
      }
    }
    Topology t;
    t.node_count = n;
    t.edges.assign(edges.begin(), edges.end());
    t.family = GraphFamily::SmallWorld;
    t.seed = seed;
    if (is_connected(t)) return t;
  }
  throw GenerationError("small_world: no connected graph within retry budget");
}

// Barabasi-Albert preferential attachment: a star on m+1 nodes, then each new
// node attaches to m distinct targets sampled proportionally to degree.
// Connected by construction.
inline Topology gen_scale_free(int n, int m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw ParameterError("scale_free: need 1 <= m < n");

  Rng rng(derive_seed(seed, hash64("ba")));
  std::vector<Edge> edges;
  std::vector<int> repeated;  // node index repeated once per incident edge
  for (int i = 1; i <= m; ++i) {
    edges.push_back(make_edge(0, i));
    repeated.push_back(0);
    repeated.push_back(i);
  }
  for (int source = m + 1; source < n; ++source) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      targets.insert(repeated[rng.below(repeated.size())]);
    }
    for (int target : targets) {
      edges.push_back(make_edge(source, target));
      repeated.push_back(target);
      repeated.push_back(source);
    }
  }
  Topology t;
  t.node_count = n;
  t.edges = normalize_edges(std::move(edges));
  t.family = GraphFamily::ScaleFree;
  t.seed = seed;
  return t;
}

// Delaunay triangulation over n points sampled uniformly in the unit square.
// Degenerate samples are retried with a derived seed.
inline Topology gen_delaunay(int n, std::uint64_t seed) {
  if (n < 3) throw ParameterError("delaunay: n must be >= 3");

  for (int attempt = 0; attempt < kGeneratorRetryBudget; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt), hash64("dt")));
    std::vector<Point> pts(n);
    for (auto& p : pts) {
      p.x = rng.unit();
      p.y = rng.unit();
    }
    auto edges = delaunay_edges(pts);
    if (edges.empty()) continue;
    Topology t;
    t.node_count = n;
    t.edges = std::move(edges);
    t.family = GraphFamily::Delaunay;
    t.seed = seed;
    if (static_cast<int>(t.edges.size()) > 3 * n - 6) continue;  // planarity violated: bad geometry
    if (!is_connected(t)) continue;
    return t;
  }
  throw GenerationError("delaunay: no valid triangulation within retry budget");
}

// Family-specific generator parameters. The n = 4 fallbacks keep the
// lattice/attachment parameters feasible on the smallest graphs.
struct SuiteParams {
  int ws_k = 4;
  double ws_p = 0.3;
  int ba_m = 2;

  int ws_k_for(int n) const { return n <= 4 ? 2 : ws_k; }
  int ba_m_for(int n) const { return n <= 4 ? 1 : ba_m; }
};

inline Topology generate(GraphFamily family, int n, std::uint64_t seed, const SuiteParams& params = {}) {
  switch (family) {
    case GraphFamily::SmallWorld: return gen_small_world(n, params.ws_k_for(n), params.ws_p, seed);
    case GraphFamily::ScaleFree: return gen_scale_free(n, params.ba_m_for(n), seed);
    case GraphFamily::Delaunay: return gen_delaunay(n, seed);
  }
  throw ParameterError("unknown graph family");
}

inline std::vector<GraphFamily> all_families() {
  return {GraphFamily::SmallWorld, GraphFamily::ScaleFree, GraphFamily::Delaunay};
}

inline std::vector<int> benchmark_sizes() { return {4, 8, 16}; }

// Sizes for the large-network preset: 20 to 100 agents in steps of 10,
// giving 9 sizes x 3 families x 3 instances = 81 topologies.
inline std::vector<int> scaling_sizes() { return {20, 30, 40, 50, 60, 70, 80, 90, 100}; }

// One topology per (size, family, instance) with distinct derived seeds.
// The default configuration (sizes {4,8,16}, all families, 3 per cell)
// yields the 27-graph benchmark suite.
inline std::vector<Topology> gen_benchmark_suite(const std::vector<int>& sizes,
                                                 const std::vector<GraphFamily>& families,
                                                 int per_cell, std::uint64_t seed,
                                                 const SuiteParams& params = {}) {
  if (sizes.empty()) throw ParameterError("suite: sizes must be non-empty");
  if (per_cell < 1) throw ParameterError("suite: per_cell must be >= 1");
  std::vector<Topology> suite;
  for (int n : sizes) {
    for (GraphFamily family : families) {
      for (int i = 0; i < per_cell; ++i) {
        std::uint64_t instance_seed = derive_seed(seed, static_cast<std::uint64_t>(n),
                                                  hash64(to_string(family)),
                                                  static_cast<std::uint64_t>(i));
        suite.push_back(generate(family, n, instance_seed, params));
      }
    }
  }
  return suite;
}

}  // namespace agentmesh
