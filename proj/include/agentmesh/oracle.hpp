#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentmesh/graph.hpp"
#include "agentmesh/tasks.hpp"

namespace agentmesh {

// Brute-force ground-truth validators. These deliberately take different
// routes than the evaluators (explicit removal re-checks, pair scans) so the
// two can be compared against each other. Exponential in spirit, so they
// refuse graphs beyond a small size.
inline constexpr int kOracleMaxNodes = 12;

namespace oracle_detail {

inline void require_small(const Topology& t) {
  if (t.node_count > kOracleMaxNodes) {
    throw ParameterError("oracle_check refuses graphs with n > " +
                         std::to_string(kOracleMaxNodes));
  }
}

inline bool covers_all_edges(const Topology& t, const std::vector<bool>& in_cover) {
  for (const auto& [u, v] : t.edges) {
    if (!in_cover[u] && !in_cover[v]) return false;
  }
  return true;
}

}  // namespace oracle_detail

// Returns the ground-truth solved flag for the given answers.
inline bool oracle_check(TaskKind kind, const Topology& t, const AnswerMap& answers) {
  oracle_detail::require_small(t);
  const int n = t.node_count;
  std::vector<FinalAnswer> a(n);
  for (int u = 0; u < n; ++u) {
    a[u] = detail::answer_of(answers, t.label_of(u));
    if (!a[u].valid()) return false;
  }

  switch (kind) {
    case TaskKind::Coloring: {
      const int bound = t.edges.empty() ? 2 : metrics(t).max_degree + 1;
      for (int u = 0; u < n; ++u) {
        if (a[u].kind != FinalAnswer::Kind::Group) return false;
        if (a[u].group < 1 || a[u].group > bound) return false;
      }
      for (const auto& [u, v] : t.edges) {
        if (a[u].group == a[v].group) return false;
      }
      return true;
    }
    case TaskKind::VertexCover: {
      std::vector<bool> cover(n, false);
      for (int u = 0; u < n; ++u) {
        if (a[u].kind != FinalAnswer::Kind::YesNo) return false;
        cover[u] = a[u].yes;
      }
      if (!oracle_detail::covers_all_edges(t, cover)) return false;
      // Minimal iff removing any single coordinator uncovers some edge.
      for (int u = 0; u < n; ++u) {
        if (!cover[u]) continue;
        std::vector<bool> without = cover;
        without[u] = false;
        if (oracle_detail::covers_all_edges(t, without)) return false;
      }
      return true;
    }
    case TaskKind::Matching: {
      std::map<std::string, int> index_of;
      for (int u = 0; u < n; ++u) index_of[t.label_of(u)] = u;
      std::vector<int> partner(n, -1);
      for (int u = 0; u < n; ++u) {
        if (a[u].kind != FinalAnswer::Kind::Partner) return false;
        if (a[u].partner_none()) continue;
        auto it = index_of.find(a[u].partner);
        if (it == index_of.end()) return false;
        partner[u] = it->second;
      }
      // Valid matching: every selection is a mutual neighbor pair.
      for (int u = 0; u < n; ++u) {
        if (partner[u] < 0) continue;
        if (!t.has_edge(u, partner[u])) return false;
        if (partner[partner[u]] != u) return false;
      }
      // Maximal: no edge joins two unmatched agents.
      for (const auto& [u, v] : t.edges) {
        if (partner[u] < 0 && partner[v] < 0) return false;
      }
      return true;
    }
    case TaskKind::LeaderElection: {
      int yes = 0;
      for (int u = 0; u < n; ++u) {
        if (a[u].kind != FinalAnswer::Kind::YesNo) return false;
        yes += a[u].yes;
      }
      return yes == 1;
    }
    case TaskKind::Consensus: {
      for (int u = 0; u < n; ++u) {
        if (a[u].kind != FinalAnswer::Kind::Bit) return false;
        if (a[u].bit != a[0].bit) return false;
      }
      return true;
    }
  }
  throw ParameterError("unknown task kind");
}

}  // namespace agentmesh
