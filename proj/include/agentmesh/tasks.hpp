#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "agentmesh/graph.hpp"

namespace agentmesh {

enum class TaskKind { Coloring, VertexCover, Matching, LeaderElection, Consensus };

inline const std::vector<TaskKind>& all_tasks() {
  static const std::vector<TaskKind> tasks = {TaskKind::Coloring, TaskKind::VertexCover,
                                              TaskKind::Matching, TaskKind::LeaderElection,
                                              TaskKind::Consensus};
  return tasks;
}

// Global tasks need network-wide information flow; local tasks do not.
inline bool is_global_task(TaskKind k) {
  return k == TaskKind::LeaderElection || k == TaskKind::Consensus;
}

inline std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Coloring: return "coloring";
    case TaskKind::VertexCover: return "vertex_cover";
    case TaskKind::Matching: return "matching";
    case TaskKind::LeaderElection: return "leader_election";
    case TaskKind::Consensus: return "consensus";
  }
  throw ParameterError("unknown task kind");
}

inline std::string display_name(TaskKind k) {
  switch (k) {
    case TaskKind::Coloring: return "Coloring";
    case TaskKind::VertexCover: return "VertexCover";
    case TaskKind::Matching: return "Matching";
    case TaskKind::LeaderElection: return "LeaderElection";
    case TaskKind::Consensus: return "Consensus";
  }
  throw ParameterError("unknown task kind");
}

inline TaskKind task_from_string(std::string_view s) {
  for (TaskKind k : all_tasks()) {
    if (s == to_string(k) || s == display_name(k)) return k;
  }
  throw ParameterError("unknown task: " + std::string(s));
}

// Typed per-agent verdict. Partner answers use an empty partner string for
// an explicit "None".
struct FinalAnswer {
  enum class Kind { Group, YesNo, Partner, Bit, Invalid };

  Kind kind = Kind::Invalid;
  int group = 0;            // 1 .. Delta+1
  bool yes = false;
  std::string partner;      // empty means None
  int bit = 0;

  bool valid() const { return kind != Kind::Invalid; }
  bool partner_none() const { return kind == Kind::Partner && partner.empty(); }

  static FinalAnswer invalid() { return {}; }
  static FinalAnswer group_choice(int g) {
    FinalAnswer a;
    a.kind = Kind::Group;
    a.group = g;
    return a;
  }
  static FinalAnswer yes_no(bool y) {
    FinalAnswer a;
    a.kind = Kind::YesNo;
    a.yes = y;
    return a;
  }
  static FinalAnswer partner_choice(std::string name) {
    FinalAnswer a;
    a.kind = Kind::Partner;
    a.partner = std::move(name);
    return a;
  }
  static FinalAnswer none_partner() { return partner_choice(""); }
  static FinalAnswer bit_value(int b) {
    FinalAnswer a;
    a.kind = Kind::Bit;
    a.bit = b;
    return a;
  }

  bool operator==(const FinalAnswer&) const = default;
};

// Trim whitespace, fold case, strip surrounding quotes and trailing
// punctuation; models answer in varied surface forms.
inline std::string normalize_answer_text(std::string_view raw) {
  auto is_junk = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' || c == '.' ||
           c == '!' || c == '*' || c == '`';
  };
  std::size_t begin = 0, end = raw.size();
  while (begin < end && is_junk(raw[begin])) ++begin;
  while (end > begin && is_junk(raw[end - 1])) --end;
  std::string out(raw.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct AnswerContext {
  int delta_plus_one = 2;                 // Coloring group bound
  std::vector<std::string> agent_names;   // Matching partner candidates
};

// Parses normalized final-answer text against the task grammar. Returns the
// Invalid answer for anything outside the grammar.
inline FinalAnswer parse_final_answer(TaskKind kind, std::string_view raw, const AnswerContext& ctx) {
  const std::string text = normalize_answer_text(raw);
  if (text.empty()) return FinalAnswer::invalid();
  switch (kind) {
    case TaskKind::Coloring: {
      std::string digits = text;
      if (digits.rfind("group", 0) == 0) {
        digits = normalize_answer_text(digits.substr(5));
      }
      if (digits.empty() ||
          !std::all_of(digits.begin(), digits.end(),
                       [](unsigned char c) { return std::isdigit(c); })) {
        return FinalAnswer::invalid();
      }
      if (digits.size() > 6) return FinalAnswer::invalid();
      int g = std::stoi(digits);
      if (g < 1 || g > ctx.delta_plus_one) return FinalAnswer::invalid();
      return FinalAnswer::group_choice(g);
    }
    case TaskKind::VertexCover:
    case TaskKind::LeaderElection: {
      if (text == "yes") return FinalAnswer::yes_no(true);
      if (text == "no") return FinalAnswer::yes_no(false);
      return FinalAnswer::invalid();
    }
    case TaskKind::Matching: {
      if (text == "none") return FinalAnswer::none_partner();
      for (const auto& name : ctx.agent_names) {
        if (normalize_answer_text(name) == text) return FinalAnswer::partner_choice(name);
      }
      return FinalAnswer::invalid();
    }
    case TaskKind::Consensus: {
      if (text == "0") return FinalAnswer::bit_value(0);
      if (text == "1") return FinalAnswer::bit_value(1);
      return FinalAnswer::invalid();
    }
  }
  return FinalAnswer::invalid();
}

struct TaskPrompts {
  std::string task1;  // opening task description
  std::string task2;  // final-answer requirements
};

// Task description fragments rendered into the system prompt. The Coloring
// fragment carries the group bound, which depends on the run topology.
inline TaskPrompts task_prompts(TaskKind kind, int delta_plus_one = 2) {
  switch (kind) {
    case TaskKind::Coloring: {
      if (delta_plus_one < 2) throw ParameterError("coloring needs at least 2 groups");
      const std::string k = std::to_string(delta_plus_one);
      return {
          "Your task is to partition yourselves into groups such that agents who are "
          "neighbors are never in the same group.",
          "You will be requested to state which group you assign yourself to. There are "
          "exactly " + k + " groups available: Group 1,...,Group " + k + ". You should "
          "assign yourself to exactly one of these groups. The final result should be such "
          "that any two agents who are neighbors are in different groups. In particular, "
          "you should assign yourself to a group that is different from all of your "
          "neighbors' groups."};
    }
    case TaskKind::VertexCover:
      return {
          "Your task is to select, among all agents, a group of coordinators such that "
          "whenever two agents communicate at least one of them is a coordinator. The "
          "group of coordinators should be selected such that every coordinator has at "
          "least one neighbor who is not a coordinator.",
          "You will be requested to state whether you are a coordinator. The response "
          "should either be 'Yes' or 'No'."};
    case TaskKind::Matching:
      return {
          "Your task is to find build groups of two agents each which can communicate "
          "with each other.",
          "You will be requested to name one of your neighbors that you build a group "
          "with or 'None' if all your neighbors are already assigned to other groups and "
          "cannot be in a group with you. In the end, every agent should only be in at "
          "most one group and agents in the same group have to name each other as the "
          "second group member consistently."};
    case TaskKind::LeaderElection:
      return {
          "Your task is to collaboratively solve the problem of electing a single leader.",
          "You will be requested to state whether or not you are the leader. The response "
          "should either be 'Yes' or 'No'. The final result should be such that exactly "
          "one agent responds with 'Yes' and all others say 'No' as there should be "
          "exactly one leader."};
    case TaskKind::Consensus:
      return {
          "Your goal is to agree on a single value with the other agents. The possible "
          "values that you can decide on are either 0 or 1.",
          "After the last round, each agent must decide on a single value."};
  }
  throw ParameterError("unknown task kind");
}

struct Evaluation {
  double soft_score = 0.0;
  bool solved = false;
  std::vector<std::string> diagnostics;
};

using AnswerMap = std::map<std::string, FinalAnswer>;

namespace detail {

inline FinalAnswer answer_of(const AnswerMap& answers, const std::string& name) {
  auto it = answers.find(name);
  return it != answers.end() ? it->second : FinalAnswer::invalid();
}

// An answer only counts as valid for a task when its variant matches.
inline bool all_of_kind(const Topology& t, const AnswerMap& answers, FinalAnswer::Kind kind) {
  for (int u = 0; u < t.node_count; ++u) {
    if (answer_of(answers, t.label_of(u)).kind != kind) return false;
  }
  return true;
}

}  // namespace detail

// Soft score: fraction of properly colored edges. Solved additionally
// requires every answer to be a valid group within [1, Delta+1].
inline Evaluation evaluate_coloring(const Topology& t, const AnswerMap& answers) {
  Evaluation ev;
  const int delta_plus_one = t.edges.empty() ? 2 : metrics(t).max_degree + 1;
  int proper = 0;
  bool all_in_range = true;
  for (int u = 0; u < t.node_count; ++u) {
    const auto a = detail::answer_of(answers, t.label_of(u));
    if (a.kind == FinalAnswer::Kind::Group && (a.group < 1 || a.group > delta_plus_one)) {
      all_in_range = false;
      ev.diagnostics.push_back("agent " + t.label_of(u) + " chose out-of-range group " +
                               std::to_string(a.group));
    } else if (!a.valid()) {
      all_in_range = false;
      ev.diagnostics.push_back("agent " + t.label_of(u) + " gave no valid group");
    }
  }
  for (const auto& [u, v] : t.edges) {
    const auto au = detail::answer_of(answers, t.label_of(u));
    const auto av = detail::answer_of(answers, t.label_of(v));
    // Invalid answers conflict with every neighbor.
    const bool ok = au.kind == FinalAnswer::Kind::Group && av.kind == FinalAnswer::Kind::Group &&
                    au.group != av.group;
    if (ok) {
      ++proper;
    } else {
      ev.diagnostics.push_back("edge " + t.label_of(u) + "-" + t.label_of(v) +
                               " is not properly colored");
    }
  }
  ev.soft_score = t.edges.empty() ? 1.0 : static_cast<double>(proper) / t.edges.size();
  ev.solved = all_in_range && proper == static_cast<int>(t.edges.size());
  return ev;
}

// Soft score: coverage * (1 - N / #coordinators), where N counts coordinators
// whose neighbors are all coordinators. Invalid answers count as 'No'.
inline Evaluation evaluate_vertex_cover(const Topology& t, const AnswerMap& answers) {
  Evaluation ev;
  auto adj = adjacency_list(t);
  std::vector<bool> coordinator(t.node_count, false);
  int coordinators = 0;
  for (int u = 0; u < t.node_count; ++u) {
    const auto a = detail::answer_of(answers, t.label_of(u));
    coordinator[u] = a.kind == FinalAnswer::Kind::YesNo && a.yes;
    coordinators += coordinator[u];
  }
  int covered = 0;
  for (const auto& [u, v] : t.edges) {
    if (coordinator[u] || coordinator[v]) {
      ++covered;
    } else {
      ev.diagnostics.push_back("edge " + t.label_of(u) + "-" + t.label_of(v) + " is uncovered");
    }
  }
  int non_essential = 0;
  for (int u = 0; u < t.node_count; ++u) {
    if (!coordinator[u]) continue;
    const bool essential = std::any_of(adj[u].begin(), adj[u].end(),
                                       [&](int v) { return !coordinator[v]; });
    if (!essential) {
      ++non_essential;
      ev.diagnostics.push_back("coordinator " + t.label_of(u) + " is non-essential");
    }
  }
  const bool all_valid = detail::all_of_kind(t, answers, FinalAnswer::Kind::YesNo);
  if (coordinators == 0) {
    // The paper's formula divides by #coordinators; the empty set scores 0
    // whenever there is anything to cover and 1 on edgeless graphs.
    ev.soft_score = t.edges.empty() ? 1.0 : 0.0;
    ev.solved = t.edges.empty() && all_valid;
    return ev;
  }
  const double coverage = t.edges.empty() ? 1.0 : static_cast<double>(covered) / t.edges.size();
  ev.soft_score = coverage * (1.0 - static_cast<double>(non_essential) / coordinators);
  ev.solved = covered == static_cast<int>(t.edges.size()) && non_essential == 0 && all_valid;
  return ev;
}

// Soft score: 1 - I/n, where I counts agents with an inconsistency: selected a
// non-reciprocating partner, selected a non-neighbor (or unknown agent), or
// answered None while a neighbor also answered None. Invalid answers count as
// one inconsistency. At most one inconsistency per agent, so the score stays
// in [0, 1].
inline Evaluation evaluate_matching(const Topology& t, const AnswerMap& answers) {
  Evaluation ev;
  auto adj = adjacency_list(t);
  std::map<std::string, int> index_of;
  for (int u = 0; u < t.node_count; ++u) index_of[t.label_of(u)] = u;

  int inconsistencies = 0;
  for (int u = 0; u < t.node_count; ++u) {
    const std::string name = t.label_of(u);
    const auto a = detail::answer_of(answers, name);
    if (a.kind != FinalAnswer::Kind::Partner) {
      ++inconsistencies;
      ev.diagnostics.push_back("agent " + name + " gave no valid partner answer");
      continue;
    }
    if (a.partner_none()) {
      const bool open_neighbor = std::any_of(adj[u].begin(), adj[u].end(), [&](int v) {
        return detail::answer_of(answers, t.label_of(v)).partner_none();
      });
      if (open_neighbor) {
        ++inconsistencies;
        ev.diagnostics.push_back("agent " + name + " answered None next to another None");
      }
      continue;
    }
    auto it = index_of.find(a.partner);
    if (it == index_of.end() || !t.has_edge(u, it->second)) {
      ++inconsistencies;
      ev.diagnostics.push_back("agent " + name + " selected non-neighbor " + a.partner);
      continue;
    }
    const auto back = detail::answer_of(answers, a.partner);
    if (back.kind != FinalAnswer::Kind::Partner || back.partner != name) {
      ++inconsistencies;
      ev.diagnostics.push_back("agent " + name + " selected " + a.partner +
                               " without reciprocation");
    }
  }
  ev.soft_score = 1.0 - static_cast<double>(inconsistencies) / t.node_count;
  ev.solved = inconsistencies == 0;
  return ev;
}

// Solved iff exactly one agent answers Yes; the soft score equals the binary
// indicator. Invalid answers count as 'No' but block solved.
inline Evaluation evaluate_leader_election(const AnswerMap& answers) {
  Evaluation ev;
  int yes_count = 0;
  bool all_valid = true;
  for (const auto& [name, a] : answers) {
    if (a.kind != FinalAnswer::Kind::YesNo) {
      all_valid = false;
      ev.diagnostics.push_back("agent " + name + " gave no valid answer");
    } else if (a.yes) {
      ++yes_count;
    }
  }
  if (yes_count != 1) {
    ev.diagnostics.push_back(std::to_string(yes_count) + " agents claim leadership");
  }
  ev.soft_score = yes_count == 1 ? 1.0 : 0.0;
  ev.solved = yes_count == 1 && all_valid;
  return ev;
}

// Solved iff all agents announce the same bit; invalid answers break
// unanimity. Soft score equals the binary indicator.
inline Evaluation evaluate_consensus(const AnswerMap& answers) {
  Evaluation ev;
  int zeros = 0, ones = 0;
  bool all_valid = true;
  for (const auto& [name, a] : answers) {
    if (a.kind != FinalAnswer::Kind::Bit) {
      all_valid = false;
      ev.diagnostics.push_back("agent " + name + " gave no valid bit");
    } else {
      (a.bit == 0 ? zeros : ones) += 1;
    }
  }
  const bool unanimous = all_valid && (zeros == 0 || ones == 0);
  if (!unanimous) {
    ev.diagnostics.push_back("no unanimity: " + std::to_string(zeros) + " zeros, " +
                             std::to_string(ones) + " ones");
  }
  ev.soft_score = unanimous ? 1.0 : 0.0;
  ev.solved = unanimous;
  return ev;
}

inline Evaluation evaluate(TaskKind kind, const Topology& t, const AnswerMap& answers) {
  switch (kind) {
    case TaskKind::Coloring: return evaluate_coloring(t, answers);
    case TaskKind::VertexCover: return evaluate_vertex_cover(t, answers);
    case TaskKind::Matching: return evaluate_matching(t, answers);
    case TaskKind::LeaderElection:
    case TaskKind::Consensus: {
      // These evaluators see only the answer map; agents missing from it
      // must still count as invalid.
      AnswerMap full;
      for (int u = 0; u < t.node_count; ++u) {
        const std::string name = t.label_of(u);
        full[name] = detail::answer_of(answers, name);
      }
      return kind == TaskKind::LeaderElection ? evaluate_leader_election(full)
                                              : evaluate_consensus(full);
    }
  }
  throw ParameterError("unknown task kind");
}

}  // namespace agentmesh
