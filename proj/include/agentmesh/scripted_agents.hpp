#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentmesh/chat.hpp"
#include "agentmesh/protocol.hpp"
#include "agentmesh/rng.hpp"
#include "agentmesh/tasks.hpp"

namespace agentmesh {

// Facts an agent can read off its own system prompt. Scripted backends have
// no other channel to learn who they are; everything they know comes from
// the history the engine hands them.
struct PromptFacts {
  std::string name;
  std::vector<std::string> neighbors;
  int agent_count = 0;
  int rounds = 0;
  int groups = 0;  // Coloring group bound, 0 for other tasks
};

namespace scripted_detail {

inline std::string slice_between(std::string_view text, std::string_view after,
                                 std::string_view until) {
  const auto start = text.find(after);
  if (start == std::string_view::npos) return {};
  const auto begin = start + after.size();
  const auto end = text.find(until, begin);
  if (end == std::string_view::npos) return {};
  return std::string(text.substr(begin, end - begin));
}

inline std::vector<std::string> split(std::string_view text, std::string_view sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.emplace_back(text.substr(pos));
      break;
    }
    parts.emplace_back(text.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return parts;
}

// Value of a "key=value" token inside a dialect message, or empty.
inline std::string token_value(std::string_view msg, std::string_view key) {
  const std::string needle = std::string(key) + "=";
  std::size_t pos = 0;
  while ((pos = msg.find(needle, pos)) != std::string_view::npos) {
    if (pos == 0 || msg[pos - 1] == ' ') {
      const auto begin = pos + needle.size();
      const auto end = msg.find(' ', begin);
      return std::string(msg.substr(begin, end == std::string_view::npos ? end : end - begin));
    }
    ++pos;
  }
  return {};
}

inline bool has_flag(std::string_view msg, std::string_view flag) {
  const std::string needle = " " + std::string(flag);
  return msg.size() >= needle.size() &&
         (msg.find(needle + " ") != std::string_view::npos ||
          msg.rfind(needle) == msg.size() - needle.size());
}

}  // namespace scripted_detail

inline PromptFacts parse_prompt_facts(const std::string& system_prompt) {
  using scripted_detail::slice_between;
  PromptFacts facts;
  facts.name = slice_between(system_prompt, "Your name is ", ".");
  const std::string neighbors = slice_between(system_prompt, "immediate neighbors (", ")");
  if (!neighbors.empty()) {
    for (auto& part : scripted_detail::split(neighbors, ", ")) {
      facts.neighbors.push_back(part);
    }
  }
  try {
    facts.agent_count = std::stoi(slice_between(system_prompt, "There are ", " agents in total"));
    facts.rounds = std::stoi(slice_between(system_prompt, "This process repeats for ", " rounds"));
  } catch (const std::exception&) {
    throw ParameterError("system prompt missing agent or round counts");
  }
  const std::string groups = slice_between(system_prompt, "There are exactly ", " groups available");
  if (!groups.empty()) facts.groups = std::stoi(groups);
  if (facts.name.empty()) throw ParameterError("system prompt missing agent name");
  return facts;
}

namespace scripted_detail {

using Incoming = std::vector<std::pair<std::string, std::string>>;

struct ReplayInput {
  PromptFacts facts;
  std::vector<Incoming> incoming;  // incoming[r] for rounds 0..r; incoming[0] is empty
  bool final_requested = false;
};

// Rebuilds the replay view of a chat history: the system facts, the incoming
// messages per round, and whether the current request is the final one.
// Retry turns are ignored; replaying the automaton regenerates the same
// output they asked to repeat.
inline ReplayInput parse_replay_input(const ChatHistory& history) {
  if (history.empty() || history.front().role != ChatRole::System) {
    throw ParameterError("scripted backend needs a system prompt first");
  }
  ReplayInput input;
  input.facts = parse_prompt_facts(history.front().content);
  input.incoming.push_back({});  // round 0 starts from the system prompt alone
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].role != ChatRole::User) continue;
    const std::string& turn = history[i].content;
    if (is_round_request(turn)) {
      input.incoming.push_back(parse_incoming_turn(turn));
    } else if (is_final_request(turn)) {
      input.final_requested = true;
    }
  }
  return input;
}

inline std::string render_envelope(const std::map<std::string, std::string>& messages) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [to, text] : messages) obj[to] = text;
  return obj.dump();
}

inline std::string render_final(const std::string& answer) {
  return std::string(kFinalAnswerMarker) + " " + answer;
}

inline std::map<std::string, std::string> broadcast(const std::vector<std::string>& neighbors,
                                                    const std::string& text) {
  std::map<std::string, std::string> env;
  for (const auto& n : neighbors) env[n] = text;
  return env;
}

}  // namespace scripted_detail

// Leader election by max-priority flooding. Every agent floods the largest
// (priority, name) pair it has seen; after T rounds the unique maximum is
// known to everyone within the 2D+1 budget, and only its owner answers Yes.
class ScriptedLeaderAgent final : public AgentBackend {
 public:
  explicit ScriptedLeaderAgent(std::uint64_t seed) : seed_(seed) {}

  std::string generate(const ChatHistory& history) override {
    using namespace scripted_detail;
    const ReplayInput in = parse_replay_input(history);
    std::uint64_t best_p = derive_seed(seed_, hash64(in.facts.name), hash64("lead"));
    std::string best_n = in.facts.name;
    const std::uint64_t own_p = best_p;
    std::map<std::string, std::string> env;
    for (const auto& round : in.incoming) {
      for (const auto& [sender, msg] : round) {
        const std::string p = token_value(msg, "p");
        const std::string n = token_value(msg, "n");
        if (p.empty() || n.empty()) continue;
        const std::uint64_t pv = std::stoull(p);
        if (std::tie(pv, n) > std::tie(best_p, best_n)) {
          best_p = pv;
          best_n = n;
        }
      }
      env = broadcast(in.facts.neighbors,
                      "LD p=" + std::to_string(best_p) + " n=" + best_n);
    }
    if (in.final_requested) {
      return render_final(best_p == own_p && best_n == in.facts.name ? "Yes" : "No");
    }
    return render_envelope(env);
  }

 private:
  std::uint64_t seed_;
};

// Consensus by OR-flooding: each agent draws a seeded initial bit and floods
// the maximum bit seen. All agents converge on 1 iff anyone started with 1.
class ScriptedConsensusAgent final : public AgentBackend {
 public:
  explicit ScriptedConsensusAgent(std::uint64_t seed) : seed_(seed) {}

  std::string generate(const ChatHistory& history) override {
    using namespace scripted_detail;
    const ReplayInput in = parse_replay_input(history);
    int bit = static_cast<int>(derive_seed(seed_, hash64(in.facts.name), hash64("bit")) & 1);
    std::map<std::string, std::string> env;
    for (const auto& round : in.incoming) {
      for (const auto& [sender, msg] : round) {
        const std::string b = token_value(msg, "b");
        if (b == "1") bit = 1;
      }
      env = broadcast(in.facts.neighbors, "CS b=" + std::to_string(bit));
    }
    if (in.final_requested) return render_final(std::to_string(bit));
    return render_envelope(env);
  }

 private:
  std::uint64_t seed_;
};

// Greedy coloring by random priorities. Agents broadcast a table of known
// (agent, priority, group) triples; an agent fixes the smallest group unused
// by its higher-priority neighbors once all of them have fixed. If the
// budget runs out first, the final answer falls back to the smallest group
// not used by any neighbor's last known choice.
class ScriptedColoringAgent final : public AgentBackend {
 public:
  explicit ScriptedColoringAgent(std::uint64_t seed) : seed_(seed) {}

  std::string generate(const ChatHistory& history) override {
    using namespace scripted_detail;
    const ReplayInput in = parse_replay_input(history);
    const std::string& me = in.facts.name;
    const int groups = std::max(in.facts.groups, 2);

    // name -> (priority, group); group 0 means not fixed yet
    std::map<std::string, std::pair<std::uint64_t, int>> table;
    table[me] = {derive_seed(seed_, hash64(me), hash64("col")), 0};

    std::map<std::string, std::string> env;
    for (const auto& round : in.incoming) {
      for (const auto& [sender, msg] : round) {
        if (msg.rfind("CL ", 0) != 0) continue;
        for (const auto& entry : split(msg.substr(3), ",")) {
          const auto parts = split(entry, ":");
          if (parts.size() != 3) continue;
          const std::string& who = parts[0];
          const std::uint64_t prio = std::stoull(parts[1]);
          const int group = std::stoi(parts[2]);
          auto [it, inserted] = table.try_emplace(who, prio, group);
          if (!inserted) it->second.second = std::max(it->second.second, group);
        }
      }
      // Fix a group once every higher-priority neighbor has fixed one.
      if (table[me].second == 0) {
        bool all_known = true, all_higher_fixed = true;
        std::set<int> used;
        for (const auto& n : in.facts.neighbors) {
          auto it = table.find(n);
          if (it == table.end()) {
            all_known = false;
            break;
          }
          if (std::tie(it->second.first, n) > std::tie(table[me].first, me)) {
            if (it->second.second == 0) {
              all_higher_fixed = false;
            } else {
              used.insert(it->second.second);
            }
          }
        }
        if (all_known && all_higher_fixed) {
          int g = 1;
          while (used.count(g)) ++g;
          table[me].second = g;
        }
      }
      std::string payload = "CL ";
      bool first = true;
      for (const auto& [who, entry] : table) {
        if (!first) payload += ",";
        payload += who + ":" + std::to_string(entry.first) + ":" + std::to_string(entry.second);
        first = false;
      }
      env = broadcast(in.facts.neighbors, payload);
    }
    if (in.final_requested) {
      int g = table[me].second;
      if (g == 0) {
        std::set<int> used;
        for (const auto& n : in.facts.neighbors) {
          auto it = table.find(n);
          if (it != table.end() && it->second.second > 0) used.insert(it->second.second);
        }
        g = 1;
        while (used.count(g) && g < groups) ++g;
      }
      return render_final("Group " + std::to_string(g));
    }
    return render_envelope(env);
  }

 private:
  std::uint64_t seed_;
};

// Vertex cover as the complement of a Luby-style maximal independent set.
// Undecided agents broadcast a fresh seeded value every round; an agent joins
// the MIS when its previous-round value beats every undecided neighbor's
// (ties by name, so adjacent agents never join together), and neighbors of a
// new member drop out as soon as they see the join. The final answer is Yes
// (coordinator) exactly for agents outside the MIS.
class ScriptedVertexCoverAgent final : public AgentBackend {
 public:
  explicit ScriptedVertexCoverAgent(std::uint64_t seed) : seed_(seed) {}

  std::string generate(const ChatHistory& history) override {
    using namespace scripted_detail;
    const ReplayInput in = parse_replay_input(history);
    const std::string& me = in.facts.name;

    char status = 'u';
    std::map<std::string, char> last_status;
    std::map<std::string, std::map<int, std::uint64_t>> values;
    auto own_value = [&](int phase) {
      return derive_seed(seed_, hash64(me), hash64("mis"), static_cast<std::uint64_t>(phase));
    };
    // The join comparison for wave r uses the values broadcast in round r-1;
    // both endpoints of an undecided edge see the same pair, so the outcome
    // is symmetric.
    auto wins_wave = [&](int phase) {
      const std::uint64_t mine = own_value(phase);
      for (const auto& n : in.facts.neighbors) {
        if (last_status.count(n) == 0 || last_status[n] != 'u') continue;
        auto it = values[n].find(phase);
        if (it == values[n].end() || std::tie(it->second, n) > std::tie(mine, me)) {
          return false;
        }
      }
      return true;
    };

    std::map<std::string, std::string> env;
    for (std::size_t r = 0; r < in.incoming.size(); ++r) {
      for (const auto& [sender, msg] : in.incoming[r]) {
        const std::string st = token_value(msg, "st");
        if (st.empty()) continue;
        last_status[sender] = st[0];
        if (st == "u") {
          const std::string ph = token_value(msg, "ph");
          const std::string v = token_value(msg, "v");
          if (!ph.empty() && !v.empty()) {
            values[sender][std::stoi(ph)] = std::stoull(v);
          }
        }
      }
      if (status == 'u' && r >= 1) {
        const bool neighbor_joined = std::any_of(
            in.facts.neighbors.begin(), in.facts.neighbors.end(),
            [&](const std::string& n) { return last_status.count(n) && last_status[n] == 'i'; });
        if (neighbor_joined) {
          status = 'o';
        } else if (wins_wave(static_cast<int>(r) - 1)) {
          status = 'i';
        }
      }
      std::string payload;
      if (status == 'u') {
        payload = "VC st=u ph=" + std::to_string(r) + " v=" + std::to_string(own_value(r));
      } else {
        payload = std::string("VC st=") + status;
      }
      env = broadcast(in.facts.neighbors, payload);
    }
    if (in.final_requested) {
      if (status == 'u') {
        // Budget exhausted: replay one more wave with the last values that
        // were actually delivered (round T-2). Undecided pairs resolve
        // consistently because both sides evaluate the same comparison.
        status = wins_wave(std::max(0, in.facts.rounds - 2)) ? 'i' : 'o';
      }
      return render_final(status == 'i' ? "No" : "Yes");
    }
    return render_envelope(env);
  }

 private:
  std::uint64_t seed_;
};

// Matching by reciprocal proposals over seeded random edge weights. Every
// round, each unmatched agent proposes to the open neighbor across its
// lightest edge; weights are a symmetric per-round hash, so both endpoints
// of a locally minimal edge pick each other in the same round and lock on
// the same evidence. Locks are mutual by construction and no handshake state
// exists; fresh weights every round keep heavy chains from stalling.
class ScriptedMatchingAgent final : public AgentBackend {
 public:
  explicit ScriptedMatchingAgent(std::uint64_t seed) : seed_(seed) {}

  std::string generate(const ChatHistory& history) override {
    using namespace scripted_detail;
    const ReplayInput in = parse_replay_input(history);
    const std::string& me = in.facts.name;

    char status = 'u';
    std::string partner;
    std::string last_target;
    std::map<std::string, std::pair<char, std::string>> known;  // name -> (status, partner)

    std::map<std::string, std::string> env;
    for (std::size_t r = 0; r < in.incoming.size(); ++r) {
      std::set<std::string> props;
      for (const auto& [sender, msg] : in.incoming[r]) {
        const std::string st = token_value(msg, "st");
        if (st.empty()) continue;
        std::string p = token_value(msg, "p");
        if (p == "-") p.clear();
        known[sender] = {st[0], p};
        if (has_flag(msg, "prop")) props.insert(sender);
      }
      if (status == 'u' && !last_target.empty() && props.count(last_target)) {
        status = 'l';  // reciprocal proposals; the partner locks on the same evidence
        partner = last_target;
      }
      if (status == 'u') {
        for (const auto& [n, sp] : known) {
          if (sp.first == 'l' && sp.second == me) {
            status = 'l';  // defensive healing; locks are normally symmetric
            partner = n;
            break;
          }
        }
      }
      std::string prop_to;
      if (status == 'u') {
        last_target.clear();
        std::uint64_t best = 0;
        for (const auto& n : in.facts.neighbors) {
          auto it = known.find(n);
          if (it != known.end() && it->second.first != 'u') continue;
          const auto& [low, high] = std::minmax(me, n);
          const std::uint64_t w = derive_seed(seed_, hash64(low), hash64(high), hash64("mtw"),
                                              static_cast<std::uint64_t>(r));
          if (last_target.empty() || w < best) {
            best = w;
            last_target = n;
          }
        }
        prop_to = last_target;
      }
      const std::string base = std::string("MT st=") + status +
                               " p=" + (partner.empty() ? "-" : partner);
      env.clear();
      for (const auto& n : in.facts.neighbors) {
        env[n] = n == prop_to ? base + " prop" : base;
      }
    }
    if (in.final_requested) {
      return render_final(status == 'l' ? partner : "None");
    }
    return render_envelope(env);
  }

 private:
  std::uint64_t seed_;
};

// Baseline that sends no messages and answers uniformly over the task's
// valid options.
class RandomBaselineAgent final : public AgentBackend {
 public:
  RandomBaselineAgent(TaskKind task, std::uint64_t seed) : task_(task), seed_(seed) {}

  std::string generate(const ChatHistory& history) override {
    using namespace scripted_detail;
    const ReplayInput in = parse_replay_input(history);
    if (!in.final_requested) return "{}";
    Rng rng(derive_seed(seed_, hash64(in.facts.name), hash64("final")));
    switch (task_) {
      case TaskKind::Coloring: {
        const int groups = std::max(in.facts.groups, 2);
        return render_final("Group " + std::to_string(1 + rng.below_int(groups)));
      }
      case TaskKind::VertexCover:
      case TaskKind::LeaderElection:
        return render_final(rng.below(2) == 0 ? "Yes" : "No");
      case TaskKind::Matching: {
        const auto pick = rng.below(in.facts.neighbors.size() + 1);
        if (pick == in.facts.neighbors.size()) return render_final("None");
        return render_final(in.facts.neighbors[pick]);
      }
      case TaskKind::Consensus:
        return render_final(std::to_string(rng.below(2)));
    }
    throw ParameterError("unknown task kind");
  }

 private:
  TaskKind task_;
  std::uint64_t seed_;
};

inline std::unique_ptr<AgentBackend> make_scripted_agent(TaskKind task, std::uint64_t seed) {
  switch (task) {
    case TaskKind::Coloring: return std::make_unique<ScriptedColoringAgent>(seed);
    case TaskKind::VertexCover: return std::make_unique<ScriptedVertexCoverAgent>(seed);
    case TaskKind::Matching: return std::make_unique<ScriptedMatchingAgent>(seed);
    case TaskKind::LeaderElection: return std::make_unique<ScriptedLeaderAgent>(seed);
    case TaskKind::Consensus: return std::make_unique<ScriptedConsensusAgent>(seed);
  }
  throw ParameterError("unknown task kind");
}

inline std::unique_ptr<AgentBackend> make_random_agent(TaskKind task, std::uint64_t seed) {
  return std::make_unique<RandomBaselineAgent>(task, seed);
}

}  // namespace agentmesh
