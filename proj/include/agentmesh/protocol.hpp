#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentmesh/chat.hpp"
#include "agentmesh/envelope.hpp"
#include "agentmesh/graph.hpp"
#include "agentmesh/rng.hpp"
#include "agentmesh/tasks.hpp"

namespace agentmesh {

struct AgentIdentity {
  int node_index = 0;
  std::string name;
  std::vector<std::string> neighbor_names;  // sorted lexicographically
};

// Deterministic seeded sampling without replacement from the name pool.
// Node i receives the i-th name of the shuffled pool.
inline std::vector<AgentIdentity> assign_names(const Topology& t,
                                               const std::vector<std::string>& pool,
                                               std::uint64_t seed) {
  if (static_cast<int>(pool.size()) < t.node_count) {
    throw ParameterError("name pool smaller than node count");
  }
  if (std::set<std::string>(pool.begin(), pool.end()).size() != pool.size()) {
    throw ParameterError("name pool contains duplicates");
  }
  std::vector<std::string> shuffled = pool;
  Rng rng(derive_seed(seed, hash64("names")));
  rng.shuffle(shuffled);

  auto adj = adjacency_list(t);
  std::vector<AgentIdentity> identities(t.node_count);
  for (int i = 0; i < t.node_count; ++i) {
    identities[i].node_index = i;
    identities[i].name = shuffled[i];
  }
  for (int i = 0; i < t.node_count; ++i) {
    for (int j : adj[i]) identities[i].neighbor_names.push_back(identities[j].name);
    std::sort(identities[i].neighbor_names.begin(), identities[i].neighbor_names.end());
  }
  return identities;
}

inline void apply_labels(Topology& t, const std::vector<AgentIdentity>& identities) {
  t.labels.clear();
  for (const auto& id : identities) t.labels[id.node_index] = id.name;
}

enum class RoundMode { Benchmark, Scaling };

inline std::string to_string(RoundMode m) {
  return m == RoundMode::Benchmark ? "benchmark" : "scaling";
}

inline RoundMode round_mode_from_string(std::string_view s) {
  if (s == "benchmark") return RoundMode::Benchmark;
  if (s == "scaling") return RoundMode::Scaling;
  throw ParameterError("unknown round mode: " + std::string(s));
}

// Round budget T. Benchmark mode: global tasks get 2D+1 rounds; local tasks
// get a size-based budget (4 nodes -> 4 rounds, 8 -> 5, 16 -> 6). Scaling
// mode uses 2D+1 for every task. Local tasks at other sizes fall back to the
// scaling rule, with a note to the logger.
inline int compute_round_budget(TaskKind task, const Topology& t, RoundMode mode,
                                const std::function<void(const std::string&)>& log = {}) {
  const int two_d_plus_one = 2 * metrics(t).diameter + 1;
  if (mode == RoundMode::Scaling || is_global_task(task)) return two_d_plus_one;
  switch (t.node_count) {
    case 4: return 4;
    case 8: return 5;
    case 16: return 6;
    default:
      if (log) {
        log("local task on " + std::to_string(t.node_count) +
            " nodes has no benchmark budget; using 2D+1");
      }
      return two_d_plus_one;
  }
}

struct TaskSpec {
  TaskKind kind = TaskKind::Consensus;
  int delta_plus_one = 2;
};

inline TaskSpec make_task_spec(TaskKind kind, const Topology& t) {
  return {kind, metrics(t).max_degree + 1};
}

inline std::string join_quoted(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += "'" + items[i] + "'";
    if (i + 1 < items.size()) out += ", ";
  }
  return out;
}

// Renders the full system prompt for one agent: rules of message-passing,
// the agent's own name and neighbors, the round budget, and the task
// description split across the opening and the closing rule.
inline std::string build_system_prompt(const TaskSpec& spec, const AgentIdentity& agent, int n,
                                       int rounds) {
  const TaskPrompts prompts = task_prompts(spec.kind, spec.delta_plus_one);
  std::string neighbors;
  for (std::size_t i = 0; i < agent.neighbor_names.size(); ++i) {
    neighbors += agent.neighbor_names[i];
    if (i + 1 < agent.neighbor_names.size()) neighbors += ", ";
  }
  std::ostringstream out;
  out << "You are an agent that is connected with other agents (your neighbors), who you "
         "communicate with. Your neighbors can in turn communicate with their neighbors and "
         "so forth. "
      << prompts.task1 << " The rules are as follows:\n"
      << "1. There are " << n << " agents in total. Everybody has a unique name. Your name is "
      << agent.name << ".\n"
      << "2. You can only communicate with your immediate neighbors (" << neighbors
      << "). You cannot see or directly communicate with anyone else, unless information is "
         "relayed by intermediate agents.\n"
      << "3. You can exchange text-based messages with your neighbors in rounds. In each "
         "round, you will first receive the last messages sent by your neighbors and then be "
         "asked to generate your response messages which your neighbors receive in the next "
         "round. This process repeats for "
      << rounds
      << " rounds of message passing. Importantly, the process is synchronous: Every agent "
         "decides on which messages to send at the same time and sees the messages from "
         "other agents only in the next round.\n"
      << "4. Everybody (including you) decides what to share or request from neighbors. In "
         "every round, think step-by-step about the next set of messages you want to send. "
         "Output a JSON string that contains your response messages.\n"
      << "5. The messages you send to your neighbors are formatted as JSON. For example, if "
         "your neighbors are Alan and Bob, your output should look as follows: ``` {\"Alan\": "
         "\"Message that will be sent to Alan.\", \"Bob\": \"Message that will be sent to "
         "Bob.\"} ``` It is not mandatory to send a message to every neighbor in every "
         "round. If you do not want to send a message to a particular neighbor, you may omit "
         "their name from the JSON.\n"
      << "6. After " << rounds << " message passes, you have to solve the following task: "
      << prompts.task2;
  return out.str();
}

inline constexpr std::string_view kIncomingHeader = "These are the messages from your neighbors:";
inline constexpr std::string_view kNoIncomingNote =
    "You did not receive any messages from your neighbors in this round.";
inline constexpr std::string_view kRoundInstruction =
    "Elaborate your chain of thought step-by-step first, then output the messages for your "
    "neighbors. Output your messages in JSON format as specified earlier.";
inline constexpr std::string_view kRetryInstruction =
    "Your last output was not valid JSON. Please try again. Output a flat JSON object whose "
    "keys are neighbor names and whose values are message strings, as specified earlier.";
inline constexpr std::string_view kFinalAnswerMarker = "### Final Answer ###";

// Builds the per-round request turn. Incoming messages are presented sorted
// by sender name, one per line.
inline std::string build_round_request(
    const std::vector<std::pair<std::string, std::string>>& incoming_sorted) {
  std::ostringstream out;
  if (incoming_sorted.empty()) {
    out << kNoIncomingNote << '\n';
  } else {
    out << kIncomingHeader << '\n';
    for (const auto& [sender, text] : incoming_sorted) {
      out << "Message from " << sender << ": " << text << '\n';
    }
  }
  out << kRoundInstruction;
  return out.str();
}

// Recovers (sender, text) pairs from a round request built above. Used by
// scripted backends, which see exactly what a model would see.
inline std::vector<std::pair<std::string, std::string>> parse_incoming_turn(
    std::string_view turn) {
  std::vector<std::pair<std::string, std::string>> incoming;
  std::istringstream in{std::string(turn)};
  std::string line;
  std::string sender, text;
  bool open = false;
  auto flush = [&] {
    if (open) incoming.emplace_back(sender, text);
    open = false;
  };
  while (std::getline(in, line)) {
    if (line.rfind("Message from ", 0) == 0) {
      flush();
      const auto colon = line.find(": ", 13);
      if (colon == std::string::npos) continue;
      sender = line.substr(13, colon - 13);
      text = line.substr(colon + 2);
      open = true;
    } else if (line.rfind(std::string(kRoundInstruction).substr(0, 24), 0) == 0) {
      break;
    } else if (open) {
      text += "\n" + line;
    }
  }
  flush();
  return incoming;
}

inline bool is_round_request(std::string_view turn) {
  return turn.rfind(kIncomingHeader, 0) == 0 || turn.rfind(kNoIncomingNote, 0) == 0;
}

inline bool is_retry_request(std::string_view turn) {
  return turn.rfind(kRetryInstruction, 0) == 0;
}

// The task-specific final-response request, including the valid options the
// agent may answer with.
inline std::string build_final_request(const TaskSpec& spec, const AgentIdentity& agent) {
  std::string question;
  std::vector<std::string> options;
  switch (spec.kind) {
    case TaskKind::Coloring:
      question = "Which group do you assign yourself to?";
      for (int g = 1; g <= spec.delta_plus_one; ++g) options.push_back("Group " + std::to_string(g));
      break;
    case TaskKind::VertexCover:
      question = "Are you a coordinator?";
      options = {"Yes", "No"};
      break;
    case TaskKind::Matching:
      question = "Which neighbor do you build a group with?";
      options = agent.neighbor_names;
      options.push_back("None");
      break;
    case TaskKind::LeaderElection:
      question = "Are you the leader?";
      options = {"Yes", "No"};
      break;
    case TaskKind::Consensus:
      question = "Which value do you decide on?";
      options = {"0", "1"};
      break;
  }
  return question + " Format your answer as follows: '" + std::string(kFinalAnswerMarker) +
         "', followed by your final answer. Don't use any text for your final answer except "
         "one of these valid options: " +
         join_quoted(options) + ".";
}

inline std::string build_final_retry_request(const TaskSpec& spec, const AgentIdentity& agent) {
  return "Your answer was not valid. Please try again. " + build_final_request(spec, agent);
}

inline bool is_final_request(std::string_view turn) {
  return turn.find(kFinalAnswerMarker) != std::string_view::npos &&
         turn.find("valid options") != std::string_view::npos;
}

// Text after the last final-answer marker, or nullopt when the marker is
// missing entirely.
inline std::optional<std::string> extract_final_answer_text(std::string_view raw) {
  const auto pos = raw.rfind(kFinalAnswerMarker);
  if (pos == std::string_view::npos) return std::nullopt;
  return std::string(raw.substr(pos + kFinalAnswerMarker.size()));
}

enum class EventKind { System, Outgoing, Incoming, Retry, Final };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::System: return "system";
    case EventKind::Outgoing: return "outgoing";
    case EventKind::Incoming: return "incoming";
    case EventKind::Retry: return "retry";
    case EventKind::Final: return "final";
  }
  throw ParameterError("unknown event kind");
}

inline EventKind event_kind_from_string(std::string_view s) {
  if (s == "system") return EventKind::System;
  if (s == "outgoing") return EventKind::Outgoing;
  if (s == "incoming") return EventKind::Incoming;
  if (s == "retry") return EventKind::Retry;
  if (s == "final") return EventKind::Final;
  throw ParameterError("unknown event kind: " + std::string(s));
}

struct TranscriptEvent {
  int round = 0;
  EventKind kind = EventKind::System;
  std::string agent;
  std::string counterpart;  // sender for incoming events, empty otherwise
  std::string content;
  std::int64_t ts = 0;  // logical sequence number, or epoch ms in wall-clock mode

  bool operator==(const TranscriptEvent&) const = default;
};

struct RunTranscript {
  std::string run_id;
  TaskKind task = TaskKind::Consensus;
  std::string topology_ref;
  int round_count = 0;
  std::vector<TranscriptEvent> events;

  std::vector<const TranscriptEvent*> events_of(const std::string& agent,
                                                std::optional<EventKind> kind = {}) const {
    std::vector<const TranscriptEvent*> out;
    for (const auto& e : events) {
      if (e.agent == agent && (!kind || e.kind == *kind)) out.push_back(&e);
    }
    return out;
  }
};

// Line-delimited transcript records; every line repeats the run header
// fields so each event is self-contained. Serialization round-trips
// losslessly.
inline std::string serialize_transcript(const RunTranscript& t) {
  std::ostringstream out;
  for (const auto& e : t.events) {
    nlohmann::json line{{"run_id", t.run_id},
                        {"task", to_string(t.task)},
                        {"topology_ref", t.topology_ref},
                        {"round", e.round},
                        {"event_kind", to_string(e.kind)},
                        {"agent", e.agent},
                        {"content", e.content},
                        {"timestamp", e.ts}};
    if (!e.counterpart.empty()) line["counterpart"] = e.counterpart;
    out << line.dump() << '\n';
  }
  return out.str();
}

inline RunTranscript parse_transcript(std::string_view text) {
  RunTranscript t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (first) {
      t.run_id = j.at("run_id").get<std::string>();
      t.task = task_from_string(j.at("task").get<std::string>());
      t.topology_ref = j.at("topology_ref").get<std::string>();
      first = false;
    }
    TranscriptEvent e;
    e.round = j.at("round").get<int>();
    e.kind = event_kind_from_string(j.at("event_kind").get<std::string>());
    e.agent = j.at("agent").get<std::string>();
    e.content = j.at("content").get<std::string>();
    e.ts = j.at("timestamp").get<std::int64_t>();
    if (j.contains("counterpart")) e.counterpart = j.at("counterpart").get<std::string>();
    if (e.kind == EventKind::Outgoing) t.round_count = std::max(t.round_count, e.round + 1);
    t.events.push_back(std::move(e));
  }
  return t;
}

struct EngineOptions {
  std::string run_id = "run";
  std::string topology_ref;
  int retry_limit = 2;        // message-generation retries per round
  int final_retry_limit = 1;  // final-answer retries
  bool wall_clock = false;    // logical timestamps keep scripted runs byte-identical
  std::function<void(const std::string&)> warn;
};

// Synchronous round-based execution. Round 0 generates from the system
// prompt alone; rounds 1..T-1 deliver the previous round's messages and
// generate the next envelope. All generations within a round depend only on
// state through the previous round. Agents are processed in name order, so
// scripted runs are reproducible event for event.
class MessagePassingEngine {
 public:
  MessagePassingEngine(const Topology& topo, std::vector<AgentIdentity> identities,
                       std::map<std::string, AgentBackend*> backends, TaskSpec spec,
                       EngineOptions opts = {})
      : topology_(topo), spec_(spec), opts_(std::move(opts)) {
    transcript_.run_id = opts_.run_id;
    transcript_.task = spec.kind;
    transcript_.topology_ref = opts_.topology_ref;
    for (auto& id : identities) {
      auto it = backends.find(id.name);
      if (it == backends.end()) {
        throw ParameterError("no backend for agent " + id.name);
      }
      AgentState state;
      state.id = id;
      state.backend = it->second;
      state.allowed.insert(id.neighbor_names.begin(), id.neighbor_names.end());
      agents_.emplace(id.name, std::move(state));
    }
    if (agents_.size() != static_cast<std::size_t>(topo.node_count)) {
      throw ParameterError("identity count does not match topology");
    }
  }

  void run_rounds(int rounds) {
    if (rounds < 1) throw ParameterError("round budget must be >= 1");
    transcript_.round_count = rounds;
    for (auto& [name, agent] : agents_) {
      agent.history.push_back({ChatRole::System,
                               build_system_prompt(spec_, agent.id,
                                                   topology_.node_count, rounds)});
      record(0, EventKind::System, name, "", agent.history.back().content);
    }
    for (int r = 0; r < rounds && !failed_; ++r) {
      // Deliver messages sent in round r-1 and record the incoming turns.
      if (r > 0) {
        for (auto& [name, agent] : agents_) {
          std::sort(agent.inbox.begin(), agent.inbox.end());
          for (const auto& [sender, text] : agent.inbox) {
            record(r, EventKind::Incoming, name, sender, text);
          }
          agent.history.push_back({ChatRole::User, build_round_request(agent.inbox)});
          agent.inbox.clear();
        }
      }
      // Generate this round's envelopes; delivery happens at round r+1, so
      // every generation here sees only state through round r-1.
      std::map<std::string, std::map<std::string, std::string>> sent;
      for (auto& [name, agent] : agents_) {
        sent[name] = generate_envelope(agent, r);
        if (failed_) return;
      }
      for (auto& [name, agent] : agents_) {
        for (const auto& [recipient, text] : sent[name]) {
          agents_.at(recipient).inbox.emplace_back(name, text);
        }
      }
    }
  }

  // Asks each agent the task-specific final question and parses the text
  // after the last answer marker. One retry on an answer outside the
  // grammar; afterwards the answer is recorded as invalid.
  std::map<std::string, FinalAnswer> collect_final_answers() {
    std::map<std::string, FinalAnswer> answers;
    if (failed_) return answers;
    AnswerContext ctx;
    ctx.delta_plus_one = spec_.delta_plus_one;
    for (const auto& [name, agent] : agents_) ctx.agent_names.push_back(name);
    const int round = transcript_.round_count;
    for (auto& [name, agent] : agents_) {
      agent.history.push_back({ChatRole::User, build_final_request(spec_, agent.id)});
      FinalAnswer answer = FinalAnswer::invalid();
      std::string last_raw;
      for (int attempt = 0; attempt <= opts_.final_retry_limit; ++attempt) {
        std::string raw;
        if (!invoke(agent, raw)) return answers;
        last_raw = raw;
        agent.history.push_back({ChatRole::Assistant, raw});
        if (auto text = extract_final_answer_text(raw)) {
          answer = parse_final_answer(spec_.kind, *text, ctx);
        }
        if (answer.valid()) break;
        if (attempt < opts_.final_retry_limit) {
          record(round, EventKind::Retry, name, "", raw);
          agent.history.push_back({ChatRole::User, build_final_retry_request(spec_, agent.id)});
        }
      }
      record(round, EventKind::Final, name, "", last_raw);
      answers[name] = answer;
    }
    return answers;
  }

  const RunTranscript& transcript() const { return transcript_; }
  const ChatHistory& history_of(const std::string& name) const {
    return agents_.at(name).history;
  }
  bool failed() const { return failed_; }
  const std::string& failure_reason() const { return failure_reason_; }

  TokenUsage total_usage() const {
    TokenUsage total;
    for (const auto& [name, agent] : agents_) total.add(agent.backend->usage());
    return total;
  }

 private:
  struct AgentState {
    AgentIdentity id;
    AgentBackend* backend = nullptr;
    ChatHistory history;
    std::set<std::string> allowed;
    std::vector<std::pair<std::string, std::string>> inbox;  // (sender, text)
  };

  bool invoke(AgentState& agent, std::string& out) {
    try {
      out = agent.backend->generate(agent.history);
      return true;
    } catch (const std::exception& e) {
      failed_ = true;
      failure_reason_ = "backend failure for " + agent.id.name + ": " + e.what();
      if (opts_.warn) opts_.warn(failure_reason_);
      return false;
    }
  }

  // One agent's generation for round r, with parse retries. Exhausting the
  // retry budget degrades to an empty envelope instead of aborting the run.
  std::map<std::string, std::string> generate_envelope(AgentState& agent, int r) {
    for (int attempt = 0; attempt <= opts_.retry_limit; ++attempt) {
      std::string raw;
      if (!invoke(agent, raw)) return {};
      agent.history.push_back({ChatRole::Assistant, raw});
      EnvelopeParse parsed = parse_message_envelope(raw, agent.allowed);
      if (parsed.ok) {
        for (const auto& key : parsed.dropped_recipients) {
          if (opts_.warn) {
            opts_.warn(agent.id.name + " addressed unknown recipient '" + key + "'; dropped");
          }
        }
        record(r, EventKind::Outgoing, agent.id.name, "", raw);
        return parsed.messages;
      }
      record(r, EventKind::Retry, agent.id.name, "", raw);
      if (attempt < opts_.retry_limit) {
        agent.history.push_back({ChatRole::User, std::string(kRetryInstruction)});
      }
    }
    if (opts_.warn) {
      opts_.warn(agent.id.name + " exceeded the retry limit in round " + std::to_string(r) +
                 "; sending an empty envelope");
    }
    record(r, EventKind::Outgoing, agent.id.name, "", "{}");
    return {};
  }

  void record(int round, EventKind kind, const std::string& agent, const std::string& counterpart,
              const std::string& content) {
    TranscriptEvent e;
    e.round = round;
    e.kind = kind;
    e.agent = agent;
    e.counterpart = counterpart;
    e.content = content;
    if (opts_.wall_clock) {
      e.ts = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
                 .count();
    } else {
      e.ts = next_ts_++;
    }
    transcript_.events.push_back(std::move(e));
  }

  Topology topology_;
  TaskSpec spec_;
  EngineOptions opts_;
  std::map<std::string, AgentState> agents_;  // name-ordered
  RunTranscript transcript_;
  std::int64_t next_ts_ = 0;
  bool failed_ = false;
  std::string failure_reason_;
};

// Checks that messages received by an agent in round r are exactly the
// messages addressed to it in round r-1, by re-parsing the recorded outgoing
// events. Returns an explanation for the first violation, or nullopt.
inline std::optional<std::string> check_synchrony(const RunTranscript& t,
                                                  const std::vector<AgentIdentity>& identities) {
  std::map<std::string, std::set<std::string>> allowed;
  for (const auto& id : identities) {
    allowed[id.name] = {id.neighbor_names.begin(), id.neighbor_names.end()};
  }
  using Delivery = std::set<std::tuple<std::string, std::string, std::string>>;
  std::map<int, Delivery> expected, actual;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::Outgoing) {
      auto parsed = parse_message_envelope(e.content, allowed.at(e.agent));
      if (!parsed.ok) continue;  // a degraded round delivers nothing
      for (const auto& [recipient, text] : parsed.messages) {
        expected[e.round + 1].insert({recipient, e.agent, text});
      }
    } else if (e.kind == EventKind::Incoming) {
      actual[e.round].insert({e.agent, e.counterpart, e.content});
    }
  }
  expected.erase(t.round_count);  // round T-1 messages are never delivered
  if (expected != actual) {
    for (int r = 1; r < t.round_count; ++r) {
      if (expected[r] != actual[r]) {
        return "synchrony violated in round " + std::to_string(r);
      }
    }
    return "synchrony violated";
  }
  return std::nullopt;
}

// Structural transcript check: one system turn, T outgoing turns, and one
// final turn per agent.
inline std::optional<std::string> check_structure(const RunTranscript& t,
                                                  const std::vector<AgentIdentity>& identities) {
  for (const auto& id : identities) {
    const auto systems = t.events_of(id.name, EventKind::System).size();
    const auto outgoing = t.events_of(id.name, EventKind::Outgoing).size();
    const auto finals = t.events_of(id.name, EventKind::Final).size();
    if (systems != 1 || outgoing != static_cast<std::size_t>(t.round_count) || finals != 1) {
      return "agent " + id.name + " has " + std::to_string(systems) + " system, " +
             std::to_string(outgoing) + " outgoing, " + std::to_string(finals) +
             " final events (expected 1, " + std::to_string(t.round_count) + ", 1)";
    }
  }
  return std::nullopt;
}

}  // namespace agentmesh
