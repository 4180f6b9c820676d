#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace agentmesh {

enum class ChatRole { System, User, Assistant };

inline std::string to_string(ChatRole r) {
  switch (r) {
    case ChatRole::System: return "system";
    case ChatRole::User: return "user";
    case ChatRole::Assistant: return "assistant";
  }
  throw std::invalid_argument("unknown chat role");
}

struct ChatTurn {
  ChatRole role;
  std::string content;
};

using ChatHistory = std::vector<ChatTurn>;

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  int requests = 0;
  double cost_usd = 0.0;

  void add(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    requests += other.requests;
    cost_usd += other.cost_usd;
  }
};

// Raised by a backend once its own transport retries are exhausted; the run
// is then marked failed.
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One agent's text generator. Given the agent's full chat history (system
// prompt, incoming and outgoing turns, and the current request), produce the
// next text output. Implementations must not read anything beyond the
// supplied history; scripted and random backends are pure functions of
// (history, seed). Distinct backend instances may be invoked concurrently;
// a single instance is invoked serially.
class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual std::string generate(const ChatHistory& history) = 0;
  virtual TokenUsage usage() const { return {}; }
};

}  // namespace agentmesh
