#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "agentmesh/chat.hpp"
#include "agentmesh/graph.hpp"

namespace agentmesh {

struct RemoteModelConfig {
  std::string model;
  std::string base_url = "http://127.0.0.1:8080/v1";
  std::string api_key_env;  // name of the env var holding the credential; empty = no auth
  std::optional<double> temperature;  // unset = provider default
  int max_output_tokens = 4096;
  double timeout_seconds = 120.0;
  int max_attempts = 4;               // transport attempts, including the first
  double backoff_base_seconds = 1.0;  // doubled per retry
  int max_in_flight = 4;              // global cap on concurrent requests
  double usd_per_mtok_input = 0.0;
  double usd_per_mtok_output = 0.0;
  std::string price_snapshot_date;  // provider prices drift; record when they were read
};

// Bounds in-flight requests across all agents built from one config.
class RequestLimiter {
 public:
  explicit RequestLimiter(int max_in_flight) : sem_(std::max(1, max_in_flight)) {}
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<256> sem_;
};

// Chat-completions adapter: maps the agent's history onto a role-tagged
// request, with bounded exponential-backoff retries on transport errors,
// HTTP 429, and server errors. Token usage and cost are tallied per agent.
// The credential is read from the configured environment variable at
// construction and never written to transcripts or logs.
class RemoteModelAgent final : public AgentBackend {
 public:
  RemoteModelAgent(RemoteModelConfig cfg, std::shared_ptr<RequestLimiter> limiter)
      : cfg_(std::move(cfg)), limiter_(std::move(limiter)) {
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        throw ParameterError("credential environment variable " + cfg_.api_key_env +
                             " is not set");
      }
      api_key_ = key;
    }
    const auto scheme_end = cfg_.base_url.find("://");
    if (scheme_end == std::string::npos) {
      throw ParameterError("base_url must include a scheme: " + cfg_.base_url);
    }
    const auto path_start = cfg_.base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      host_ = cfg_.base_url;
    } else {
      host_ = cfg_.base_url.substr(0, path_start);
      path_prefix_ = cfg_.base_url.substr(path_start);
    }
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }

  std::string generate(const ChatHistory& history) override {
    const std::string body = request_body(history);
    std::string last_error;
    for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
      if (attempt > 0) {
        const auto delay = std::chrono::duration<double>(
            cfg_.backoff_base_seconds * static_cast<double>(1 << (attempt - 1)));
        std::this_thread::sleep_for(delay);
      }
      limiter_->acquire();
      auto res = post(body);
      limiter_->release();
      count_request();
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw BackendError("chat completion failed with HTTP " + std::to_string(res->status) +
                           ": " + res->body);
      }
      return parse_response(res->body);
    }
    throw BackendError("chat completion retries exhausted: " + last_error);
  }

  TokenUsage usage() const override {
    std::lock_guard lock(mutex_);
    return usage_;
  }

 private:
  std::string request_body(const ChatHistory& history) const {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& turn : history) {
      messages.push_back({{"role", to_string(turn.role)}, {"content", turn.content}});
    }
    nlohmann::json body{
        {"model", cfg_.model}, {"messages", messages}, {"max_tokens", cfg_.max_output_tokens}};
    if (cfg_.temperature) body["temperature"] = *cfg_.temperature;
    return body.dump();
  }

  httplib::Result post(const std::string& body) {
    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_seconds));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    return client.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
  }

  std::string parse_response(const std::string& body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (!j.is_object() || !j.contains("choices") || j["choices"].empty()) {
      throw BackendError("malformed chat completion response");
    }
    const std::string content = j["choices"][0].at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      const auto& u = j["usage"];
      std::lock_guard lock(mutex_);
      const long long in = u.value("prompt_tokens", 0LL);
      const long long out = u.value("completion_tokens", 0LL);
      usage_.prompt_tokens += in;
      usage_.completion_tokens += out;
      usage_.cost_usd += static_cast<double>(in) / 1e6 * cfg_.usd_per_mtok_input +
                         static_cast<double>(out) / 1e6 * cfg_.usd_per_mtok_output;
    }
    return content;
  }

  void count_request() {
    std::lock_guard lock(mutex_);
    ++usage_.requests;
  }

  RemoteModelConfig cfg_;
  std::shared_ptr<RequestLimiter> limiter_;
  std::string api_key_;
  std::string host_;
  std::string path_prefix_;
  mutable std::mutex mutex_;
  TokenUsage usage_;
};

}  // namespace agentmesh
