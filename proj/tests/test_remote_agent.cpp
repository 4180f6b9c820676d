#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "agentmesh/protocol.hpp"
#include "agentmesh/remote_agent.hpp"
#include "test_util.hpp"

using namespace agentmesh;

namespace {

// Local chat-completions stub. The handler decides the reply per request,
// including failure status codes.
class StubServer {
 public:
  using Handler = std::function<void(const nlohmann::json& request, httplib::Response& res)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      last_auth_ = req.get_header_value("Authorization");
      handler_(nlohmann::json::parse(req.body), res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::string last_auth() const { return last_auth_; }

  static void reply(httplib::Response& res, const std::string& content, int prompt_tokens = 10,
                    int completion_tokens = 5) {
    nlohmann::json body{
        {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
        {"usage",
         {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}}}};
    res.set_content(body.dump(), "application/json");
  }

 private:
  httplib::Server server_;
  Handler handler_;
  int port_ = 0;
  std::thread thread_;
  std::string last_auth_;
};

RemoteModelConfig stub_config(const StubServer& server) {
  RemoteModelConfig cfg;
  cfg.model = "stub-model";
  cfg.base_url = server.base_url();
  cfg.backoff_base_seconds = 0.01;
  cfg.timeout_seconds = 5.0;
  cfg.usd_per_mtok_input = 1.0;
  cfg.usd_per_mtok_output = 2.0;
  return cfg;
}

}  // namespace

TEST_CASE("remote agent round-trips a fixed valid envelope") {
  StubServer server([](const nlohmann::json&, httplib::Response& res) {
    StubServer::reply(res, R"({"Bob": "hello from the stub"})");
  });
  auto limiter = std::make_shared<RequestLimiter>(2);
  RemoteModelAgent agent(stub_config(server), limiter);
  const std::string out = agent.generate({{ChatRole::System, "test"}});
  const auto parsed = parse_message_envelope(out, {"Bob"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.at("Bob") == "hello from the stub");
  CHECK(agent.usage().requests == 1);
  CHECK(agent.usage().prompt_tokens == 10);
  CHECK(agent.usage().completion_tokens == 5);
  CHECK_THAT(agent.usage().cost_usd, Catch::Matchers::WithinRel(10.0 / 1e6 + 2.0 * 5.0 / 1e6, 1e-9));
}

TEST_CASE("remote agent maps history onto role-tagged messages") {
  nlohmann::json seen;
  StubServer server([&seen](const nlohmann::json& req, httplib::Response& res) {
    seen = req;
    StubServer::reply(res, "{}");
  });
  auto limiter = std::make_shared<RequestLimiter>(2);
  RemoteModelConfig cfg = stub_config(server);
  cfg.temperature = 0.25;
  RemoteModelAgent agent(cfg, limiter);
  agent.generate({{ChatRole::System, "sys"},
                  {ChatRole::Assistant, "prev"},
                  {ChatRole::User, "incoming"}});
  REQUIRE(seen.contains("messages"));
  REQUIRE(seen["messages"].size() == 3);
  CHECK(seen["messages"][0]["role"] == "system");
  CHECK(seen["messages"][1]["role"] == "assistant");
  CHECK(seen["messages"][2]["role"] == "user");
  CHECK(seen["model"] == "stub-model");
  CHECK_THAT(seen["temperature"].get<double>(), Catch::Matchers::WithinAbs(0.25, 1e-12));
}

TEST_CASE("HTTP 429 twice then success consumes two backoff retries") {
  std::atomic<int> hits{0};
  StubServer server([&hits](const nlohmann::json&, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    StubServer::reply(res, "{}");
  });
  auto limiter = std::make_shared<RequestLimiter>(2);
  RemoteModelAgent agent(stub_config(server), limiter);
  CHECK(agent.generate({{ChatRole::System, "s"}}) == "{}");
  CHECK(hits == 3);
  CHECK(agent.usage().requests == 3);
}

TEST_CASE("retries exhaust into a backend error") {
  StubServer server([](const nlohmann::json&, httplib::Response& res) { res.status = 503; });
  auto limiter = std::make_shared<RequestLimiter>(2);
  RemoteModelConfig cfg = stub_config(server);
  cfg.max_attempts = 2;
  RemoteModelAgent agent(cfg, limiter);
  CHECK_THROWS_AS(agent.generate({{ChatRole::System, "s"}}), BackendError);
  CHECK(agent.usage().requests == 2);
}

TEST_CASE("non-retryable HTTP errors fail immediately") {
  std::atomic<int> hits{0};
  StubServer server([&hits](const nlohmann::json&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  auto limiter = std::make_shared<RequestLimiter>(2);
  RemoteModelAgent agent(stub_config(server), limiter);
  CHECK_THROWS_AS(agent.generate({{ChatRole::System, "s"}}), BackendError);
  CHECK(hits == 1);
}

TEST_CASE("credentials come from the environment and flow as bearer tokens") {
  StubServer server([](const nlohmann::json&, httplib::Response& res) {
    StubServer::reply(res, "{}");
  });
  auto limiter = std::make_shared<RequestLimiter>(2);

  RemoteModelConfig cfg = stub_config(server);
  cfg.api_key_env = "AGENTMESH_TEST_KEY";
  unsetenv("AGENTMESH_TEST_KEY");
  CHECK_THROWS_AS(RemoteModelAgent(cfg, limiter), ParameterError);

  setenv("AGENTMESH_TEST_KEY", "sk-test-123", 1);
  RemoteModelAgent agent(cfg, limiter);
  agent.generate({{ChatRole::System, "s"}});
  CHECK(server.last_auth() == "Bearer sk-test-123");
  unsetenv("AGENTMESH_TEST_KEY");
}

TEST_CASE("a full run works end-to-end over the HTTP stub") {
  // Each agent first answers with prose (no JSON), then valid envelopes;
  // final requests get a valid answer. The engine's parse retry absorbs the
  // invalid output.
  StubServer server([](const nlohmann::json& req, httplib::Response& res) {
    const auto& messages = req["messages"];
    const std::string last = messages.back()["content"].get<std::string>();
    if (last.find("### Final Answer ###") != std::string::npos &&
        last.find("valid options") != std::string::npos) {
      StubServer::reply(res, "### Final Answer ### No");
      return;
    }
    int assistant_turns = 0;
    for (const auto& m : messages) assistant_turns += m["role"] == "assistant";
    if (assistant_turns == 0) {
      StubServer::reply(res, "thinking out loud, no JSON here");
    } else {
      StubServer::reply(res, "{}");
    }
  });
  auto limiter = std::make_shared<RequestLimiter>(4);
  RemoteModelConfig cfg = stub_config(server);

  auto topo = testutil::complete_graph(2, {"Ann", "Bob"});
  std::vector<AgentIdentity> ids{{0, "Ann", {"Bob"}}, {1, "Bob", {"Ann"}}};
  RemoteModelAgent ann(cfg, limiter), bob(cfg, limiter);
  std::map<std::string, AgentBackend*> backends{{"Ann", &ann}, {"Bob", &bob}};
  MessagePassingEngine engine(topo, ids, backends, {TaskKind::LeaderElection, 2});
  engine.run_rounds(2);
  const auto answers = engine.collect_final_answers();
  REQUIRE_FALSE(engine.failed());
  CHECK(answers.at("Ann") == FinalAnswer::yes_no(false));
  CHECK(engine.transcript().events_of("Ann", EventKind::Retry).size() == 1);
  CHECK(engine.total_usage().requests > 0);
}
