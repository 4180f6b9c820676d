#include <catch2/catch_amalgamated.hpp>

#include "agentmesh/envelope.hpp"

using namespace agentmesh;

TEST_CASE("plain flat objects parse into envelopes") {
  const auto parsed = parse_message_envelope(R"({"Alan": "hi", "Bob": "yo"})", {"Alan", "Bob"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.size() == 2);
  CHECK(parsed.messages.at("Alan") == "hi");
  CHECK(parsed.messages.at("Bob") == "yo");
}

TEST_CASE("the empty object is a valid silent envelope") {
  const auto parsed = parse_message_envelope("{}", {"Alan"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.empty());
}

TEST_CASE("prose and code fences around the object are ignored") {
  const std::string raw =
      "Let me think about this. I'll message Alan.\n"
      "```json\n{\"Alan\": \"hi\"}\n```\n"
      "That should do it.";
  const auto parsed = parse_message_envelope(raw, {"Alan", "Bob"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages == std::map<std::string, std::string>{{"Alan", "hi"}});
}

TEST_CASE("the last valid object wins") {
  const std::string raw = R"(draft: {"Alan": "old"} ... final: {"Alan": "new"})";
  const auto parsed = parse_message_envelope(raw, {"Alan"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.at("Alan") == "new");
}

TEST_CASE("nested JSON is rejected as non-flat") {
  const auto parsed = parse_message_envelope(R"({"Alan": {"text": "hi"}})", {"Alan"});
  CHECK_FALSE(parsed.ok);
  CHECK(parsed.error.find("flat") != std::string::npos);
}

TEST_CASE("non-string values are rejected") {
  CHECK_FALSE(parse_message_envelope(R"({"Alan": 42})", {"Alan"}).ok);
  CHECK_FALSE(parse_message_envelope(R"({"Alan": null})", {"Alan"}).ok);
  CHECK_FALSE(parse_message_envelope(R"({"Alan": ["hi"]})", {"Alan"}).ok);
}

TEST_CASE("output without any JSON object is a parse error") {
  const auto parsed = parse_message_envelope("I will stay silent this round.", {"Alan"});
  CHECK_FALSE(parsed.ok);
  CHECK(parsed.error.find("no valid JSON") != std::string::npos);
}

TEST_CASE("unknown recipients are dropped and reported") {
  const auto parsed =
      parse_message_envelope(R"({"Alan": "hi", "Eve": "psst", "Zed": "yo"})", {"Alan"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.size() == 1);
  CHECK(parsed.dropped_recipients == std::vector<std::string>{"Eve", "Zed"});
}

TEST_CASE("duplicate keys keep the last value") {
  const auto parsed = parse_message_envelope(R"({"Alan": "first", "Alan": "second"})", {"Alan"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.at("Alan") == "second");
}

TEST_CASE("braces inside message strings do not confuse the scanner") {
  const auto parsed =
      parse_message_envelope(R"(note {unbalanced ... {"Alan": "use {x} and \"y\""})", {"Alan"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.at("Alan") == "use {x} and \"y\"");
}

TEST_CASE("a broken object followed by a valid one parses") {
  const auto parsed = parse_message_envelope(R"({"oops": } then {"Alan": "ok"})", {"Alan"});
  REQUIRE(parsed.ok);
  CHECK(parsed.messages.at("Alan") == "ok");
}
