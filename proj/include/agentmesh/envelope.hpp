#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentmesh {

// One agent's outgoing messages for a round: recipient name -> message text.
// Omitted recipients receive nothing.
struct RoundEnvelope {
  int round_index = 0;
  std::string sender;
  std::map<std::string, std::string> messages;
};

struct EnvelopeParse {
  bool ok = false;
  std::map<std::string, std::string> messages;
  std::vector<std::string> dropped_recipients;  // keys outside the allowed set
  std::string error;
};

namespace detail {

// Finds the span of the JSON-ish object starting at `start` (an opening
// brace), honoring string literals and escapes. Returns one past the closing
// brace, or npos when unbalanced.
inline std::size_t match_object_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace detail

// Extracts the last syntactically valid flat JSON object from free-form model
// output (code fences and surrounding prose are ignored). Objects nested
// inside a candidate are not considered on their own. Returns nullopt when
// the text contains no valid JSON object at all; a valid but non-flat last
// object is reported through `non_flat`.
inline std::optional<nlohmann::json> extract_last_json_object(std::string_view raw,
                                                              bool* non_flat = nullptr) {
  std::optional<nlohmann::json> last;
  std::size_t i = 0;
  while ((i = raw.find('{', i)) != std::string_view::npos) {
    const std::size_t end = detail::match_object_end(raw, i);
    if (end == std::string_view::npos) {
      ++i;
      continue;
    }
    auto parsed = nlohmann::json::parse(raw.substr(i, end - i), nullptr, false);
    if (parsed.is_object()) {
      last = std::move(parsed);
      i = end;  // skip past this candidate; do not descend into it
    } else {
      ++i;
    }
  }
  if (non_flat && last) {
    *non_flat = !std::all_of(last->begin(), last->end(),
                             [](const nlohmann::json& v) { return v.is_string(); });
  }
  return last;
}

// Parses raw model output into a round envelope. Flat string-to-string JSON
// is required; keys outside `allowed_recipients` are dropped and reported.
// An empty object is a valid (silent) envelope.
inline EnvelopeParse parse_message_envelope(std::string_view raw,
                                            const std::set<std::string>& allowed_recipients) {
  EnvelopeParse result;
  bool non_flat = false;
  auto obj = extract_last_json_object(raw, &non_flat);
  if (!obj) {
    result.error = "no valid JSON object found in output";
    return result;
  }
  if (non_flat) {
    result.error = "JSON object is not flat with string values";
    return result;
  }
  for (const auto& [key, value] : obj->items()) {
    if (allowed_recipients.count(key)) {
      result.messages[key] = value.get<std::string>();  // last key wins on duplicates
    } else {
      result.dropped_recipients.push_back(key);
    }
  }
  result.ok = true;
  return result;
}

}  // namespace agentmesh
