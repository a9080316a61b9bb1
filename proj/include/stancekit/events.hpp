#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "stancekit/error.hpp"
#include "stancekit/quarter.hpp"
#include "stancekit/stance.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

/// One raw comment before corpus selection. `created_utc` is seconds since
/// the Unix epoch.
struct RawComment {
  std::string id;
  std::int64_t created_utc = 0;
  std::string author;
  std::string subreddit;
  std::string body;
};

/// One labeled comment after selection: the unit every panel aggregates.
/// `cohort` is empty until assign_cohorts has run; an engaged but empty
/// cohort year means the author identity is unknown.
struct CommentEvent {
  std::string id;
  Quarter quarter;
  std::string author;
  std::string community;
  Stance stance = Stance::Neutral;
  std::vector<std::string> topics;  // sorted, unique, at most 4

  bool cohort_assigned = false;
  std::optional<int> cohort;      // nullopt after assignment == Unknown
  bool cohort_fallback = false;   // cohort inferred from this dataset

  int score() const { return stance_score(stance); }
};

inline std::string normalize_community(std::string_view subreddit) {
  return std::string(strip_prefix(subreddit, "r/"));
}

inline std::string normalize_author(std::string_view author) {
  return std::string(strip_prefix(author, "u/"));
}

/// Parses one NDJSON record into a RawComment. Returns nullopt on anything
/// malformed: bad JSON, missing/ill-typed fields, or violated invariants
/// (empty id, nonpositive timestamp, empty subreddit).
inline std::optional<RawComment> raw_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  RawComment c;
  auto get_str = [&](const char* key, std::string& out) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return false;
    out = it->get<std::string>();
    return true;
  };
  if (!get_str("id", c.id) || c.id.empty()) return std::nullopt;
  auto ts = j.find("created_utc");
  if (ts == j.end()) return std::nullopt;
  if (ts->is_number_integer())
    c.created_utc = ts->get<std::int64_t>();
  else if (ts->is_number_float())
    c.created_utc = static_cast<std::int64_t>(ts->get<double>());
  else if (ts->is_string()) {
    try {
      c.created_utc = std::stoll(ts->get<std::string>());
    } catch (...) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (c.created_utc <= 0) return std::nullopt;
  if (!get_str("author", c.author)) return std::nullopt;
  if (!get_str("subreddit", c.subreddit) || c.subreddit.empty()) return std::nullopt;
  if (!get_str("body", c.body)) return std::nullopt;
  return c;
}

inline std::optional<RawComment> parse_raw_comment(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return raw_from_json(j);
}

/// Parses one labeled-event NDJSON record. Labels (stance, topics) are
/// inputs; records missing them or carrying more than four topic labels are
/// rejected as malformed.
inline std::optional<CommentEvent> event_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  CommentEvent e;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) return std::nullopt;
  e.id = id->get<std::string>();
  auto ts = j.find("created_utc");
  std::int64_t created = 0;
  if (ts == j.end()) return std::nullopt;
  if (ts->is_number_integer())
    created = ts->get<std::int64_t>();
  else if (ts->is_number_float())
    created = static_cast<std::int64_t>(ts->get<double>());
  else
    return std::nullopt;
  if (created <= 0) return std::nullopt;
  e.quarter = to_quarter(created);
  auto author = j.find("author");
  if (author == j.end() || !author->is_string()) return std::nullopt;
  e.author = normalize_author(author->get<std::string>());
  auto sub = j.find("subreddit");
  if (sub == j.end() || !sub->is_string() || sub->get<std::string>().empty()) return std::nullopt;
  e.community = normalize_community(sub->get<std::string>());
  auto st = j.find("stance");
  if (st == j.end() || !st->is_string()) return std::nullopt;
  auto stance = parse_stance(st->get<std::string>());
  if (!stance) return std::nullopt;
  e.stance = *stance;
  auto topics = j.find("topics");
  if (topics != j.end()) {
    if (!topics->is_array()) return std::nullopt;
    for (const auto& t : *topics) {
      if (!t.is_string()) return std::nullopt;
      e.topics.push_back(t.get<std::string>());
    }
    std::sort(e.topics.begin(), e.topics.end());
    e.topics.erase(std::unique(e.topics.begin(), e.topics.end()), e.topics.end());
    if (e.topics.size() > 4) return std::nullopt;
  }
  return e;
}

inline std::optional<CommentEvent> parse_event(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return event_from_json(j);
}

struct EventLoadResult {
  std::vector<CommentEvent> events;
  long malformed = 0;
};

inline EventLoadResult load_events(std::istream& in) {
  EventLoadResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (auto e = parse_event(line))
      out.events.push_back(std::move(*e));
    else
      ++out.malformed;
  }
  return out;
}

inline EventLoadResult load_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open events file: " + path);
  return load_events(in);
}

/// First-activity map (author -> first comment year) used for cohort
/// assignment, stored as a flat JSON object.
inline std::unordered_map<std::string, int> load_first_activity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open first-activity file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation("bad first-activity JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ContractViolation("first-activity file must be a JSON object");
  std::unordered_map<std::string, int> map;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer())
      throw ContractViolation("first-activity year for '" + it.key() + "' must be an integer");
    map[normalize_author(it.key())] = it.value().get<int>();
  }
  return map;
}

}  // namespace stancekit
