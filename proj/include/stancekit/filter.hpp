#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stancekit/events.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

/// Why a record was kept or dropped. MalformedInput is an ingestion tally,
/// not a filter policy outcome: it flags corrupt lines in the dump.
enum class FilterReason {
  Kept,
  NoKeyword,
  UbisoftPhrase,
  GamingSubredditUbiOnly,
  BotAuthor,
  BeforeCutoff,
  MalformedInput,
};

inline constexpr std::array<FilterReason, 7> kAllFilterReasons = {
    FilterReason::Kept,          FilterReason::NoKeyword,
    FilterReason::UbisoftPhrase, FilterReason::GamingSubredditUbiOnly,
    FilterReason::BotAuthor,     FilterReason::BeforeCutoff,
    FilterReason::MalformedInput,
};

inline const char* filter_reason_name(FilterReason r) {
  switch (r) {
    case FilterReason::Kept: return "kept";
    case FilterReason::NoKeyword: return "no_keyword";
    case FilterReason::UbisoftPhrase: return "ubisoft_phrase";
    case FilterReason::GamingSubredditUbiOnly: return "gaming_subreddit_ubi_only";
    case FilterReason::BotAuthor: return "bot_author";
    case FilterReason::BeforeCutoff: return "before_cutoff";
    case FilterReason::MalformedInput: return "malformed_input";
  }
  return "?";
}

struct FilterDecision {
  bool kept = false;
  FilterReason reason = FilterReason::NoKeyword;
};

/// Comments before 2014-01-01T00:00:00Z are dropped.
inline constexpr std::int64_t kEarliestKeptUtc = [] {
  using namespace std::chrono;
  return duration_cast<seconds>(sys_days{January / 1 / 2014}.time_since_epoch()).count();
}();

/// Gaming communities where a bare "UBI" refers to the game publisher, not
/// the policy. Compared case-sensitively after stripping an "r/" prefix.
inline constexpr std::array<std::string_view, 6> kGamingSubreddits = {
    "Rainbow6", "forhonor", "thedivision", "GhostRecon", "Thread_crawler", "assassinscreed",
};

inline constexpr std::array<std::string_view, 8> kBotAuthors = {
    "AutoModerator",  "assessment_bot", "subredditsummarybot", "transcribot",
    "SnapshillBot",   "sneakpeekbot",   "twitterInfo_bot",     "autowikibot",
};

inline bool contains_basic_income(std::string_view body) {
  return contains_icase(body, "basic income");
}

/// True when the body has a case-sensitive "UBI" occurrence whose neighbours
/// on both sides are either text boundaries or non-alphanumeric bytes.
inline bool contains_standalone_ubi(std::string_view body) {
  for (std::size_t i = 0; i + 3 <= body.size(); ++i) {
    if (body.compare(i, 3, "UBI") != 0) continue;
    const bool left_ok = (i == 0) || !is_ascii_alnum(body[i - 1]);
    const bool right_ok = (i + 3 == body.size()) || !is_ascii_alnum(body[i + 3]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

/// Keyword rule: "basic income" case-insensitively anywhere, or a
/// standalone case-sensitive "UBI".
inline bool match_keywords(std::string_view body) {
  return contains_basic_income(body) || contains_standalone_ubi(body);
}

/// Exclusion rules for a keyword-matching comment, checked in a fixed order
/// (Ubisoft, gaming subreddit, bot author, date cutoff) so reason counts are
/// deterministic. First match wins.
inline FilterDecision apply_exclusions(const RawComment& c) {
  if (contains_icase(c.body, "ubisoft"))
    return {false, FilterReason::UbisoftPhrase};
  const std::string community = normalize_community(c.subreddit);
  for (std::string_view g : kGamingSubreddits) {
    if (community == g && !contains_basic_income(c.body))
      return {false, FilterReason::GamingSubredditUbiOnly};
  }
  const std::string author = normalize_author(c.author);
  for (std::string_view b : kBotAuthors) {
    if (author == b) return {false, FilterReason::BotAuthor};
  }
  if (c.created_utc < kEarliestKeptUtc)
    return {false, FilterReason::BeforeCutoff};
  return {true, FilterReason::Kept};
}

/// Full per-record decision: keyword gate, then exclusions.
inline FilterDecision decide(const RawComment& c) {
  if (!match_keywords(c.body)) return {false, FilterReason::NoKeyword};
  return apply_exclusions(c);
}

struct FilterStats {
  std::array<long, kAllFilterReasons.size()> counts{};

  long& count(FilterReason r) { return counts[static_cast<std::size_t>(r)]; }
  long count(FilterReason r) const { return counts[static_cast<std::size_t>(r)]; }

  long total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (FilterReason r : kAllFilterReasons)
      j[filter_reason_name(r)] = count(r);
    j["total"] = total();
    return j;
  }
};

struct FilterResult {
  std::vector<RawComment> kept;  // input order preserved
  FilterStats stats;
};

inline FilterResult filter_stream(const std::vector<RawComment>& comments) {
  FilterResult out;
  for (const RawComment& c : comments) {
    const FilterDecision d = decide(c);
    ++out.stats.count(d.reason);
    if (d.kept) out.kept.push_back(c);
  }
  return out;
}

/// Streaming NDJSON filter: kept records are echoed verbatim (original line
/// bytes), malformed lines are skipped and tallied.
inline FilterStats filter_lines(std::istream& in, std::ostream& out) {
  FilterStats stats;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto raw = parse_raw_comment(line);
    if (!raw) {
      ++stats.count(FilterReason::MalformedInput);
      continue;
    }
    const FilterDecision d = decide(*raw);
    ++stats.count(d.reason);
    if (d.kept) out << line << '\n';
  }
  return stats;
}

}  // namespace stancekit
