#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <stancekit/filter.hpp>

using namespace stancekit;

namespace {

RawComment mk(const std::string& body, const std::string& subreddit = "politics",
              const std::string& author = "someone", long long utc = 1500000000) {
  return RawComment{"id", utc, author, subreddit, body};
}

std::string jline(const std::string& id, long long utc, const std::string& author,
                  const std::string& sub, const std::string& body) {
  return "{\"id\":\"" + id + "\",\"created_utc\":" + std::to_string(utc) +
         ",\"author\":\"" + author + "\",\"subreddit\":\"" + sub + "\",\"body\":\"" +
         body + "\"}";
}

}  // namespace

TEST_CASE("keyword phrase matches case-insensitively as a substring") {
  CHECK(match_keywords("I support Basic Income today"));
  CHECK(match_keywords("BASIC INCOME"));
  CHECK(match_keywords("rebasic incomes"));  // plain substring, no word boundary
  CHECK_FALSE(match_keywords("basic-income"));
  CHECK_FALSE(match_keywords("basicincome"));
  CHECK_FALSE(match_keywords(""));
}

TEST_CASE("standalone UBI needs non-alphanumeric neighbours") {
  CHECK(match_keywords("UBI"));
  CHECK(match_keywords("UBI: yes please"));
  CHECK(match_keywords("I want UBI"));
  CHECK(match_keywords("I want UBI."));
  CHECK(match_keywords("(UBI)"));
  CHECK(match_keywords("pro-UBI stance"));
  CHECK_FALSE(match_keywords("RUBIN said so"));
  CHECK_FALSE(match_keywords("UBIs are nice"));
  CHECK_FALSE(match_keywords("SUBI"));
  CHECK_FALSE(match_keywords("I bought ubi stock"));
  CHECK_FALSE(match_keywords("Ubi soft"));
  // multibyte UTF-8 neighbours are non-alphanumeric bytes, hence boundaries
  CHECK(match_keywords("\xc3\xa9UBI\xc3\xa9"));
  // second occurrence can match even when the first is embedded
  CHECK(match_keywords("RUBIK and UBI"));
}

TEST_CASE("exclusions follow the fixed order") {
  CHECK(decide(mk("UBI in Ubisoft games", "technology")).reason ==
        FilterReason::UbisoftPhrase);
  CHECK(decide(mk("UBI nerf when", "Rainbow6")).reason ==
        FilterReason::GamingSubredditUbiOnly);
  CHECK(decide(mk("basic income rocks", "Rainbow6")).kept);
  CHECK(decide(mk("UBI thread", "politics", "AutoModerator")).reason ==
        FilterReason::BotAuthor);
  CHECK(decide(mk("UBI", "politics", "someone", 1388534399)).reason ==
        FilterReason::BeforeCutoff);
  CHECK(decide(mk("UBI", "politics", "someone", 1388534400)).kept);
  CHECK(decide(mk("no keywords here")).reason == FilterReason::NoKeyword);

  // ubisoft phrase wins over the gaming-subreddit rule, bot, and date
  CHECK(decide(mk("basic income ubisoft", "Rainbow6", "AutoModerator", 1)).reason ==
        FilterReason::UbisoftPhrase);
  // gaming subreddit wins over bot and date
  CHECK(decide(mk("UBI", "forhonor", "AutoModerator", 1)).reason ==
        FilterReason::GamingSubredditUbiOnly);
  // bot wins over date
  CHECK(decide(mk("UBI", "politics", "sneakpeekbot", 1)).reason ==
        FilterReason::BotAuthor);
}

TEST_CASE("every gaming subreddit and bot is recognized") {
  for (auto sub : kGamingSubreddits) {
    CHECK(decide(mk("UBI", std::string(sub))).reason ==
          FilterReason::GamingSubredditUbiOnly);
    CHECK(decide(mk("a basic income game", std::string(sub))).kept);
  }
  for (auto bot : kBotAuthors)
    CHECK(decide(mk("UBI", "politics", std::string(bot))).reason ==
          FilterReason::BotAuthor);
  // prefixes are stripped before comparison
  CHECK(decide(mk("UBI", "r/Rainbow6")).reason == FilterReason::GamingSubredditUbiOnly);
  CHECK(decide(mk("UBI", "politics", "u/AutoModerator")).reason ==
        FilterReason::BotAuthor);
  // comparisons are case-sensitive
  CHECK(decide(mk("UBI", "rainbow6")).kept);
  CHECK(decide(mk("UBI", "politics", "automoderator")).kept);
}

TEST_CASE("filter_stream preserves order and counts every record") {
  std::vector<RawComment> in{
      mk("UBI today"),
      mk("irrelevant"),
      mk("basic income", "politics", "x", 1388534400),
      mk("ubisoft UBI"),
  };
  in[0].id = "a";
  in[2].id = "c";
  auto res = filter_stream(in);
  REQUIRE(res.kept.size() == 2);
  CHECK(res.kept[0].id == "a");
  CHECK(res.kept[1].id == "c");
  CHECK(res.stats.count(FilterReason::Kept) == 2);
  CHECK(res.stats.count(FilterReason::NoKeyword) == 1);
  CHECK(res.stats.count(FilterReason::UbisoftPhrase) == 1);
  CHECK(res.stats.total() == 4);

  auto again = filter_stream(res.kept);
  CHECK(again.kept.size() == res.kept.size());
  CHECK(again.stats.count(FilterReason::Kept) == 2);
}

TEST_CASE("filter_lines echoes kept lines verbatim and tallies malformed") {
  const std::string keep1 = jline("a", 1400000000, "u1", "politics", "UBI now");
  const std::string drop = jline("b", 1400000000, "u2", "politics", "nothing");
  const std::string keep2 = jline("c", 1400000000, "u3", "economy", "my basic income");
  std::istringstream in(keep1 + "\nnot json\n" + drop + "\n" + keep2 + "\n");
  std::ostringstream out;
  FilterStats stats = filter_lines(in, out);
  CHECK(out.str() == keep1 + "\n" + keep2 + "\n");
  CHECK(stats.count(FilterReason::Kept) == 2);
  CHECK(stats.count(FilterReason::NoKeyword) == 1);
  CHECK(stats.count(FilterReason::MalformedInput) == 1);
  CHECK(stats.to_json()["kept"] == 2);
  CHECK(stats.to_json()["total"] == 4);
}

TEST_CASE("empty stream gives all-zero counts") {
  auto res = filter_stream({});
  CHECK(res.kept.empty());
  CHECK(res.stats.total() == 0);
}
