#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <stancekit/config.hpp>

using namespace stancekit;
using nlohmann::json;

namespace {

json minimal() {
  return json{{"input", "comments.jsonl"}, {"output_dir", "out"}};
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  auto c = config_from_json(minimal());
  CHECK(c.input == "comments.jsonl");
  CHECK(c.output_dir == "out");
  CHECK(c.facets == std::vector<std::string>{"topic", "cohort"});
  CHECK(c.dimensions.empty());
  CHECK(c.topic_weighting == TopicWeighting::Fractional);
  CHECK(c.avg_mode == AvgMode::QuarterMean);
  CHECK_FALSE(c.renormalize.has_value());
  CHECK(c.window_start == Quarter{2014, 1});
  CHECK(c.window_end == Quarter{2022, 2});
  CHECK(c.rank_metric == RankMetric::L1);
  CHECK(c.seed == 42);
  CHECK_FALSE(c.svg);
  CHECK(c.sgns.dim == 150);
  CHECK(c.sgns.negatives == 5);
  CHECK(c.sgns.epochs == 5);
  CHECK(c.sgns.seed == 42);
}

TEST_CASE("full config round-trips through json") {
  json j = minimal();
  j["first_activity"] = "first.json";
  j["cooccurrence"] = "pairs.csv";
  j["facets"] = {"topic", "cohort", "dim-partisan"};
  j["dimensions"] = json::array({json{
      {"name", "partisan"},
      {"pairs", json::array({json::array({"democrats", "Conservative"})})},
      {"bin_labels", {"left-wing", "center-left", "center", "center-right", "right-wing"}},
  }});
  j["topic_weighting"] = "occurrence";
  j["avg_mode"] = "pooled";
  j["renormalize"] = true;
  j["window"] = {{"start", "2015Q2"}, {"end", "2020Q4"}};
  j["rank_metric"] = "pearson";
  j["seed"] = 7;
  j["svg"] = true;
  j["sgns"] = {{"dim", 32}, {"epochs", 2}, {"min_count", 3}};

  auto c = config_from_json(j);
  CHECK(c.first_activity == "first.json");
  CHECK(c.cooccurrence == "pairs.csv");
  CHECK_FALSE(c.embedding.has_value());
  REQUIRE(c.dimensions.size() == 1);
  CHECK(c.dimensions[0].name == "partisan");
  CHECK(c.dimensions[0].pairs ==
        std::vector<std::pair<std::string, std::string>>{{"democrats", "Conservative"}});
  CHECK(c.dimensions[0].bin_labels.size() == 5);
  CHECK(c.topic_weighting == TopicWeighting::Occurrence);
  CHECK(c.avg_mode == AvgMode::Pooled);
  CHECK(c.renormalize == true);
  CHECK(c.window_start == Quarter{2015, 2});
  CHECK(c.window_end == Quarter{2020, 4});
  CHECK(c.rank_metric == RankMetric::PearsonR);
  CHECK(c.seed == 7);
  CHECK(c.sgns.dim == 32);
  CHECK(c.sgns.epochs == 2);
  CHECK(c.sgns.min_count == 3);
  CHECK(c.sgns.negatives == 5);  // untouched default
  CHECK(c.sgns.seed == 7);       // follows the top-level seed

  // serialize and parse again: identical configuration
  auto again = config_from_json(config_to_json(c));
  CHECK(again == c);
}

TEST_CASE("config rejects unknown keys everywhere") {
  json j = minimal();
  j["extra"] = 1;
  CHECK_THROWS_WITH(config_from_json(j), Catch::Matchers::ContainsSubstring("extra"));

  j = minimal();
  j["window"] = {{"start", "2014Q1"}, {"end", "2020Q1"}, {"middle", "x"}};
  CHECK_THROWS_WITH(config_from_json(j), Catch::Matchers::ContainsSubstring("middle"));

  j = minimal();
  j["sgns"] = {{"dim", 8}, {"seed", 1}};  // seed lives at the top level
  CHECK_THROWS_WITH(config_from_json(j), Catch::Matchers::ContainsSubstring("seed"));

  j = minimal();
  j["dimensions"] = json::array({json{{"name", "d"}, {"pairs", json::array()}, {"oops", 1}}});
  CHECK_THROWS_WITH(config_from_json(j), Catch::Matchers::ContainsSubstring("oops"));
}

TEST_CASE("config validates required fields and values") {
  CHECK_THROWS_AS(config_from_json(json::object()), ContractViolation);
  CHECK_THROWS_AS(config_from_json(json::array()), ContractViolation);
  CHECK_THROWS_AS(config_from_json(json{{"input", "x"}}), ContractViolation);

  json j = minimal();
  j["window"] = {{"start", "2020Q1"}, {"end", "2014Q1"}};
  CHECK_THROWS_AS(config_from_json(j), ContractViolation);

  j = minimal();
  j["topic_weighting"] = "even";
  CHECK_THROWS_AS(config_from_json(j), ContractViolation);

  j = minimal();
  j["avg_mode"] = "median";
  CHECK_THROWS_AS(config_from_json(j), ContractViolation);

  j = minimal();
  j["rank_metric"] = "cosine";
  CHECK_THROWS_AS(config_from_json(j), ContractViolation);

  j = minimal();
  j["input"] = 5;  // wrong type
  CHECK_THROWS_AS(config_from_json(j), ContractViolation);
}

TEST_CASE("facets must name a known kind") {
  json j = minimal();
  j["facets"] = {"topic", "vibe"};
  CHECK_THROWS_WITH(config_from_json(j), Catch::Matchers::ContainsSubstring("vibe"));

  j = minimal();
  j["facets"] = {"dim-partisan"};
  CHECK_THROWS_WITH(config_from_json(j),
                    Catch::Matchers::ContainsSubstring("dim-partisan"));

  j["dimensions"] = json::array({json{
      {"name", "partisan"},
      {"pairs", json::array({json::array({"a", "b"})})},
  }});
  auto c = config_from_json(j);
  CHECK(c.facets == std::vector<std::string>{"dim-partisan"});
}

TEST_CASE("config file io") {
  const std::string dir = std::string(STANCEKIT_TEST_TMPDIR) + "/config_io";
  std::filesystem::create_directories(dir);
  RunConfig c;
  c.input = "in.jsonl";
  c.output_dir = "outdir";
  c.seed = 11;
  c.sgns.seed = 11;
  save_config(c, dir + "/config.json");
  auto back = load_config(dir + "/config.json");
  CHECK(back == c);

  CHECK_THROWS_AS(load_config(dir + "/missing.json"), IoError);

  std::ofstream bad(dir + "/bad.json");
  bad << "{ not json";
  bad.close();
  CHECK_THROWS_AS(load_config(dir + "/bad.json"), ContractViolation);
}
