#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stancekit/embedding.hpp"
#include "stancekit/error.hpp"
#include "stancekit/panel.hpp"
#include "stancekit/quarter.hpp"
#include "stancekit/rank.hpp"
#include "stancekit/sgns.hpp"

namespace stancekit {

inline bool operator==(const DimensionSpec& a, const DimensionSpec& b) {
  return a.name == b.name && a.pairs == b.pairs && a.bin_labels == b.bin_labels;
}

inline bool operator==(const SgnsParams& a, const SgnsParams& b) {
  return a.dim == b.dim && a.negatives == b.negatives && a.epochs == b.epochs &&
         a.lr0 == b.lr0 && a.noise_power == b.noise_power && a.min_count == b.min_count &&
         a.seed == b.seed;
}

/// Everything the full pipeline needs, as one JSON document.
struct RunConfig {
  std::string input;       // labeled comments, NDJSON
  std::string output_dir;
  std::optional<std::string> first_activity;  // author -> first year, JSON object
  std::optional<std::string> embedding;       // pretrained community vectors
  std::optional<std::string> cooccurrence;    // else train from these pairs

  std::vector<std::string> facets = {"topic", "cohort"};  // plus "dim-<name>"
  std::vector<DimensionSpec> dimensions;

  TopicWeighting topic_weighting = TopicWeighting::Fractional;
  AvgMode avg_mode = AvgMode::QuarterMean;
  std::optional<bool> renormalize;  // unset = on iff the panel has absences
  Quarter window_start{2014, 1};
  Quarter window_end{2022, 2};
  RankMetric rank_metric = RankMetric::L1;
  std::uint64_t seed = 42;
  bool svg = false;
  SgnsParams sgns;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline void check_known_keys(const nlohmann::json& j,
                             std::initializer_list<const char*> known,
                             const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ContractViolation("config: unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["input"] = c.input;
  j["output_dir"] = c.output_dir;
  if (c.first_activity) j["first_activity"] = *c.first_activity;
  if (c.embedding) j["embedding"] = *c.embedding;
  if (c.cooccurrence) j["cooccurrence"] = *c.cooccurrence;
  j["facets"] = c.facets;
  nlohmann::json dims = nlohmann::json::array();
  for (const DimensionSpec& d : c.dimensions) {
    nlohmann::json jd;
    jd["name"] = d.name;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [neg, pos] : d.pairs) pairs.push_back({neg, pos});
    jd["pairs"] = pairs;
    if (!d.bin_labels.empty()) jd["bin_labels"] = d.bin_labels;
    dims.push_back(jd);
  }
  j["dimensions"] = dims;
  j["topic_weighting"] = topic_weighting_name(c.topic_weighting);
  j["avg_mode"] = avg_mode_name(c.avg_mode);
  if (c.renormalize) j["renormalize"] = *c.renormalize;
  j["window"] = {{"start", c.window_start.str()}, {"end", c.window_end.str()}};
  j["rank_metric"] = rank_metric_name(c.rank_metric);
  j["seed"] = c.seed;
  j["svg"] = c.svg;
  j["sgns"] = {{"dim", c.sgns.dim},         {"negatives", c.sgns.negatives},
               {"epochs", c.sgns.epochs},   {"lr0", c.sgns.lr0},
               {"noise_power", c.sgns.noise_power}, {"min_count", c.sgns.min_count}};
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ContractViolation("config: document must be a JSON object");
  detail::check_known_keys(
      j,
      {"input", "output_dir", "first_activity", "embedding", "cooccurrence", "facets",
       "dimensions", "topic_weighting", "avg_mode", "renormalize", "window", "rank_metric",
       "seed", "svg", "sgns"},
      "top level");
  RunConfig c;
  try {
    c.input = j.at("input").get<std::string>();
    c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("first_activity"))
      c.first_activity = j.at("first_activity").get<std::string>();
    if (j.contains("embedding")) c.embedding = j.at("embedding").get<std::string>();
    if (j.contains("cooccurrence")) c.cooccurrence = j.at("cooccurrence").get<std::string>();
    if (j.contains("facets")) c.facets = j.at("facets").get<std::vector<std::string>>();
    if (j.contains("dimensions")) {
      c.dimensions.clear();
      for (const auto& jd : j.at("dimensions")) {
        detail::check_known_keys(jd, {"name", "pairs", "bin_labels"}, "dimension");
        DimensionSpec d;
        d.name = jd.at("name").get<std::string>();
        for (const auto& jp : jd.at("pairs")) {
          if (!jp.is_array() || jp.size() != 2)
            throw ContractViolation("config: each seed pair must be [negative, positive]");
          d.pairs.emplace_back(jp[0].get<std::string>(), jp[1].get<std::string>());
        }
        if (jd.contains("bin_labels"))
          d.bin_labels = jd.at("bin_labels").get<std::vector<std::string>>();
        c.dimensions.push_back(std::move(d));
      }
    }
    if (j.contains("topic_weighting")) {
      auto w = parse_topic_weighting(j.at("topic_weighting").get<std::string>());
      if (!w) throw ContractViolation("config: bad topic_weighting");
      c.topic_weighting = *w;
    }
    if (j.contains("avg_mode")) {
      auto m = parse_avg_mode(j.at("avg_mode").get<std::string>());
      if (!m) throw ContractViolation("config: bad avg_mode");
      c.avg_mode = *m;
    }
    if (j.contains("renormalize")) c.renormalize = j.at("renormalize").get<bool>();
    if (j.contains("window")) {
      const auto& w = j.at("window");
      detail::check_known_keys(w, {"start", "end"}, "window");
      c.window_start = Quarter::parse(w.at("start").get<std::string>());
      c.window_end = Quarter::parse(w.at("end").get<std::string>());
    }
    if (j.contains("rank_metric"))
      c.rank_metric = parse_rank_metric(j.at("rank_metric").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("svg")) c.svg = j.at("svg").get<bool>();
    if (j.contains("sgns")) {
      const auto& s = j.at("sgns");
      detail::check_known_keys(
          s, {"dim", "negatives", "epochs", "lr0", "noise_power", "min_count"}, "sgns");
      if (s.contains("dim")) c.sgns.dim = s.at("dim").get<int>();
      if (s.contains("negatives")) c.sgns.negatives = s.at("negatives").get<int>();
      if (s.contains("epochs")) c.sgns.epochs = s.at("epochs").get<int>();
      if (s.contains("lr0")) c.sgns.lr0 = s.at("lr0").get<double>();
      if (s.contains("noise_power")) c.sgns.noise_power = s.at("noise_power").get<double>();
      if (s.contains("min_count")) c.sgns.min_count = s.at("min_count").get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("config: ") + e.what());
  }
  if (c.window_end < c.window_start)
    throw ContractViolation("config: window end before start");
  if (c.input.empty() || c.output_dir.empty())
    throw ContractViolation("config: input and output_dir are required");
  for (const std::string& f : c.facets) {
    if (f == "topic" || f == "cohort") continue;
    if (f.rfind("dim-", 0) == 0) {
      const std::string name = f.substr(4);
      bool found = false;
      for (const DimensionSpec& d : c.dimensions) found = found || d.name == name;
      if (!found)
        throw ContractViolation("config: facet '" + f + "' has no matching dimension");
      continue;
    }
    throw ContractViolation("config: unknown facet '" + f + "'");
  }
  c.sgns.seed = c.seed;
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ContractViolation("config: invalid JSON in " + path);
  return config_from_json(j);
}

inline void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << config_to_json(c).dump(2) << '\n';
}

}  // namespace stancekit
