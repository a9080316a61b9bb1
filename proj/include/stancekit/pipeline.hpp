#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stancekit/cohorts.hpp"
#include "stancekit/config.hpp"
#include "stancekit/embedding.hpp"
#include "stancekit/error.hpp"
#include "stancekit/events.hpp"
#include "stancekit/filter.hpp"
#include "stancekit/metrics.hpp"
#include "stancekit/panel.hpp"
#include "stancekit/rank.hpp"
#include "stancekit/scenario.hpp"
#include "stancekit/sgns.hpp"
#include "stancekit/svg.hpp"
#include "stancekit/timeseries.hpp"

namespace stancekit {

/// Exclusive ownership of an output directory for the duration of a run.
/// The lock file is removed on scope exit, including when a stage throws.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir) : path_((dir / "lock").string()) {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
      throw IoError("output directory is locked by another run (remove " + path_ +
                    " if stale)");
    std::fclose(f);
  }
  ~DirLock() { std::remove(path_.c_str()); }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::string path_;
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

struct FacetArtifacts {
  std::string name;
  Panel panel;
  TimeSeries empirical;
  TimeSeries proportion_only_series;
  TimeSeries stance_only_series;
};

struct PipelineResult {
  FilterStats filter_stats;
  long input_lines = 0;
  long unlabeled = 0;  // kept by the filter but missing valid labels
  long events = 0;
  long cohort_fallbacks = 0;
  std::vector<std::string> dropped_communities;  // from embedding training
  std::vector<std::string> dropped_authors;
  std::vector<FacetArtifacts> facets;
  DriverReport report;
};

namespace detail {

/// Wide per-group CSV: `quarter,<group>,...`. Proportions print 0 for absent
/// groups; stances print an empty field there.
inline std::string panel_wide_csv(const Panel& p, bool proportions) {
  std::string out = "quarter";
  for (const std::string& g : p.groups) {
    require_csv_safe(g, "group label");
    out += ',' + g;
  }
  out += '\n';
  for (std::size_t t = 0; t < p.grid.size(); ++t) {
    out += p.grid[t].str();
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      out += ',';
      if (proportions)
        out += fmt_full(p.proportion(g, t));
      else if (p.cells[g][t].weight > 0)
        out += fmt_full(p.cells[g][t].mean_stance);
    }
    out += '\n';
  }
  return out;
}

inline std::string scenarios_csv(const TimeSeries& empirical, const TimeSeries& prop,
                                 const TimeSeries& stance) {
  std::string out = "quarter,empirical,proportion_only,stance_only\n";
  for (std::size_t i = 0; i < empirical.quarters.size(); ++i) {
    const Quarter q = empirical.quarters[i];
    out += q.str();
    for (const TimeSeries* s : {&empirical, &prop, &stance}) {
      out += ',';
      const auto v = s->at(q);
      if (v) out += fmt_full(*v);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<std::pair<std::string, TimeSeries>> per_group_stance_series(
    const Panel& p) {
  std::vector<std::pair<std::string, TimeSeries>> out;
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    TimeSeries s;
    for (std::size_t t = 0; t < p.grid.size(); ++t) {
      if (p.cells[g][t].weight > 0)
        s.push(p.grid[t], p.cells[g][t].mean_stance);
      else
        s.push(p.grid[t], std::nullopt);
    }
    out.emplace_back(p.groups[g], std::move(s));
  }
  return out;
}

}  // namespace detail

/// Runs filter -> cohorts -> dimension scoring -> panels -> scenarios ->
/// ranking, persisting every intermediate artifact under config.output_dir.
/// A `run.partial` marker exists while the run is underway and is removed
/// only on success; reruns with identical inputs produce byte-identical
/// artifacts.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.output_dir);
  DirLock lock(out_dir);
  detail::write_text_file(out_dir / "run.partial",
                          "run in progress or failed; artifacts may be incomplete\n");

  PipelineResult res;

  // Selection: echo kept lines verbatim, parse labels from the same line.
  std::vector<CommentEvent> events;
  {
    std::ifstream in(cfg.input);
    if (!in) throw IoError("cannot open input file: " + cfg.input);
    std::ofstream kept(out_dir / "filtered.jsonl");
    if (!kept) throw IoError("cannot write filtered.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      ++res.input_lines;
      const auto raw = parse_raw_comment(line);
      if (!raw) {
        ++res.filter_stats.count(FilterReason::MalformedInput);
        continue;
      }
      const FilterDecision d = decide(*raw);
      ++res.filter_stats.count(d.reason);
      if (!d.kept) continue;
      kept << line << '\n';
      if (auto ev = parse_event(line))
        events.push_back(std::move(*ev));
      else
        ++res.unlabeled;
    }
  }
  res.events = static_cast<long>(events.size());
  detail::write_json_file(out_dir / "filter_stats.json", res.filter_stats.to_json());

  {
    std::unordered_map<std::string, int> first_activity;
    const std::unordered_map<std::string, int>* fa = nullptr;
    if (cfg.first_activity) {
      first_activity = load_first_activity(*cfg.first_activity);
      fa = &first_activity;
    }
    assign_cohorts(events, fa);
    for (const CommentEvent& e : events)
      if (e.cohort_fallback) ++res.cohort_fallbacks;
  }

  // Dimension scoring. Vectors come from a file or are trained here; either
  // way each configured dimension gets a scores CSV and a bin map.
  std::map<std::string, std::unordered_map<std::string, std::string>> bin_maps;
  bool need_embedding = !cfg.dimensions.empty();
  for (const std::string& f : cfg.facets) need_embedding |= f.rfind("dim-", 0) == 0;
  if (need_embedding) {
    EmbeddingMatrix emb;
    if (cfg.embedding) {
      emb = EmbeddingMatrix::load_file(*cfg.embedding);
    } else if (cfg.cooccurrence) {
      SgnsResult trained =
          train_embedding(read_cooccurrence_csv_file(*cfg.cooccurrence), cfg.sgns);
      emb = std::move(trained.embedding);
      res.dropped_communities = std::move(trained.dropped_communities);
      res.dropped_authors = std::move(trained.dropped_authors);
      emb.save_file((out_dir / "embedding.txt").string());
    } else {
      throw ContractViolation(
          "config: dimensions require an embedding or cooccurrence input");
    }
    for (const DimensionSpec& d : cfg.dimensions) {
      const std::vector<double> axis = build_dimension(emb, d);
      const std::vector<CommunityScore> scores = score_communities(emb, axis);
      write_scores_csv_file(scores, (out_dir / ("scores_" + d.name + ".csv")).string());
      const auto labels = d.bin_labels.empty() ? default_bin_labels(d.name) : d.bin_labels;
      bin_maps[d.name] = bin_label_map(scores, labels);
    }
  }

  // One panel and the two counterfactual worlds per requested facet.
  for (const std::string& facet_name : cfg.facets) {
    Facet facet;
    if (facet_name == "topic") {
      facet = Facet::topic(cfg.topic_weighting);
    } else if (facet_name == "cohort") {
      facet = Facet::cohort();
    } else {
      const std::string dim = facet_name.substr(4);
      facet = Facet::dimension_bin(dim, bin_maps.at(dim));
    }
    FacetArtifacts fa;
    fa.name = facet_name;
    fa.panel = build_panel(events, facet);
    fa.empirical = fa.panel.overall_series();
    fa.proportion_only_series = proportion_only(fa.panel, cfg.renormalize, cfg.avg_mode);
    fa.stance_only_series = stance_only(fa.panel, cfg.renormalize, cfg.avg_mode);

    fa.panel.write_csv_file((out_dir / ("panel_" + facet_name + ".csv")).string());
    fa.empirical.write_csv_file(
        (out_dir / ("series_" + facet_name + "_empirical.csv")).string());
    fa.proportion_only_series.write_csv_file(
        (out_dir / ("series_" + facet_name + "_proportion_only.csv")).string());
    fa.stance_only_series.write_csv_file(
        (out_dir / ("series_" + facet_name + "_stance_only.csv")).string());

    detail::write_text_file(out_dir / ("plot_" + facet_name + "_proportions.csv"),
                            detail::panel_wide_csv(fa.panel, true));
    detail::write_text_file(out_dir / ("plot_" + facet_name + "_stances.csv"),
                            detail::panel_wide_csv(fa.panel, false));
    detail::write_text_file(
        out_dir / ("plot_" + facet_name + "_scenarios.csv"),
        detail::scenarios_csv(fa.empirical, fa.proportion_only_series,
                              fa.stance_only_series));

    if (cfg.svg && !fa.panel.empty()) {
      std::vector<std::pair<std::string, std::vector<double>>> shares;
      for (std::size_t g = 0; g < fa.panel.groups.size(); ++g) {
        std::vector<double> row(fa.panel.grid.size());
        for (std::size_t t = 0; t < fa.panel.grid.size(); ++t)
          row[t] = fa.panel.proportion(g, t);
        shares.emplace_back(fa.panel.groups[g], std::move(row));
      }
      detail::write_text_file(out_dir / ("plot_" + facet_name + "_proportions.svg"),
                              svg_stacked_bars(fa.panel.grid, shares));
      detail::write_text_file(out_dir / ("plot_" + facet_name + "_stances.svg"),
                              svg_line_chart(detail::per_group_stance_series(fa.panel)));
      if (!fa.empirical.empty())
        detail::write_text_file(
            out_dir / ("plot_" + facet_name + "_scenarios.svg"),
            svg_line_chart({{"empirical", fa.empirical},
                            {"proportion-only", fa.proportion_only_series},
                            {"stance-only", fa.stance_only_series}}));
    }
    res.facets.push_back(std::move(fa));
  }

  // Platform-level stance trajectory, each comment with weight 1.
  const TimeSeries overall = overall_series(events);
  overall.write_csv_file((out_dir / "plot_overall.csv").string());
  if (cfg.svg && !overall.empty())
    detail::write_text_file(out_dir / "plot_overall.svg",
                            svg_line_chart({{"stance", overall}}));

  // Each facet's counterfactuals are scored against that facet's own
  // empirical series, then all rows are ranked together.
  res.report.metric = cfg.rank_metric;
  for (const FacetArtifacts& fa : res.facets) {
    const DriverReport part = rank_drivers(
        fa.empirical,
        {{fa.name + "/proportion-only", fa.proportion_only_series},
         {fa.name + "/stance-only", fa.stance_only_series}},
        cfg.rank_metric, std::make_pair(cfg.window_start, cfg.window_end));
    for (const DriverRow& row : part.rows) res.report.rows.push_back(row);
  }
  sort_driver_rows(res.report.rows, cfg.rank_metric);
  detail::write_text_file(out_dir / "driver_report.json",
                          driver_report_json(res.report) + "\n");
  detail::write_text_file(out_dir / "driver_report.csv", driver_report_csv(res.report));
  detail::write_text_file(out_dir / "driver_report.txt", driver_report_table(res.report));

  nlohmann::json stats;
  stats["input_lines"] = res.input_lines;
  stats["filter"] = res.filter_stats.to_json();
  stats["unlabeled"] = res.unlabeled;
  stats["events"] = res.events;
  stats["cohort_fallbacks"] = res.cohort_fallbacks;
  stats["dropped_communities"] = res.dropped_communities;
  stats["dropped_authors"] = res.dropped_authors;
  nlohmann::json facet_stats = nlohmann::json::object();
  for (const FacetArtifacts& fa : res.facets)
    facet_stats[fa.name] = {{"groups", fa.panel.groups.size()},
                            {"quarters", fa.panel.grid.size()}};
  stats["facets"] = facet_stats;
  detail::write_json_file(out_dir / "run_stats.json", stats);
  save_config(cfg, (out_dir / "config.json").string());

  fs::remove(out_dir / "run.partial");
  return res;
}

}  // namespace stancekit
