// stancekit: decompose stance change in a labeled comment corpus into
// group-mix and within-group drivers, with community social-dimension
// scoring and time-series driver ranking.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <stancekit/stancekit.hpp>

namespace sk = stancekit;

namespace {

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw sk::IoError("cannot write file: " + path);
  out << content;
  if (!out) throw sk::IoError("write failed: " + path);
}

sk::EventLoadResult load_events_arg(const std::string& path) {
  if (path == "-") return sk::load_events(std::cin);
  return sk::load_events_file(path);
}

std::optional<bool> tri_state(bool on, bool off) {
  if (on && off) throw sk::ContractViolation("--renormalize conflicts with --no-renormalize");
  if (on) return true;
  if (off) return false;
  return std::nullopt;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string series_csv(const sk::TimeSeries& s) {
  std::ostringstream out;
  s.write_csv(out);
  return out.str();
}

struct FilterArgs {
  std::string input;
  std::string output = "-";
  std::string stats;
};

int cmd_filter(const FilterArgs& a) {
  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    file_in.open(a.input);
    if (!file_in) throw sk::IoError("cannot open input file: " + a.input);
    in = &file_in;
  }
  sk::FilterStats stats;
  if (a.output == "-") {
    stats = sk::filter_lines(*in, std::cout);
  } else {
    std::ofstream out(a.output);
    if (!out) throw sk::IoError("cannot write file: " + a.output);
    stats = sk::filter_lines(*in, out);
  }
  const std::string doc = stats.to_json().dump(2) + "\n";
  if (a.stats.empty())
    std::cerr << doc;
  else
    write_output(a.stats, doc);
  return 0;
}

struct PanelArgs {
  std::string input;
  std::string facet = "topic";
  std::string weighting = "fractional";
  std::string first_activity;
  std::string scores;
  std::vector<std::string> labels;
  std::string output = "-";
};

int cmd_panel(const PanelArgs& a) {
  sk::EventLoadResult loaded = load_events_arg(a.input);
  if (loaded.malformed > 0)
    std::cerr << "skipped " << loaded.malformed << " malformed event line(s)\n";

  sk::Facet facet;
  if (a.facet == "topic") {
    auto w = sk::parse_topic_weighting(a.weighting);
    if (!w) throw sk::ContractViolation("unknown weighting: " + a.weighting);
    facet = sk::Facet::topic(*w);
  } else if (a.facet == "cohort") {
    std::unordered_map<std::string, int> fa;
    const std::unordered_map<std::string, int>* fap = nullptr;
    if (!a.first_activity.empty()) {
      fa = sk::load_first_activity(a.first_activity);
      fap = &fa;
    }
    sk::assign_cohorts(loaded.events, fap);
    facet = sk::Facet::cohort();
  } else if (a.facet.rfind("dim-", 0) == 0) {
    if (a.scores.empty())
      throw sk::ContractViolation("facet " + a.facet + " requires --scores");
    const auto scores = sk::read_scores_csv_file(a.scores);
    const std::string name = a.facet.substr(4);
    const auto labels = a.labels.empty() ? sk::default_bin_labels(name) : a.labels;
    facet = sk::Facet::dimension_bin(name, sk::bin_label_map(scores, labels));
  } else {
    throw sk::ContractViolation("unknown facet: " + a.facet);
  }

  const sk::Panel panel = sk::build_panel(loaded.events, facet);
  std::ostringstream out;
  panel.write_csv(out);
  write_output(a.output, out.str());
  return 0;
}

struct ScenarioArgs {
  std::string panel;
  std::string mode;
  bool renorm_on = false;
  bool renorm_off = false;
  std::string avg = "quarter-mean";
  std::string output = "-";
};

int cmd_scenario(const ScenarioArgs& a) {
  const sk::Panel panel = sk::Panel::read_csv_file(a.panel);
  const auto mode = sk::parse_mode(a.mode);
  if (!mode) throw sk::ContractViolation("unknown mode: " + a.mode);
  const auto avg = sk::parse_avg_mode(a.avg);
  if (!avg) throw sk::ContractViolation("unknown avg mode: " + a.avg);
  const sk::TimeSeries series =
      sk::uniform_world(panel, *mode, tri_state(a.renorm_on, a.renorm_off), *avg);
  write_output(a.output, series_csv(series));
  return 0;
}

struct RankArgs {
  std::string empirical;
  std::vector<std::string> scenarios;
  std::string metric = "l1";
  std::string window;
  std::string format = "json";
  std::string output = "-";
};

int cmd_rank(const RankArgs& a) {
  const sk::TimeSeries empirical = sk::TimeSeries::read_csv_file(a.empirical);
  std::vector<std::pair<std::string, sk::TimeSeries>> scenarios;
  for (const std::string& spec : a.scenarios) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw sk::ContractViolation("--scenario expects <name>=<path>: '" + spec + "'");
    scenarios.emplace_back(spec.substr(0, eq),
                           sk::TimeSeries::read_csv_file(spec.substr(eq + 1)));
  }
  std::optional<std::pair<sk::Quarter, sk::Quarter>> window;
  if (!a.window.empty()) {
    const auto parts = split_on(a.window, ':');
    if (parts.size() != 2)
      throw sk::ContractViolation("--window expects <start>:<end>, e.g. 2014Q1:2022Q2");
    window = std::make_pair(sk::Quarter::parse(parts[0]), sk::Quarter::parse(parts[1]));
    if (window->second < window->first)
      throw sk::ContractViolation("--window end before start");
  }
  const sk::DriverReport report =
      sk::rank_drivers(empirical, scenarios, sk::parse_rank_metric(a.metric), window);
  if (a.format == "json")
    write_output(a.output, sk::driver_report_json(report) + "\n");
  else if (a.format == "csv")
    write_output(a.output, sk::driver_report_csv(report));
  else if (a.format == "table")
    write_output(a.output, sk::driver_report_table(report));
  else
    throw sk::ContractViolation("unknown format: " + a.format);
  return 0;
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::string output = "-";
};

int cmd_compare(const CompareArgs& args) {
  const sk::TimeSeries a = sk::TimeSeries::read_csv_file(args.a);
  const sk::TimeSeries b = sk::TimeSeries::read_csv_file(args.b);
  write_output(args.output, sk::similarity_json(sk::similarity(a, b)) + "\n");
  return 0;
}

struct DimsTrainArgs {
  std::string pairs;
  std::string output;
  sk::SgnsParams params;
};

int cmd_dims_train(const DimsTrainArgs& a) {
  const sk::SgnsResult result =
      sk::train_embedding(sk::read_cooccurrence_csv_file(a.pairs), a.params);
  result.embedding.save_file(a.output);
  if (!result.dropped_communities.empty() || !result.dropped_authors.empty()) {
    std::cerr << "dropped below min count: " << result.dropped_communities.size()
              << " community(ies), " << result.dropped_authors.size() << " author(s)\n";
    for (const auto& c : result.dropped_communities) std::cerr << "  community " << c << '\n';
    for (const auto& u : result.dropped_authors) std::cerr << "  author " << u << '\n';
  }
  return 0;
}

struct DimsScoreArgs {
  std::string embedding;
  std::string name;
  std::vector<std::string> pairs;
  std::string output = "-";
};

int cmd_dims_score(const DimsScoreArgs& a) {
  const sk::EmbeddingMatrix emb = sk::EmbeddingMatrix::load_file(a.embedding);
  sk::DimensionSpec spec;
  spec.name = a.name;
  for (const std::string& p : a.pairs) {
    const auto parts = split_on(p, ':');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
      throw sk::ContractViolation("--pair expects <negative>:<positive>: '" + p + "'");
    spec.pairs.emplace_back(parts[0], parts[1]);
  }
  const auto scores = sk::score_communities(emb, sk::build_dimension(emb, spec));
  std::ostringstream out;
  sk::write_scores_csv(scores, out);
  write_output(a.output, out.str());
  return 0;
}

struct RunArgs {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  if (a.config.empty())
    throw sk::ContractViolation(
        "run needs a config: pass --config or set STANCEKIT_CONFIG");
  sk::RunConfig cfg = sk::load_config(a.config);
  if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
  if (a.seed) {
    cfg.seed = *a.seed;
    cfg.sgns.seed = *a.seed;
  }
  const sk::PipelineResult result = sk::run_pipeline(cfg);
  if (!a.quiet) {
    std::cout << "input lines: " << result.input_lines << "\n"
              << "kept: " << result.filter_stats.count(sk::FilterReason::Kept)
              << " (events " << result.events << ", unlabeled " << result.unlabeled
              << ")\n"
              << "artifacts: " << cfg.output_dir << "\n\n"
              << sk::driver_report_table(result.report);
  }
  return 0;
}

struct ReportArgs {
  std::string run_dir;
};

int cmd_report(const ReportArgs& a) {
  const std::string stats_path = a.run_dir + "/run_stats.json";
  std::ifstream stats_in(stats_path);
  if (!stats_in) throw sk::IoError("cannot open " + stats_path);
  nlohmann::json stats = nlohmann::json::parse(stats_in, nullptr, false);
  if (stats.is_discarded())
    throw sk::ContractViolation("invalid JSON in " + stats_path);

  std::cout << "input lines: " << stats.value("input_lines", 0L) << "\n"
            << "events: " << stats.value("events", 0L) << " (unlabeled "
            << stats.value("unlabeled", 0L) << ", cohort fallbacks "
            << stats.value("cohort_fallbacks", 0L) << ")\n";
  if (stats.contains("facets"))
    for (auto it = stats["facets"].begin(); it != stats["facets"].end(); ++it)
      std::cout << "facet " << it.key() << ": " << it.value().value("groups", 0)
                << " group(s) over " << it.value().value("quarters", 0) << " quarter(s)\n";

  const std::string table_path = a.run_dir + "/driver_report.txt";
  std::ifstream table_in(table_path);
  if (!table_in) throw sk::IoError("cannot open " + table_path);
  std::cout << '\n' << table_in.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stance-change driver decomposition toolkit"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "seed for every randomized stage")->expected(1);

  FilterArgs filter_args;
  auto* filter = app.add_subcommand("filter", "select on-topic comments from an NDJSON dump");
  filter->add_option("--input", filter_args.input, "NDJSON file, - for stdin")->required();
  filter->add_option("--output", filter_args.output, "kept lines, - for stdout");
  filter->add_option("--stats", filter_args.stats,
                     "write reason counts JSON here instead of stderr");

  PanelArgs panel_args;
  auto* panel = app.add_subcommand("panel", "aggregate labeled events into a facet panel");
  panel->add_option("--input", panel_args.input, "labeled events NDJSON, - for stdin")
      ->required();
  panel->add_option("--facet", panel_args.facet, "topic, cohort, or dim-<name>")->required();
  panel->add_option("--weighting", panel_args.weighting,
                    "topic weighting: fractional or occurrence");
  panel->add_option("--first-activity", panel_args.first_activity,
                    "author -> first year JSON for the cohort facet");
  panel->add_option("--scores", panel_args.scores, "scores CSV for a dim- facet");
  panel->add_option("--labels", panel_args.labels, "five bin labels, lowest first")
      ->delimiter(',');
  panel->add_option("--output", panel_args.output, "panel CSV, - for stdout");

  ScenarioArgs scenario_args;
  auto* scenario = app.add_subcommand("scenario", "evaluate a counterfactual world");
  scenario->add_option("--panel", scenario_args.panel, "panel CSV")->required();
  scenario
      ->add_option("--mode", scenario_args.mode,
                   "proportion-only, stance-only, empirical, or fixed")
      ->required();
  scenario->add_flag("--renormalize", scenario_args.renorm_on,
                     "rescale effective proportions to sum to 1");
  scenario->add_flag("--no-renormalize", scenario_args.renorm_off,
                     "never rescale (default: rescale iff the panel has absences)");
  scenario->add_option("--avg", scenario_args.avg, "quarter-mean or pooled time averages");
  scenario->add_option("--output", scenario_args.output, "series CSV, - for stdout");

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank", "rank scenario series against the empirical one");
  rank->add_option("--empirical", rank_args.empirical, "empirical series CSV")->required();
  rank->add_option("--scenario", rank_args.scenarios, "<name>=<series.csv>, repeatable")
      ->required();
  rank->add_option("--metric", rank_args.metric, "l1, pearson, euclidean, or dtw");
  rank->add_option("--window", rank_args.window, "<start>:<end>, e.g. 2014Q1:2022Q2");
  rank->add_option("--format", rank_args.format, "json, csv, or table");
  rank->add_option("--output", rank_args.output, "report path, - for stdout");

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "similarity report for two series");
  compare->add_option("--a", compare_args.a, "first series CSV")->required();
  compare->add_option("--b", compare_args.b, "second series CSV")->required();
  compare->add_option("--output", compare_args.output, "report path, - for stdout");

  auto* dims = app.add_subcommand("dims", "community social dimensions");
  dims->require_subcommand(1);
  DimsTrainArgs train_args;
  auto* train = dims->add_subcommand("train", "train community vectors from author pairs");
  train->add_option("--pairs", train_args.pairs, "community,author,count CSV")->required();
  train->add_option("--output", train_args.output, "embedding text file")->required();
  train->add_option("--dim", train_args.params.dim, "vector dimensionality");
  train->add_option("--negatives", train_args.params.negatives, "negative samples per pair");
  train->add_option("--epochs", train_args.params.epochs, "passes over the pair mass");
  train->add_option("--lr0", train_args.params.lr0, "initial step size");
  train->add_option("--noise-power", train_args.params.noise_power,
                    "noise distribution exponent");
  train->add_option("--min-count", train_args.params.min_count,
                    "drop communities/authors below this total count");

  DimsScoreArgs score_args;
  auto* score = dims->add_subcommand("score", "score communities along a seed-pair dimension");
  score->add_option("--embedding", score_args.embedding, "embedding text file")->required();
  score->add_option("--name", score_args.name, "dimension name")->required();
  score->add_option("--pair", score_args.pairs, "<negative>:<positive>, repeatable")
      ->required();
  score->add_option("--output", score_args.output, "scores CSV, - for stdout");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "execute the full pipeline from a config");
  run->add_option("--config", run_args.config, "pipeline config JSON")
      ->envname("STANCEKIT_CONFIG");
  run->add_option("--output-dir", run_args.output_dir, "override the config output_dir");
  run->add_flag("--quiet", run_args.quiet, "suppress the stdout summary");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "summarize a finished run directory");
  report->add_option("--run", report_args.run_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed() && seed) train_args.params.seed = *seed;
    run_args.seed = seed;
    if (filter->parsed()) return cmd_filter(filter_args);
    if (panel->parsed()) return cmd_panel(panel_args);
    if (scenario->parsed()) return cmd_scenario(scenario_args);
    if (rank->parsed()) return cmd_rank(rank_args);
    if (compare->parsed()) return cmd_compare(compare_args);
    if (dims->parsed()) {
      if (train->parsed()) return cmd_dims_train(train_args);
      if (score->parsed()) return cmd_dims_score(score_args);
    }
    if (run->parsed()) return cmd_run(run_args);
    if (report->parsed()) return cmd_report(report_args);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const sk::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
