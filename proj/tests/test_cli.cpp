#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "stancekit/stancekit.hpp"

namespace fs = std::filesystem;
using namespace stancekit;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::path(STANCEKIT_TEST_TMPDIR) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir,
                  const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path out_path = dir / ("stdout." + std::to_string(counter));
  const fs::path err_path = dir / ("stderr." + std::to_string(counter));
  ++counter;
  std::string cmd = env_prefix + quoted(STANCEKIT_CLI_PATH) + " " + args + " > " +
                    quoted(out_path) + " 2> " + quoted(err_path);
  const int rc = std::system(cmd.c_str());
  CliResult res;
  res.code = (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  res.out = read_file(out_path);
  res.err = read_file(err_path);
  return res;
}

const std::string kEvents =
    R"({"id":"c01","created_utc":1390000000,"author":"alice","subreddit":"politics","body":"I back basic income pilots","stance":"supportive","topics":["pilot"]})"
    "\n"
    R"({"id":"c02","created_utc":1390000100,"author":"bob","subreddit":"Futurology","body":"UBI now","stance":"against","topics":["funding"]})"
    "\n"
    R"({"id":"c03","created_utc":1398000000,"author":"carol","subreddit":"politics","body":"basic income is flawed","stance":"against","topics":[]})"
    "\n"
    R"({"id":"c12","created_utc":1406000000,"author":"alice","subreddit":"politics","body":"more basic income talk","stance":"supportive","topics":["pilot","funding"]})"
    "\n";

TimeSeries mk_series(const std::vector<double>& vals) {
  TimeSeries s;
  Quarter q{2014, 1};
  for (double v : vals) {
    s.push(q, v);
    q = q.next();
  }
  return s;
}

}  // namespace

TEST_CASE("cli filter writes kept lines and stats") {
  const fs::path dir = fresh_dir("cli_filter");
  const std::string input =
      R"({"id":"a","created_utc":1390000000,"author":"x","subreddit":"politics","body":"basic income rocks"})"
      "\n"
      R"({"id":"b","created_utc":1390000001,"author":"x","subreddit":"politics","body":"off topic"})"
      "\n"
      "garbage\n";
  write_file(dir / "in.jsonl", input);

  const CliResult r = run_cli("filter --input " + quoted(dir / "in.jsonl") + " --output " +
                                  quoted(dir / "kept.jsonl") + " --stats " +
                                  quoted(dir / "stats.json"),
                              dir);
  REQUIRE(r.code == 0);
  CHECK(read_file(dir / "kept.jsonl") ==
        R"({"id":"a","created_utc":1390000000,"author":"x","subreddit":"politics","body":"basic income rocks"})"
        "\n");
  const json stats = json::parse(read_file(dir / "stats.json"));
  CHECK(stats["kept"] == 1);
  CHECK(stats["no_keyword"] == 1);
  CHECK(stats["malformed_input"] == 1);
  CHECK(stats["total"] == 3);

  SECTION("stdin to stdout with stats on stderr") {
    const CliResult piped =
        run_cli("filter --input - < " + quoted(dir / "in.jsonl"), dir);
    REQUIRE(piped.code == 0);
    CHECK(piped.out == read_file(dir / "kept.jsonl"));
    CHECK(json::parse(piped.err)["kept"] == 1);
  }

  SECTION("missing input file exits 2") {
    CHECK(run_cli("filter --input " + quoted(dir / "nope.jsonl"), dir).code == 2);
  }
}

TEST_CASE("cli panel aggregates events by facet") {
  const fs::path dir = fresh_dir("cli_panel");
  write_file(dir / "events.jsonl", kEvents);

  const CliResult r = run_cli("panel --input " + quoted(dir / "events.jsonl") +
                                  " --facet topic --output " + quoted(dir / "panel.csv"),
                              dir);
  REQUIRE(r.code == 0);
  const Panel panel = Panel::read_csv_file((dir / "panel.csv").string());
  CHECK(panel.groups == std::vector<std::string>{"None", "funding", "pilot"});
  CHECK(panel.grid.size() == 3);

  SECTION("occurrence weighting changes cell weights") {
    const CliResult occ = run_cli("panel --input " + quoted(dir / "events.jsonl") +
                                      " --facet topic --weighting occurrence --output " +
                                      quoted(dir / "panel_occ.csv"),
                                  dir);
    REQUIRE(occ.code == 0);
    const Panel p = Panel::read_csv_file((dir / "panel_occ.csv").string());
    const int gi = p.group_index("pilot");
    REQUIRE(gi >= 0);
    CHECK(p.cells[gi][2].weight == 1.0);  // fractional would give 0.5
  }

  SECTION("cohort facet uses the first-activity map") {
    write_file(dir / "fa.json", R"({"alice": 2009})");
    const CliResult coh = run_cli("panel --input " + quoted(dir / "events.jsonl") +
                                      " --facet cohort --first-activity " +
                                      quoted(dir / "fa.json") + " --output " +
                                      quoted(dir / "panel_cohort.csv"),
                                  dir);
    REQUIRE(coh.code == 0);
    const Panel p = Panel::read_csv_file((dir / "panel_cohort.csv").string());
    CHECK(p.groups == std::vector<std::string>{"2009", "2014"});
  }

  SECTION("dim facet requires scores") {
    CHECK(run_cli("panel --input " + quoted(dir / "events.jsonl") + " --facet dim-lean",
                  dir)
              .code == 1);
  }

  SECTION("unknown facet exits 1") {
    CHECK(run_cli("panel --input " + quoted(dir / "events.jsonl") + " --facet vibes", dir)
              .code == 1);
  }
}

TEST_CASE("cli scenario matches the library evaluation") {
  const fs::path dir = fresh_dir("cli_scenario");
  write_file(dir / "events.jsonl", kEvents);
  REQUIRE(run_cli("panel --input " + quoted(dir / "events.jsonl") +
                      " --facet topic --output " + quoted(dir / "panel.csv"),
                  dir)
              .code == 0);
  const Panel panel = Panel::read_csv_file((dir / "panel.csv").string());

  for (const std::string mode : {"proportion-only", "stance-only", "empirical", "fixed"}) {
    const CliResult r = run_cli("scenario --panel " + quoted(dir / "panel.csv") +
                                    " --mode " + mode + " --output " +
                                    quoted(dir / (mode + ".csv")),
                                dir);
    REQUIRE(r.code == 0);
    const auto parsed = parse_mode(mode);
    REQUIRE(parsed.has_value());
    const TimeSeries expected =
        uniform_world(panel, *parsed, std::nullopt, AvgMode::QuarterMean);
    std::ostringstream want;
    expected.write_csv(want);
    CHECK(read_file(dir / (mode + ".csv")) == want.str());
  }

  SECTION("renormalize flags conflict") {
    CHECK(run_cli("scenario --panel " + quoted(dir / "panel.csv") +
                      " --mode fixed --renormalize --no-renormalize",
                  dir)
              .code == 1);
  }

  SECTION("explicit no-renormalize changes the series") {
    const CliResult r = run_cli("scenario --panel " + quoted(dir / "panel.csv") +
                                    " --mode stance-only --no-renormalize --output " +
                                    quoted(dir / "so_raw.csv"),
                                dir);
    REQUIRE(r.code == 0);
    std::ostringstream want;
    stance_only(panel, false, AvgMode::QuarterMean).write_csv(want);
    CHECK(read_file(dir / "so_raw.csv") == want.str());
  }

  SECTION("pooled averages are honored") {
    const CliResult r = run_cli("scenario --panel " + quoted(dir / "panel.csv") +
                                    " --mode fixed --avg pooled --output " +
                                    quoted(dir / "fx_pooled.csv"),
                                dir);
    REQUIRE(r.code == 0);
    std::ostringstream want;
    fixed_world(panel, std::nullopt, AvgMode::Pooled).write_csv(want);
    CHECK(read_file(dir / "fx_pooled.csv") == want.str());
  }

  SECTION("unknown mode exits 1") {
    CHECK(run_cli("scenario --panel " + quoted(dir / "panel.csv") + " --mode wat", dir)
              .code == 1);
  }
}

TEST_CASE("cli rank orders scenarios") {
  const fs::path dir = fresh_dir("cli_rank");
  mk_series({1, 2, 3}).write_csv_file((dir / "emp.csv").string());
  mk_series({1, 2, 3.5}).write_csv_file((dir / "near.csv").string());
  mk_series({9, 9, 3}).write_csv_file((dir / "far.csv").string());

  const std::string common = "rank --empirical " + quoted(dir / "emp.csv") +
                             " --scenario near=" + (dir / "near.csv").string() +
                             " --scenario far=" + (dir / "far.csv").string();

  const CliResult r = run_cli(common + " --metric l1 --format json", dir);
  REQUIRE(r.code == 0);
  const json rows = json::parse(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["scenario"] == "near");
  CHECK(rows[1]["scenario"] == "far");

  SECTION("csv and table formats") {
    const CliResult csv = run_cli(common + " --format csv", dir);
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("scenario,pearson_r,p_value,log10_p,euclidean,dtw,l1_loss,n\n",
                        0) == 0);
    CHECK(csv.out.find("\nnear,") != std::string::npos);

    const CliResult table = run_cli(common + " --format table", dir);
    REQUIRE(table.code == 0);
    CHECK(table.out.find("near") != std::string::npos);
    CHECK(table.out.find("far") != std::string::npos);
  }

  SECTION("a window reorders the result") {
    const CliResult windowed =
        run_cli(common + " --window 2014Q3:2014Q3 --format json", dir);
    REQUIRE(windowed.code == 0);
    const json w = json::parse(windowed.out);
    CHECK(w[0]["scenario"] == "far");  // exact match on the only windowed quarter
    CHECK(w[0]["n"] == 1);
  }

  SECTION("bad inputs exit 1, missing files exit 2") {
    CHECK(run_cli("rank --empirical " + quoted(dir / "emp.csv") + " --scenario near",
                  dir)
              .code == 1);
    CHECK(run_cli(common + " --metric sine", dir).code == 1);
    CHECK(run_cli(common + " --format yaml", dir).code == 1);
    CHECK(run_cli(common + " --window 2014Q9:2015Q1", dir).code == 1);
    CHECK(run_cli("rank --empirical " + quoted(dir / "gone.csv") +
                      " --scenario near=" + (dir / "near.csv").string(),
                  dir)
              .code == 2);
  }
}

TEST_CASE("cli compare reports similarity") {
  const fs::path dir = fresh_dir("cli_compare");
  mk_series({1, 2, 3}).write_csv_file((dir / "a.csv").string());
  mk_series({1, 2, 4}).write_csv_file((dir / "b.csv").string());

  const CliResult r = run_cli(
      "compare --a " + quoted(dir / "a.csv") + " --b " + quoted(dir / "b.csv"), dir);
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["n"] == 3);
  CHECK(rep["pearson_r"].get<double>() == Catch::Approx(0.9819805060619657));
  CHECK(rep["l1_loss"].get<double>() == 1.0);

  CHECK(run_cli("compare --a " + quoted(dir / "a.csv") + " --b " + quoted(dir / "x.csv"),
                dir)
            .code == 2);
}

TEST_CASE("cli dims train and score round-trip") {
  const fs::path dir = fresh_dir("cli_dims");
  write_file(dir / "cooc.csv", "community,author,count\n"
                               "politics,a1,5\npolitics,a2,5\n"
                               "Futurology,a1,5\nFuturology,a3,5\n"
                               "economics,a2,5\nRainbow6,a3,5\n");

  const std::string train_common = "dims train --pairs " + quoted(dir / "cooc.csv") +
                                   " --dim 8 --epochs 1 --output ";
  REQUIRE(run_cli("--seed 7 " + train_common + quoted(dir / "emb_a.txt"), dir).code == 0);
  REQUIRE(run_cli("--seed 7 " + train_common + quoted(dir / "emb_b.txt"), dir).code == 0);
  REQUIRE(run_cli("--seed 8 " + train_common + quoted(dir / "emb_c.txt"), dir).code == 0);

  CHECK(read_file(dir / "emb_a.txt") == read_file(dir / "emb_b.txt"));
  CHECK(read_file(dir / "emb_a.txt") != read_file(dir / "emb_c.txt"));

  const EmbeddingMatrix emb = EmbeddingMatrix::load_file((dir / "emb_a.txt").string());
  CHECK(emb.dim == 8);
  CHECK(emb.names.size() == 4);

  SECTION("score writes a percentile-binned csv") {
    const CliResult r = run_cli("dims score --embedding " + quoted(dir / "emb_a.txt") +
                                    " --name lean --pair politics:Futurology --output " +
                                    quoted(dir / "scores.csv"),
                                dir);
    REQUIRE(r.code == 0);
    const auto scores = read_scores_csv_file((dir / "scores.csv").string());
    REQUIRE(scores.size() == 4);
    CHECK(scores.front().percentile == 0.0);
    CHECK(scores.back().percentile == 100.0);
  }

  SECTION("bad pair syntax and missing seeds exit 1") {
    CHECK(run_cli("dims score --embedding " + quoted(dir / "emb_a.txt") +
                      " --name lean --pair politics",
                  dir)
              .code == 1);
    CHECK(run_cli("dims score --embedding " + quoted(dir / "emb_a.txt") +
                      " --name lean --pair nowhere:Futurology",
                  dir)
              .code == 1);
  }

  SECTION("min-count that drops everything exits 1") {
    CHECK(run_cli("dims train --pairs " + quoted(dir / "cooc.csv") +
                      " --min-count 1000 --output " + quoted(dir / "emb_x.txt"),
                  dir)
              .code == 1);
  }
}

TEST_CASE("cli run executes the pipeline and report summarizes it") {
  const fs::path dir = fresh_dir("cli_run");
  write_file(dir / "input.jsonl", kEvents);
  RunConfig cfg;
  cfg.input = (dir / "input.jsonl").string();
  cfg.output_dir = (dir / "out").string();
  save_config(cfg, (dir / "config.json").string());

  const CliResult r = run_cli("run --config " + quoted(dir / "config.json"), dir);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("input lines: 4") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "driver_report.json"));

  SECTION("quiet run prints nothing") {
    fs::remove_all(dir / "out");
    const CliResult q = run_cli("run --quiet --config " + quoted(dir / "config.json"), dir);
    REQUIRE(q.code == 0);
    CHECK(q.out.empty());
  }

  SECTION("config path can come from the environment") {
    fs::remove_all(dir / "out2");
    const CliResult env =
        run_cli("run --quiet --output-dir " + quoted(dir / "out2"), dir,
                "STANCEKIT_CONFIG=" + quoted(dir / "config.json") + " ");
    REQUIRE(env.code == 0);
    CHECK(fs::exists(dir / "out2" / "run_stats.json"));
  }

  SECTION("report prints the run summary") {
    const CliResult rep = run_cli("report --run " + quoted(dir / "out"), dir);
    REQUIRE(rep.code == 0);
    CHECK(rep.out.find("input lines: 4") != std::string::npos);
    CHECK(rep.out.find("facet topic:") != std::string::npos);
    CHECK(rep.out.find("scenario") != std::string::npos);
  }

  SECTION("report on a missing directory exits 2") {
    CHECK(run_cli("report --run " + quoted(dir / "missing"), dir).code == 2);
  }

  SECTION("run without a config exits 1") {
    CHECK(run_cli("run --quiet", dir).code == 1);
  }

  SECTION("run with a missing config file exits 2") {
    CHECK(run_cli("run --config " + quoted(dir / "absent.json"), dir).code == 2);
  }
}

TEST_CASE("cli rejects bad invocations") {
  const fs::path dir = fresh_dir("cli_bad");
  CHECK(run_cli("frobnicate", dir).code == 1);
  CHECK(run_cli("", dir).code == 1);
  CHECK(run_cli("filter --input - --bogus-flag 2", dir).code == 1);
  const CliResult help = run_cli("--help", dir);
  CHECK(help.code == 0);
  CHECK(help.out.find("filter") != std::string::npos);
}
