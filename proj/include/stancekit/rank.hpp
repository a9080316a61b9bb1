#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/metrics.hpp"
#include "stancekit/timeseries.hpp"

namespace stancekit {

enum class RankMetric { PearsonR, Euclidean, Dtw, L1 };

inline const char* rank_metric_name(RankMetric m) {
  switch (m) {
    case RankMetric::PearsonR: return "pearson";
    case RankMetric::Euclidean: return "euclidean";
    case RankMetric::Dtw: return "dtw";
    case RankMetric::L1: return "l1";
  }
  throw ContractViolation("rank_metric_name: bad enum");
}

inline RankMetric parse_rank_metric(const std::string& s) {
  if (s == "pearson") return RankMetric::PearsonR;
  if (s == "euclidean") return RankMetric::Euclidean;
  if (s == "dtw") return RankMetric::Dtw;
  if (s == "l1") return RankMetric::L1;
  throw ContractViolation("unknown rank metric: " + s);
}

struct DriverRow {
  std::string scenario;
  SimilarityReport report;
};

struct DriverReport {
  RankMetric metric = RankMetric::L1;
  std::vector<DriverRow> rows;  // best fit first
};

namespace detail {

inline std::optional<double> rank_key(const SimilarityReport& rep, RankMetric m) {
  switch (m) {
    case RankMetric::PearsonR: return rep.pearson_r;
    case RankMetric::Euclidean: return rep.euclidean;
    case RankMetric::Dtw: return rep.dtw;
    case RankMetric::L1: return rep.l1_loss;
  }
  throw ContractViolation("rank_key: bad enum");
}

}  // namespace detail

/// Best fit first: descending r for the Pearson metric, ascending loss
/// otherwise. Rows whose ranking metric is undefined go last; ties break by
/// scenario name.
inline void sort_driver_rows(std::vector<DriverRow>& rows, RankMetric metric) {
  const bool descending = metric == RankMetric::PearsonR;
  std::stable_sort(rows.begin(), rows.end(), [&](const DriverRow& a, const DriverRow& b) {
    const auto ka = detail::rank_key(a.report, metric);
    const auto kb = detail::rank_key(b.report, metric);
    if (ka.has_value() != kb.has_value()) return ka.has_value();
    if (ka && kb && *ka != *kb) return descending ? *ka > *kb : *ka < *kb;
    return a.scenario < b.scenario;
  });
}

/// Compare each scenario series against the empirical series and rank rows
/// by fit under `metric`.
inline DriverReport rank_drivers(
    const TimeSeries& empirical,
    const std::vector<std::pair<std::string, TimeSeries>>& scenarios,
    RankMetric metric = RankMetric::L1,
    std::optional<std::pair<Quarter, Quarter>> window = std::nullopt) {
  const TimeSeries emp = window ? empirical.window(window->first, window->second) : empirical;
  DriverReport out;
  out.metric = metric;
  out.rows.reserve(scenarios.size());
  for (const auto& [name, series] : scenarios) {
    const TimeSeries s = window ? series.window(window->first, window->second) : series;
    out.rows.push_back({name, similarity(emp, s)});
  }
  sort_driver_rows(out.rows, metric);
  return out;
}

inline std::string driver_report_json(const DriverReport& rep) {
  auto opt6 = [](const std::optional<double>& v) {
    return (v && std::isfinite(*v)) ? fmt_sig6(*v) : std::string("null");
  };
  std::string out = "[";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const DriverRow& row = rep.rows[i];
    if (i) out += ", ";
    out += "{\"scenario\": \"" + row.scenario + "\"";
    out += ", \"pearson_r\": " + opt6(row.report.pearson_r);
    out += ", \"p_value\": " +
           (row.report.p_value ? fmt_sci6(*row.report.p_value) : std::string("null"));
    out += ", \"log10_p\": " + opt6(row.report.log10_p);
    out += ", \"euclidean\": " + opt6(row.report.euclidean);
    out += ", \"dtw\": " + opt6(row.report.dtw);
    out += ", \"l1_loss\": " + opt6(row.report.l1_loss);
    out += ", \"n\": " + std::to_string(row.report.n);
    out += "}";
  }
  out += "]";
  return out;
}

inline std::string driver_report_csv(const DriverReport& rep) {
  auto cell = [](const std::optional<double>& v) {
    return (v && std::isfinite(*v)) ? fmt_full(*v) : std::string();
  };
  std::string out = "scenario,pearson_r,p_value,log10_p,euclidean,dtw,l1_loss,n\n";
  for (const DriverRow& row : rep.rows) {
    require_csv_safe(row.scenario, "scenario name");
    out += row.scenario;
    out += ',' + cell(row.report.pearson_r);
    out += ',' + (row.report.p_value ? fmt_sci6(*row.report.p_value) : std::string());
    out += ',' + cell(row.report.log10_p);
    out += ',' + cell(row.report.euclidean);
    out += ',' + cell(row.report.dtw);
    out += ',' + cell(row.report.l1_loss);
    out += ',' + std::to_string(row.report.n);
    out += '\n';
  }
  return out;
}

inline std::string driver_report_table(const DriverReport& rep) {
  auto cell = [](const std::optional<double>& v) {
    return (v && std::isfinite(*v)) ? fmt_sig6(*v) : std::string("-");
  };
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"scenario", "pearson_r", "p_value", "euclidean", "dtw", "l1_loss", "n"});
  for (const DriverRow& row : rep.rows) {
    grid.push_back({row.scenario, cell(row.report.pearson_r),
                    row.report.p_value ? fmt_sci6(*row.report.p_value) : std::string("-"),
                    cell(row.report.euclidean), cell(row.report.dtw), cell(row.report.l1_loss),
                    std::to_string(row.report.n)});
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& r : grid)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (const auto& r : grid) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += "  ";
      out += r[c];
      if (c + 1 < r.size()) out.append(width[c] - r[c].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace stancekit
