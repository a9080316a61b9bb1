#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/events.hpp"
#include "stancekit/quarter.hpp"
#include "stancekit/text.hpp"
#include "stancekit/timeseries.hpp"

namespace stancekit {

enum class FacetKind { Topic, Cohort, DimensionBin };

/// Fractional spreads one event across its k topic labels with weight 1/k
/// each, so per-quarter proportions sum to 1. Occurrence gives every label
/// weight 1, so the quarter total is the label count.
enum class TopicWeighting { Fractional, Occurrence };

/// Averaging convention for the per-group time averages: the unweighted mean
/// of the quarterly values, or one pooled ratio over all comments.
enum class AvgMode { QuarterMean, Pooled };

inline const char* avg_mode_name(AvgMode m) {
  return m == AvgMode::QuarterMean ? "quarter-mean" : "pooled";
}

inline std::optional<AvgMode> parse_avg_mode(std::string_view s) {
  if (s == "quarter-mean") return AvgMode::QuarterMean;
  if (s == "pooled") return AvgMode::Pooled;
  return std::nullopt;
}

inline const char* topic_weighting_name(TopicWeighting w) {
  return w == TopicWeighting::Fractional ? "fractional" : "occurrence";
}

inline std::optional<TopicWeighting> parse_topic_weighting(std::string_view s) {
  if (s == "fractional") return TopicWeighting::Fractional;
  if (s == "occurrence") return TopicWeighting::Occurrence;
  return std::nullopt;
}

inline constexpr const char* kNoneGroup = "None";
inline constexpr const char* kUnknownGroup = "Unknown";

/// How events are partitioned into groups: by topic label, by author cohort
/// year, or by a community's social-dimension bin.
struct Facet {
  FacetKind kind = FacetKind::Topic;
  TopicWeighting weighting = TopicWeighting::Fractional;
  std::string dimension;  // DimensionBin only
  std::unordered_map<std::string, std::string> community_bins;  // DimensionBin only

  static Facet topic(TopicWeighting w = TopicWeighting::Fractional) {
    Facet f;
    f.kind = FacetKind::Topic;
    f.weighting = w;
    return f;
  }

  static Facet cohort() {
    Facet f;
    f.kind = FacetKind::Cohort;
    return f;
  }

  static Facet dimension_bin(std::string name,
                             std::unordered_map<std::string, std::string> bins) {
    Facet f;
    f.kind = FacetKind::DimensionBin;
    f.dimension = std::move(name);
    f.community_bins = std::move(bins);
    return f;
  }

  std::string name() const {
    switch (kind) {
      case FacetKind::Topic: return "topic";
      case FacetKind::Cohort: return "cohort";
      case FacetKind::DimensionBin: return "dim-" + dimension;
    }
    return "?";
  }

  /// Group contributions of one event as (label, weight in twelfths).
  /// Twelfths keep fractional topic weights exact (k <= 4 labels), which
  /// makes panel cells independent of event order.
  std::vector<std::pair<std::string, int>> contributions(const CommentEvent& e) const {
    switch (kind) {
      case FacetKind::Topic: {
        if (e.topics.empty()) return {{kNoneGroup, 12}};
        const int w = weighting == TopicWeighting::Fractional
                          ? 12 / static_cast<int>(e.topics.size())
                          : 12;
        std::vector<std::pair<std::string, int>> out;
        out.reserve(e.topics.size());
        for (const auto& t : e.topics) out.emplace_back(t, w);
        return out;
      }
      case FacetKind::Cohort: {
        if (!e.cohort_assigned)
          throw ContractViolation("cohort facet requires assign_cohorts to have run");
        if (!e.cohort) return {{kUnknownGroup, 12}};
        return {{std::to_string(*e.cohort), 12}};
      }
      case FacetKind::DimensionBin: {
        auto it = community_bins.find(e.community);
        if (it == community_bins.end()) return {{kUnknownGroup, 12}};
        return {{it->second, 12}};
      }
    }
    return {};
  }
};

/// Per-(quarter, group) aggregate plus per-group time averages: the inputs
/// to every counterfactual scenario.
struct Panel {
  struct Cell {
    double weight = 0;       // 0 == group absent this quarter
    double mean_stance = 0;  // defined only when weight > 0
    long n = 0;
  };

  struct GroupAverages {
    double p_bar = 0;                // over all grid quarters, absences count 0
    std::optional<double> l_bar;     // over present quarters; nullopt if never present
  };

  std::string facet;
  std::vector<Quarter> grid;        // consecutive quarters, may be empty
  std::vector<std::string> groups;  // sorted unique
  std::vector<std::vector<Cell>> cells;  // [group][quarter]

  bool empty() const { return grid.empty(); }

  int quarter_index(Quarter q) const {
    if (grid.empty()) return -1;
    const int idx = q.index() - grid.front().index();
    return (idx >= 0 && idx < static_cast<int>(grid.size())) ? idx : -1;
  }

  int group_index(std::string_view g) const {
    auto it = std::lower_bound(groups.begin(), groups.end(), g);
    if (it == groups.end() || *it != g) return -1;
    return static_cast<int>(it - groups.begin());
  }

  double total_weight(std::size_t t) const {
    double total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) total += cells[g][t].weight;
    return total;
  }

  /// P_t(g); zero when the group (or the whole quarter) is empty.
  double proportion(std::size_t g, std::size_t t) const {
    const double total = total_weight(t);
    return total > 0 ? cells[g][t].weight / total : 0.0;
  }

  bool has_absences() const {
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t t = 0; t < grid.size(); ++t)
        if (!(cells[g][t].weight > 0)) return true;
    return false;
  }

  /// Per-quarter platform stance: sum over groups of P_t(g) * L_t(g).
  /// An empty quarter is a gap, never zero.
  TimeSeries overall_series() const {
    TimeSeries s;
    for (std::size_t t = 0; t < grid.size(); ++t) {
      const double total = total_weight(t);
      if (!(total > 0)) {
        s.push(grid[t], std::nullopt);
        continue;
      }
      double v = 0;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const Cell& c = cells[g][t];
        if (c.weight > 0) v += (c.weight / total) * c.mean_stance;
      }
      s.push(grid[t], v);
    }
    return s;
  }

  /// Sparse export; only present cells are written. The grid is recovered on
  /// load as the consecutive span between the first and last quarter seen.
  void write_csv(std::ostream& out) const {
    out << "quarter,group,weight,proportion,mean_stance,n\n";
    for (std::size_t t = 0; t < grid.size(); ++t) {
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const Cell& c = cells[g][t];
        if (!(c.weight > 0)) continue;
        require_csv_safe(groups[g], "group label");
        out << grid[t].str() << ',' << groups[g] << ',' << fmt_full(c.weight) << ','
            << fmt_full(proportion(g, t)) << ',' << fmt_full(c.mean_stance) << ',' << c.n
            << '\n';
      }
    }
  }

  void write_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write panel file: " + path);
    write_csv(out);
  }

  static Panel read_csv(std::istream& in, const std::string& what = "panel") {
    struct Row {
      Quarter q;
      std::string group;
      double weight;
      double mean;
      long n;
    };
    std::vector<Row> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (first) {
        first = false;
        if (line.rfind("quarter,", 0) == 0) continue;
      }
      auto f = split_csv_line(line);
      if (f.size() != 6)
        throw ContractViolation("bad " + what + " row: '" + line + "'");
      rows.push_back({Quarter::parse(f[0]), f[1], parse_double_field(f[2], what),
                      parse_double_field(f[4], what),
                      static_cast<long>(parse_int_field(f[5], what))});
    }
    Panel p;
    if (rows.empty()) return p;
    int lo = rows.front().q.index(), hi = lo;
    std::set<std::string> groups;
    for (const Row& r : rows) {
      lo = std::min(lo, r.q.index());
      hi = std::max(hi, r.q.index());
      groups.insert(r.group);
    }
    for (int i = lo; i <= hi; ++i) p.grid.push_back(Quarter::from_index(i));
    p.groups.assign(groups.begin(), groups.end());
    p.cells.assign(p.groups.size(), std::vector<Cell>(p.grid.size()));
    for (const Row& r : rows) {
      const int g = p.group_index(r.group);
      const int t = p.quarter_index(r.q);
      Cell& c = p.cells[g][t];
      if (c.n != 0 || c.weight != 0)
        throw ContractViolation(what + ": duplicate cell " + r.q.str() + "/" + r.group);
      c.weight = r.weight;
      c.mean_stance = r.mean;
      c.n = r.n;
    }
    return p;
  }

  static Panel read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open panel file: " + path);
    return read_csv(in, path);
  }
};

/// Aggregates labeled events into a panel. Accumulation is exact integer
/// arithmetic in twelfths, so any permutation of the input yields identical
/// cells. Empty input yields an empty panel.
inline Panel build_panel(const std::vector<CommentEvent>& events, const Facet& facet) {
  Panel p;
  p.facet = facet.name();
  if (events.empty()) return p;

  int lo = events.front().quarter.index(), hi = lo;
  for (const CommentEvent& e : events) {
    lo = std::min(lo, e.quarter.index());
    hi = std::max(hi, e.quarter.index());
  }
  for (int i = lo; i <= hi; ++i) p.grid.push_back(Quarter::from_index(i));

  struct Acc {
    std::int64_t weight12 = 0;
    std::int64_t stance12 = 0;
    long n = 0;
  };
  std::map<std::string, std::vector<Acc>> acc;
  for (const CommentEvent& e : events) {
    const int t = e.quarter.index() - lo;
    for (const auto& [group, w12] : facet.contributions(e)) {
      auto [it, inserted] = acc.try_emplace(group);
      if (inserted) it->second.resize(p.grid.size());
      Acc& a = it->second[t];
      a.weight12 += w12;
      a.stance12 += static_cast<std::int64_t>(w12) * e.score();
      a.n += 1;
    }
  }

  p.groups.reserve(acc.size());
  for (const auto& [group, _] : acc) p.groups.push_back(group);
  p.cells.assign(p.groups.size(), std::vector<Panel::Cell>(p.grid.size()));
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    const auto& row = acc.at(p.groups[g]);
    for (std::size_t t = 0; t < p.grid.size(); ++t) {
      const Acc& a = row[t];
      if (a.weight12 == 0) continue;
      Panel::Cell& c = p.cells[g][t];
      c.weight = static_cast<double>(a.weight12) / 12.0;
      c.mean_stance = static_cast<double>(a.stance12) / static_cast<double>(a.weight12);
      c.n = a.n;
    }
  }
  return p;
}

/// Per-group (P-bar, L-bar). QuarterMean averages the quarterly proportions
/// over the whole grid (absences count as 0) and the quarterly stances over
/// present quarters only; Pooled uses single all-time ratios instead.
inline std::vector<Panel::GroupAverages> time_averages(const Panel& p,
                                                       AvgMode mode = AvgMode::QuarterMean) {
  if (p.empty()) throw ContractViolation("time_averages: panel is empty");
  std::vector<Panel::GroupAverages> out(p.groups.size());
  if (mode == AvgMode::QuarterMean) {
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      double psum = 0, lsum = 0;
      long present = 0;
      for (std::size_t t = 0; t < p.grid.size(); ++t) {
        psum += p.proportion(g, t);
        if (p.cells[g][t].weight > 0) {
          lsum += p.cells[g][t].mean_stance;
          ++present;
        }
      }
      out[g].p_bar = psum / static_cast<double>(p.grid.size());
      if (present > 0) out[g].l_bar = lsum / static_cast<double>(present);
    }
  } else {
    double grand_total = 0;
    for (std::size_t t = 0; t < p.grid.size(); ++t) grand_total += p.total_weight(t);
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      double wsum = 0, ssum = 0;
      for (std::size_t t = 0; t < p.grid.size(); ++t) {
        const Panel::Cell& c = p.cells[g][t];
        wsum += c.weight;
        ssum += c.weight * c.mean_stance;
      }
      out[g].p_bar = grand_total > 0 ? wsum / grand_total : 0.0;
      if (wsum > 0) out[g].l_bar = ssum / wsum;
    }
  }
  return out;
}

/// Event-level platform stance series (each comment weight 1), the reference
/// every counterfactual is compared against.
inline TimeSeries overall_series(const std::vector<CommentEvent>& events) {
  if (events.empty()) return {};
  int lo = events.front().quarter.index(), hi = lo;
  for (const CommentEvent& e : events) {
    lo = std::min(lo, e.quarter.index());
    hi = std::max(hi, e.quarter.index());
  }
  std::vector<long> n(hi - lo + 1, 0);
  std::vector<long> sum(hi - lo + 1, 0);
  for (const CommentEvent& e : events) {
    n[e.quarter.index() - lo] += 1;
    sum[e.quarter.index() - lo] += e.score();
  }
  TimeSeries s;
  for (int i = 0; i <= hi - lo; ++i) {
    if (n[i] > 0)
      s.push(Quarter::from_index(lo + i), static_cast<double>(sum[i]) / n[i]);
    else
      s.push(Quarter::from_index(lo + i), std::nullopt);
  }
  return s;
}

}  // namespace stancekit
