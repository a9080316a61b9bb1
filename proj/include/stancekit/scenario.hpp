#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/panel.hpp"
#include "stancekit/timeseries.hpp"

namespace stancekit {

/// What varies over time for a group in a counterfactual world: both its
/// proportion and stance, only its proportion (stance frozen at the time
/// average), only its stance (proportion frozen), or neither.
enum class Mode { VaryBoth, ProportionOnly, StanceOnly, Fixed };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::VaryBoth: return "vary-both";
    case Mode::ProportionOnly: return "proportion-only";
    case Mode::StanceOnly: return "stance-only";
    case Mode::Fixed: return "fixed";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "vary-both" || s == "empirical") return Mode::VaryBoth;
  if (s == "proportion-only") return Mode::ProportionOnly;
  if (s == "stance-only") return Mode::StanceOnly;
  if (s == "fixed") return Mode::Fixed;
  return std::nullopt;
}

/// Assignment of every panel group to a mode, plus the renormalization flag
/// for facets (such as cohorts) where some groups are absent in some
/// quarters.
struct ScenarioSpec {
  std::map<std::string, Mode> modes;  // exactly the panel's groups
  bool renormalize = false;
  AvgMode avg_mode = AvgMode::QuarterMean;

  static ScenarioSpec uniform(const Panel& p, Mode m, bool renormalize,
                              AvgMode avg = AvgMode::QuarterMean) {
    ScenarioSpec s;
    for (const auto& g : p.groups) s.modes.emplace(g, m);
    s.renormalize = renormalize;
    s.avg_mode = avg;
    return s;
  }
};

/// Evaluates one counterfactual world over the panel's quarter grid:
///
///   value(t) =  sum over vary-both groups        of  P_t(g) * L_t(g)
///             + sum over proportion-only groups  of  P_t(g) * Lbar(g)
///             + sum over stance-only groups      of  p*(g,t) * L_t(g)
///             + sum over fixed groups            of  p*(g,t) * Lbar(g)
///
/// where p*(g,t) is Pbar(g), except that with renormalize=true the effective
/// proportions of all groups (P_t for the varying-proportion modes, Pbar for
/// the frozen ones, 0 for frozen groups absent at t) are rescaled by a
/// common factor to sum to 1. Groups absent at t contribute nothing to the
/// vary-both and stance-only sums since L_t is undefined there. A quarter
/// where no term is live is a gap.
inline TimeSeries evaluate_scenario(const Panel& panel, const ScenarioSpec& spec) {
  if (panel.empty()) {
    if (!spec.modes.empty())
      throw ContractViolation("evaluate_scenario: mode assignment for empty panel");
    return {};
  }

  std::vector<Mode> mode_of(panel.groups.size());
  {
    std::size_t matched = 0;
    for (std::size_t g = 0; g < panel.groups.size(); ++g) {
      auto it = spec.modes.find(panel.groups[g]);
      if (it == spec.modes.end())
        throw ContractViolation("evaluate_scenario: no mode for group '" + panel.groups[g] +
                                "'");
      mode_of[g] = it->second;
      ++matched;
    }
    if (matched != spec.modes.size()) {
      for (const auto& [name, _] : spec.modes)
        if (panel.group_index(name) < 0)
          throw ContractViolation("evaluate_scenario: mode for unknown group '" + name + "'");
    }
  }

  const auto averages = time_averages(panel, spec.avg_mode);
  for (std::size_t g = 0; g < panel.groups.size(); ++g) {
    if ((mode_of[g] == Mode::ProportionOnly || mode_of[g] == Mode::Fixed) &&
        !averages[g].l_bar) {
      throw ContractViolation("evaluate_scenario: group '" + panel.groups[g] +
                              "' has undefined time-average stance");
    }
  }

  TimeSeries out;
  for (std::size_t t = 0; t < panel.grid.size(); ++t) {
    // Effective proportion and the stance it multiplies, per group; a group
    // is "live" when its term is defined at this quarter.
    double prop_sum = 0;
    double value = 0;
    bool any_live = false;
    struct Term {
      double prop = 0;
      double stance = 0;
      bool live = false;
    };
    std::vector<Term> terms(panel.groups.size());
    for (std::size_t g = 0; g < panel.groups.size(); ++g) {
      const bool present = panel.cells[g][t].weight > 0;
      Term& term = terms[g];
      switch (mode_of[g]) {
        case Mode::VaryBoth:
          term.prop = panel.proportion(g, t);
          if (present) {
            term.stance = panel.cells[g][t].mean_stance;
            term.live = true;
          }
          break;
        case Mode::ProportionOnly:
          term.prop = panel.proportion(g, t);
          if (present) {
            term.stance = *averages[g].l_bar;
            term.live = true;
          }
          break;
        case Mode::StanceOnly:
          term.prop = (spec.renormalize && !present) ? 0.0 : averages[g].p_bar;
          if (present) {
            term.stance = panel.cells[g][t].mean_stance;
            term.live = true;
          }
          break;
        case Mode::Fixed:
          if (spec.renormalize && !present) {
            term.prop = 0.0;
          } else {
            term.prop = averages[g].p_bar;
            term.stance = *averages[g].l_bar;
            term.live = true;
          }
          break;
      }
      prop_sum += term.prop;
    }
    // A live term always has positive effective proportion, so prop_sum > 0
    // whenever anything is live.
    const double scale = spec.renormalize ? (prop_sum > 0 ? 1.0 / prop_sum : 0.0) : 1.0;
    for (const Term& term : terms) {
      if (!term.live) continue;
      any_live = true;
      value += scale * term.prop * term.stance;
    }
    if (any_live)
      out.push(panel.grid[t], value);
    else
      out.push(panel.grid[t], std::nullopt);
  }
  return out;
}

/// True when the wrappers below should renormalize by default: some group is
/// missing from some quarter (cohorts that do not exist yet, sparse topics).
inline bool default_renormalize(const Panel& p) { return p.has_absences(); }

/// Removes groups that never carry weight (undefined time-average stance);
/// their names land in `reported` when given. They hold zero weight in every
/// quarter, so dropping them changes no proportion. Panels built from events
/// never contain such groups, but hand-built or edited ones may.
inline Panel drop_never_present_groups(const Panel& panel,
                                       std::vector<std::string>* reported = nullptr) {
  Panel out;
  out.facet = panel.facet;
  out.grid = panel.grid;
  for (std::size_t g = 0; g < panel.groups.size(); ++g) {
    bool present = false;
    for (std::size_t t = 0; t < panel.grid.size(); ++t)
      if (panel.cells[g][t].weight > 0) present = true;
    if (present) {
      out.groups.push_back(panel.groups[g]);
      out.cells.push_back(panel.cells[g]);
    } else if (reported) {
      reported->push_back(panel.groups[g]);
    }
  }
  return out;
}

/// World where only the group mix varies; every group's stance is frozen at
/// its time average.
inline TimeSeries proportion_only(const Panel& panel,
                                  std::optional<bool> renormalize = std::nullopt,
                                  AvgMode avg = AvgMode::QuarterMean) {
  if (panel.empty()) return {};
  const Panel reduced = drop_never_present_groups(panel);
  auto spec = ScenarioSpec::uniform(reduced, Mode::ProportionOnly,
                                    renormalize.value_or(default_renormalize(reduced)), avg);
  return evaluate_scenario(reduced, spec);
}

/// World where only within-group stances vary; every group's proportion is
/// frozen at its time average.
inline TimeSeries stance_only(const Panel& panel,
                              std::optional<bool> renormalize = std::nullopt,
                              AvgMode avg = AvgMode::QuarterMean) {
  if (panel.empty()) return {};
  const Panel reduced = drop_never_present_groups(panel);
  auto spec = ScenarioSpec::uniform(reduced, Mode::StanceOnly,
                                    renormalize.value_or(default_renormalize(reduced)), avg);
  return evaluate_scenario(reduced, spec);
}

/// The factual world: everything varies. Matches Panel::overall_series.
inline TimeSeries empirical_world(const Panel& panel,
                                  std::optional<bool> renormalize = std::nullopt,
                                  AvgMode avg = AvgMode::QuarterMean) {
  if (panel.empty()) return {};
  const Panel reduced = drop_never_present_groups(panel);
  auto spec = ScenarioSpec::uniform(reduced, Mode::VaryBoth,
                                    renormalize.value_or(default_renormalize(reduced)), avg);
  return evaluate_scenario(reduced, spec);
}

/// World where nothing varies; without renormalization this is the constant
/// sum of Pbar times Lbar.
inline TimeSeries fixed_world(const Panel& panel,
                              std::optional<bool> renormalize = std::nullopt,
                              AvgMode avg = AvgMode::QuarterMean) {
  if (panel.empty()) return {};
  const Panel reduced = drop_never_present_groups(panel);
  auto spec = ScenarioSpec::uniform(reduced, Mode::Fixed,
                                    renormalize.value_or(default_renormalize(reduced)), avg);
  return evaluate_scenario(reduced, spec);
}

/// Evaluates one of the four uniform worlds by name.
inline TimeSeries uniform_world(const Panel& panel, Mode mode,
                                std::optional<bool> renormalize = std::nullopt,
                                AvgMode avg = AvgMode::QuarterMean) {
  switch (mode) {
    case Mode::VaryBoth: return empirical_world(panel, renormalize, avg);
    case Mode::ProportionOnly: return proportion_only(panel, renormalize, avg);
    case Mode::StanceOnly: return stance_only(panel, renormalize, avg);
    case Mode::Fixed: return fixed_world(panel, renormalize, avg);
  }
  throw ContractViolation("uniform_world: bad mode");
}

}  // namespace stancekit
