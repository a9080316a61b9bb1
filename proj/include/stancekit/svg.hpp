#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/timeseries.hpp"

namespace stancekit {

namespace detail {

inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline const char* svg_color(std::size_t i) {
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                             "#bcbd22", "#17becf"};
  return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Line chart of one or more series on a shared quarter axis. Gap values
/// break the polyline into separate segments; nothing is interpolated.
inline std::string svg_line_chart(const std::vector<std::pair<std::string, TimeSeries>>& series,
                                  int width = 720, int height = 360) {
  if (series.empty()) throw ContractViolation("svg_line_chart: no series");
  int lo = 0, hi = 0;
  bool have_q = false;
  double vmin = 0, vmax = 0;
  bool have_v = false;
  for (const auto& [name, s] : series) {
    for (std::size_t i = 0; i < s.quarters.size(); ++i) {
      const int qi = s.quarters[i].index();
      if (!have_q || qi < lo) lo = qi;
      if (!have_q || qi > hi) hi = qi;
      have_q = true;
      if (s.values[i]) {
        const double v = *s.values[i];
        if (!have_v || v < vmin) vmin = v;
        if (!have_v || v > vmax) vmax = v;
        have_v = true;
      }
    }
  }
  if (!have_q || !have_v) throw ContractViolation("svg_line_chart: series are empty");
  if (vmax == vmin) {
    vmin -= 1;
    vmax += 1;
  }
  const double pad = 40;
  const double plot_w = width - 2 * pad, plot_h = height - 2 * pad;
  const double span = std::max(1, hi - lo);
  auto px = [&](int qi) { return pad + (qi - lo) / span * plot_w; };
  auto py = [&](double v) { return pad + (vmax - v) / (vmax - vmin) * plot_h; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) +
                    "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                    std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<line x1=\"" + detail::fmt_coord(pad) + "\" y1=\"" + detail::fmt_coord(pad) +
         "\" x2=\"" + detail::fmt_coord(pad) + "\" y2=\"" +
         detail::fmt_coord(height - pad) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::fmt_coord(pad) + "\" y1=\"" +
         detail::fmt_coord(height - pad) + "\" x2=\"" + detail::fmt_coord(width - pad) +
         "\" y2=\"" + detail::fmt_coord(height - pad) + "\" stroke=\"black\"/>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const TimeSeries& s = series[si].second;
    std::vector<std::string> segment;
    auto flush = [&]() {
      if (segment.size() >= 2) {
        std::string pts;
        for (const std::string& p : segment) {
          if (!pts.empty()) pts += ' ';
          pts += p;
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(detail::svg_color(si)) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
      } else if (segment.size() == 1) {
        const std::string& p = segment[0];
        const auto comma = p.find(',');
        out += "<circle cx=\"" + p.substr(0, comma) + "\" cy=\"" + p.substr(comma + 1) +
               "\" r=\"2\" fill=\"" + std::string(detail::svg_color(si)) + "\"/>\n";
      }
      segment.clear();
    };
    for (std::size_t i = 0; i < s.quarters.size(); ++i) {
      if (!s.values[i]) {
        flush();
        continue;
      }
      segment.push_back(detail::fmt_coord(px(s.quarters[i].index())) + "," +
                        detail::fmt_coord(py(*s.values[i])));
    }
    flush();
    out += "<text x=\"" + detail::fmt_coord(pad + 4) + "\" y=\"" +
           detail::fmt_coord(pad + 14 + 14 * static_cast<double>(si)) + "\" fill=\"" +
           std::string(detail::svg_color(si)) + "\" font-size=\"12\">" +
           detail::xml_escape(series[si].first) + "</text>\n";
  }
  out += "<text x=\"" + detail::fmt_coord(pad) + "\" y=\"" +
         detail::fmt_coord(height - pad + 16) + "\" font-size=\"11\">" +
         Quarter::from_index(lo).str() + "</text>\n";
  out += "<text x=\"" + detail::fmt_coord(width - pad - 40) + "\" y=\"" +
         detail::fmt_coord(height - pad + 16) + "\" font-size=\"11\">" +
         Quarter::from_index(hi).str() + "</text>\n";
  out += "</svg>\n";
  return out;
}

/// Stacked bars, one bar per quarter, one band per group, bottom-up in group
/// order. Shares sum to the full bar height when the rows for a quarter sum
/// to 1.
inline std::string svg_stacked_bars(
    const std::vector<Quarter>& quarters,
    const std::vector<std::pair<std::string, std::vector<double>>>& group_shares,
    int width = 720, int height = 360) {
  if (quarters.empty()) throw ContractViolation("svg_stacked_bars: no quarters");
  for (const auto& [name, shares] : group_shares)
    if (shares.size() != quarters.size())
      throw ContractViolation("svg_stacked_bars: shares for '" + name +
                              "' do not match quarters");
  const double pad = 40;
  const double plot_w = width - 2 * pad, plot_h = height - 2 * pad;
  const double bar_w = plot_w / static_cast<double>(quarters.size());

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) +
                    "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                    std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t t = 0; t < quarters.size(); ++t) {
    double base = 0;
    for (std::size_t g = 0; g < group_shares.size(); ++g) {
      const double share = group_shares[g].second[t];
      if (!(share > 0)) continue;
      const double y0 = pad + plot_h * (1.0 - base - share);
      out += "<rect x=\"" + detail::fmt_coord(pad + bar_w * static_cast<double>(t) + 0.5) +
             "\" y=\"" + detail::fmt_coord(y0) + "\" width=\"" +
             detail::fmt_coord(std::max(bar_w - 1.0, 0.5)) + "\" height=\"" +
             detail::fmt_coord(plot_h * share) + "\" fill=\"" +
             std::string(detail::svg_color(g)) + "\"/>\n";
      base += share;
    }
  }
  for (std::size_t g = 0; g < group_shares.size(); ++g)
    out += "<text x=\"" + detail::fmt_coord(pad + 4) + "\" y=\"" +
           detail::fmt_coord(pad + 14 + 14 * static_cast<double>(g)) + "\" fill=\"" +
           std::string(detail::svg_color(g)) + "\" font-size=\"12\">" +
           detail::xml_escape(group_shares[g].first) + "</text>\n";
  out += "<text x=\"" + detail::fmt_coord(pad) + "\" y=\"" +
         detail::fmt_coord(height - pad + 16) + "\" font-size=\"11\">" +
         quarters.front().str() + "</text>\n";
  out += "<text x=\"" + detail::fmt_coord(width - pad - 40) + "\" y=\"" +
         detail::fmt_coord(height - pad + 16) + "\" font-size=\"11\">" +
         quarters.back().str() + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace stancekit
