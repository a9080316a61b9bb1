#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/quarter.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

/// Quarterly series with explicit gaps. Quarters are strictly increasing;
/// a nullopt value is a gap, never a silent zero.
struct TimeSeries {
  std::vector<Quarter> quarters;
  std::vector<std::optional<double>> values;

  std::size_t size() const { return quarters.size(); }
  bool empty() const { return quarters.empty(); }

  void push(Quarter q, std::optional<double> v) {
    if (!quarters.empty() && !(quarters.back() < q))
      throw ContractViolation("time series quarters must be strictly increasing");
    quarters.push_back(q);
    values.push_back(v);
  }

  std::optional<double> at(Quarter q) const {
    for (std::size_t i = 0; i < quarters.size(); ++i)
      if (quarters[i] == q) return values[i];
    return std::nullopt;
  }

  bool has_gap() const {
    for (const auto& v : values)
      if (!v) return true;
    return false;
  }

  TimeSeries window(Quarter start, Quarter end) const {
    TimeSeries out;
    for (std::size_t i = 0; i < quarters.size(); ++i)
      if (!(quarters[i] < start) && !(end < quarters[i]))
        out.push(quarters[i], values[i]);
    return out;
  }

  /// `quarter,value` rows; a gap serializes as an empty value field so plot
  /// layers can break the line instead of interpolating.
  void write_csv(std::ostream& out) const {
    out << "quarter,value\n";
    for (std::size_t i = 0; i < quarters.size(); ++i) {
      out << quarters[i].str() << ',';
      if (values[i]) out << fmt_full(*values[i]);
      out << '\n';
    }
  }

  void write_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write series file: " + path);
    write_csv(out);
  }

  static TimeSeries read_csv(std::istream& in, const std::string& what = "series") {
    TimeSeries s;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (first) {
        first = false;
        if (line.rfind("quarter,", 0) == 0) continue;  // header
      }
      auto fields = split_csv_line(line);
      if (fields.size() != 2)
        throw ContractViolation("bad " + what + " row: '" + line + "'");
      std::optional<double> v;
      if (!fields[1].empty()) v = parse_double_field(fields[1], what);
      s.push(Quarter::parse(fields[0]), v);
    }
    return s;
  }

  static TimeSeries read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series file: " + path);
    return read_csv(in, path);
  }
};

/// Pairwise-complete alignment: quarters where both series have a value.
struct AlignedPair {
  std::vector<Quarter> quarters;
  std::vector<double> a;
  std::vector<double> b;

  std::size_t size() const { return quarters.size(); }
};

inline AlignedPair align(const TimeSeries& x, const TimeSeries& y) {
  AlignedPair out;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x.quarters[i] < y.quarters[j]) {
      ++i;
    } else if (y.quarters[j] < x.quarters[i]) {
      ++j;
    } else {
      if (x.values[i] && y.values[j]) {
        out.quarters.push_back(x.quarters[i]);
        out.a.push_back(*x.values[i]);
        out.b.push_back(*y.values[j]);
      }
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace stancekit
