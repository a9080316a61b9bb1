#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "stancekit/error.hpp"

namespace stancekit {

/// Calendar quarter in UTC. Totally ordered, with successor stepping so
/// aggregation can lay out a gap-free quarter grid.
struct Quarter {
  int year = 0;
  int q = 1;  // 1..4

  friend auto operator<=>(const Quarter&, const Quarter&) = default;

  int index() const { return year * 4 + (q - 1); }

  static Quarter from_index(int idx) {
    int y = idx / 4;
    int r = idx % 4;
    if (r < 0) {
      r += 4;
      --y;
    }
    return Quarter{y, r + 1};
  }

  Quarter next() const { return from_index(index() + 1); }

  /// "2014Q1" form used by every CSV in the toolkit.
  std::string str() const {
    return std::to_string(year) + "Q" + std::to_string(q);
  }

  static Quarter parse(std::string_view s) {
    auto bad = [&] {
      throw ContractViolation("bad quarter '" + std::string(s) + "', expected YYYYQn");
    };
    std::size_t qpos = s.find('Q');
    if (qpos == std::string_view::npos || qpos == 0 || qpos + 2 != s.size()) bad();
    int year = 0;
    for (std::size_t i = 0; i < qpos; ++i) {
      if (s[i] < '0' || s[i] > '9') bad();
      year = year * 10 + (s[i] - '0');
    }
    char qc = s[qpos + 1];
    if (qc < '1' || qc > '4') bad();
    return Quarter{year, qc - '0'};
  }
};

/// UTC calendar mapping: Jan-Mar -> Q1, Apr-Jun -> Q2, Jul-Sep -> Q3,
/// Oct-Dec -> Q4.
inline Quarter to_quarter(std::int64_t created_utc) {
  if (created_utc <= 0)
    throw ContractViolation("to_quarter: created_utc must be positive");
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{created_utc}});
  const year_month_day ymd{day};
  const int month = static_cast<int>(unsigned(ymd.month()));
  return Quarter{static_cast<int>(ymd.year()), (month - 1) / 3 + 1};
}

}  // namespace stancekit
