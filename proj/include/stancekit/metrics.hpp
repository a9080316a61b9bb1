#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/ibeta.hpp"
#include "stancekit/text.hpp"
#include "stancekit/timeseries.hpp"

namespace stancekit {

struct PearsonResult {
  bool defined = false;  // false when either input is constant
  double r = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double log10_p = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};

inline PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractViolation("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw ContractViolation("pearson: need at least 3 points");

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }

  PearsonResult out;
  out.n = n;
  if (sxx == 0 || syy == 0) return out;  // constant series, r undefined
  out.defined = true;
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  out.r = r;

  const double df = static_cast<double>(n - 2);
  const double one_minus_r2 = (1.0 - r) * (1.0 + r);
  if (one_minus_r2 <= 0) {
    out.p = 0.0;
    out.log10_p = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double t = r * std::sqrt(df / one_minus_r2);
  const TwoSidedP tail = student_t_two_sided(t, df);
  out.p = tail.p;
  out.log10_p = tail.log10_p;
  return out;
}

inline double euclidean(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractViolation("euclidean: length mismatch");
  if (x.empty()) throw ContractViolation("euclidean: empty input");
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double l1_loss(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractViolation("l1_loss: length mismatch");
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - y[i]);
  return s;
}

/// Classic DTW: cost |x_i - y_j|, steps {match, insert, delete}, no window.
inline double dtw(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw ContractViolation("dtw: empty input");
  const std::size_t n = x.size(), m = y.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = std::fabs(x[i - 1] - y[j - 1]);
      cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// All metrics between two series over their shared quarters. Pearson needs
/// n >= 3 and two nonconstant inputs; distances need n >= 1; fields are left
/// empty otherwise instead of erroring, so sparse inputs still get a report.
/// DTW runs on the same pairwise-aligned values as the other metrics.
struct SimilarityReport {
  std::size_t n = 0;
  std::optional<double> pearson_r;
  std::optional<double> p_value;
  std::optional<double> log10_p;
  std::optional<double> euclidean;
  std::optional<double> dtw;
  std::optional<double> l1_loss;
};

inline SimilarityReport similarity(const TimeSeries& a, const TimeSeries& b) {
  const AlignedPair ap = align(a, b);
  SimilarityReport rep;
  rep.n = ap.a.size();
  if (rep.n == 0) return rep;
  rep.euclidean = euclidean(ap.a, ap.b);
  rep.dtw = dtw(ap.a, ap.b);
  rep.l1_loss = l1_loss(ap.a, ap.b);
  if (rep.n >= 3) {
    const PearsonResult pr = pearson(ap.a, ap.b);
    if (pr.defined) {
      rep.pearson_r = pr.r;
      rep.p_value = pr.p;
      rep.log10_p = pr.log10_p;
    }
  }
  return rep;
}

/// JSON with 6 significant digits, p-values in scientific notation, absent
/// metrics as null.
inline std::string similarity_json(const SimilarityReport& rep) {
  auto opt6 = [](const std::optional<double>& v) {
    return (v && std::isfinite(*v)) ? fmt_sig6(*v) : std::string("null");
  };
  std::string out = "{";
  out += "\"n\": " + std::to_string(rep.n);
  out += ", \"pearson_r\": " + opt6(rep.pearson_r);
  out += ", \"p_value\": " + (rep.p_value ? fmt_sci6(*rep.p_value) : std::string("null"));
  out += ", \"log10_p\": " + opt6(rep.log10_p);
  out += ", \"euclidean\": " + opt6(rep.euclidean);
  out += ", \"dtw\": " + opt6(rep.dtw);
  out += ", \"l1_loss\": " + opt6(rep.l1_loss);
  out += "}";
  return out;
}

}  // namespace stancekit
