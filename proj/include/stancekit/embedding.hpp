#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stancekit/error.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

namespace detail {

inline std::string fmt_float9(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

inline bool valid_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  return true;
}

}  // namespace detail

/// Community vectors in the classic text format: header "<N> <d>", then one
/// line per community of name followed by d floats.
struct EmbeddingMatrix {
  int dim = 0;
  std::vector<std::string> names;
  std::vector<std::vector<float>> vectors;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return names.size(); }

  const std::vector<float>* find(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? nullptr : &vectors[it->second];
  }

  void add(const std::string& name, std::vector<float> v) {
    if (!detail::valid_token(name))
      throw ContractViolation("embedding: community name must be a nonempty token: '" +
                              name + "'");
    if (dim == 0) dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != dim || dim == 0)
      throw ContractViolation("embedding: vector for '" + name + "' has wrong length");
    if (!index.emplace(name, names.size()).second)
      throw ContractViolation("embedding: duplicate community '" + name + "'");
    names.push_back(name);
    vectors.push_back(std::move(v));
  }

  void save(std::ostream& out) const {
    out << names.size() << ' ' << dim << '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << names[i];
      for (float v : vectors[i]) out << ' ' << detail::fmt_float9(v);
      out << '\n';
    }
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write embedding file: " + path);
    save(out);
    if (!out) throw IoError("write failed: " + path);
  }

  static EmbeddingMatrix load(std::istream& in, const std::string& what = "embedding") {
    long long n = -1, d = -1;
    if (!(in >> n >> d) || n < 0 || d < 1)
      throw ContractViolation(what + ": bad header, expected '<N> <d>'");
    EmbeddingMatrix m;
    m.dim = static_cast<int>(d);
    for (long long i = 0; i < n; ++i) {
      std::string name;
      if (!(in >> name))
        throw ContractViolation(what + ": expected " + std::to_string(n) +
                                " rows, got " + std::to_string(i));
      std::vector<float> v(static_cast<std::size_t>(d));
      for (long long j = 0; j < d; ++j)
        if (!(in >> v[j]))
          throw ContractViolation(what + ": row '" + name + "' has fewer than " +
                                  std::to_string(d) + " values");
      m.add(name, std::move(v));
    }
    std::string extra;
    if (in >> extra)
      throw ContractViolation(what + ": trailing content after " + std::to_string(n) +
                              " rows");
    return m;
  }

  static EmbeddingMatrix load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file: " + path);
    return load(in, path);
  }
};

inline double vec_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// A named direction in embedding space built from (negative, positive) seed
/// community pairs, with optional labels for the five percentile bins.
struct DimensionSpec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> pairs;  // (negative, positive)
  std::vector<std::string> bin_labels;                     // empty or exactly 5
};

/// Unit vector: the normalized mean of the normalized per-pair differences
/// v(positive) - v(negative).
inline std::vector<double> build_dimension(const EmbeddingMatrix& emb,
                                           const DimensionSpec& spec) {
  if (spec.pairs.empty())
    throw ContractViolation("dimension '" + spec.name + "': no seed pairs");
  std::vector<double> mean(static_cast<std::size_t>(emb.dim), 0.0);
  for (const auto& [neg, pos] : spec.pairs) {
    const std::vector<float>* vn = emb.find(neg);
    if (!vn)
      throw ContractViolation("dimension '" + spec.name + "': seed community '" + neg +
                              "' not in embedding");
    const std::vector<float>* vp = emb.find(pos);
    if (!vp)
      throw ContractViolation("dimension '" + spec.name + "': seed community '" + pos +
                              "' not in embedding");
    std::vector<double> diff(mean.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
      diff[i] = static_cast<double>((*vp)[i]) - static_cast<double>((*vn)[i]);
    const double norm = vec_norm(diff);
    if (!(norm > 0))
      throw ContractViolation("dimension '" + spec.name + "': degenerate seed pair (" +
                              neg + ", " + pos + "), identical vectors");
    for (std::size_t i = 0; i < diff.size(); ++i) mean[i] += diff[i] / norm;
  }
  for (double& x : mean) x /= static_cast<double>(spec.pairs.size());
  const double norm = vec_norm(mean);
  if (!(norm > 0))
    throw ContractViolation("dimension '" + spec.name +
                            "': degenerate dimension, seed pair differences cancel");
  for (double& x : mean) x /= norm;
  return mean;
}

struct CommunityScore {
  std::string community;
  double raw = 0;         // projection of the normalized community vector
  double percentile = 0;  // rank / (N-1) * 100
  int bin = 0;            // 0..4
};

/// Scores every embedded community against a unit dimension. Ascending raw
/// order (ties by name) gives ranks; percentile = rank/(N-1)*100; the bin is
/// computed as rank*5/(N-1) in integer arithmetic, which equals
/// floor(percentile/20) without the float boundary cases, clamped to 4.
/// Returned in rank order.
inline std::vector<CommunityScore> score_communities(const EmbeddingMatrix& emb,
                                                     const std::vector<double>& dimension) {
  if (emb.size() < 2)
    throw ContractViolation("score_communities: need at least 2 communities");
  if (static_cast<int>(dimension.size()) != emb.dim)
    throw ContractViolation("score_communities: dimension length mismatch");
  std::vector<CommunityScore> out(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const std::vector<float>& v = emb.vectors[i];
    double norm2 = 0;
    for (float x : v) norm2 += static_cast<double>(x) * static_cast<double>(x);
    double raw = 0;
    if (norm2 > 0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t j = 0; j < v.size(); ++j)
        raw += static_cast<double>(v[j]) * inv * dimension[j];
    }
    out[i].community = emb.names[i];
    out[i].raw = raw;
  }
  std::sort(out.begin(), out.end(), [](const CommunityScore& a, const CommunityScore& b) {
    if (a.raw != b.raw) return a.raw < b.raw;
    return a.community < b.community;
  });
  const std::int64_t last = static_cast<std::int64_t>(out.size()) - 1;
  for (std::int64_t rank = 0; rank <= last; ++rank) {
    out[rank].percentile = static_cast<double>(rank) / static_cast<double>(last) * 100.0;
    out[rank].bin = static_cast<int>(std::min<std::int64_t>(rank * 5 / last, 4));
  }
  return out;
}

inline void write_scores_csv(const std::vector<CommunityScore>& scores, std::ostream& out) {
  out << "community,raw,percentile,bin\n";
  for (const CommunityScore& s : scores) {
    require_csv_safe(s.community, "community name");
    out << s.community << ',' << fmt_full(s.raw) << ',' << fmt_full(s.percentile) << ','
        << s.bin << '\n';
  }
}

inline void write_scores_csv_file(const std::vector<CommunityScore>& scores,
                                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scores file: " + path);
  write_scores_csv(scores, out);
}

inline std::vector<CommunityScore> read_scores_csv(std::istream& in,
                                                   const std::string& what = "scores") {
  std::vector<CommunityScore> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("community,", 0) == 0) continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 4) throw ContractViolation("bad " + what + " row: '" + line + "'");
    CommunityScore s;
    s.community = f[0];
    s.raw = parse_double_field(f[1], what);
    s.percentile = parse_double_field(f[2], what);
    s.bin = static_cast<int>(parse_int_field(f[3], what));
    if (s.bin < 0 || s.bin > 4)
      throw ContractViolation(what + ": bin out of range in row '" + line + "'");
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<CommunityScore> read_scores_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scores file: " + path);
  return read_scores_csv(in, path);
}

/// Bin labels for a dimension's five quintiles, lowest first.
inline std::vector<std::string> default_bin_labels(const std::string& dimension) {
  if (dimension == "partisan")
    return {"left-wing", "center-left", "center", "center-right", "right-wing"};
  return {"bin0", "bin1", "bin2", "bin3", "bin4"};
}

/// community -> bin label, the input to the dimension-bin facet.
inline std::unordered_map<std::string, std::string> bin_label_map(
    const std::vector<CommunityScore>& scores, const std::vector<std::string>& labels) {
  if (labels.size() != 5) throw ContractViolation("bin labels: need exactly 5");
  std::unordered_map<std::string, std::string> out;
  out.reserve(scores.size());
  for (const CommunityScore& s : scores) out[s.community] = labels[s.bin];
  return out;
}

}  // namespace stancekit
