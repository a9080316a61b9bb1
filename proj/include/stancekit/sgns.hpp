#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stancekit/embedding.hpp"
#include "stancekit/error.hpp"
#include "stancekit/text.hpp"

namespace stancekit {

struct CoOccurrence {
  std::string community;
  std::string author;
  std::int64_t count = 0;
};

struct SgnsParams {
  int dim = 150;
  int negatives = 5;
  int epochs = 5;
  double lr0 = 0.025;
  double noise_power = 0.75;  // noise authors drawn with probability count^power
  std::int64_t min_count = 1;
  std::uint64_t seed = 42;
};

struct SgnsResult {
  EmbeddingMatrix embedding;
  std::vector<std::string> dropped_communities;
  std::vector<std::string> dropped_authors;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased draw from [0, n) by rejection; avoids the library-specific
/// behavior of std::uniform_int_distribution so seed replay is portable.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

/// Skip-gram with negative sampling over (community, author) pairs, the
/// community as the word and the author as the context. Positive pairs are
/// drawn proportional to count, noise authors proportional to count^power.
/// Single-threaded; a fixed seed replays bit-identically.
inline SgnsResult train_embedding(const std::vector<CoOccurrence>& pairs,
                                  const SgnsParams& params = {}) {
  if (params.dim < 1) throw ContractViolation("train_embedding: dim must be positive");
  if (params.negatives < 0 || params.epochs < 1 || !(params.lr0 > 0))
    throw ContractViolation("train_embedding: bad hyperparameters");
  if (pairs.empty()) throw ContractViolation("train_embedding: no input pairs");

  std::map<std::pair<std::string, std::string>, std::int64_t> agg;
  for (const CoOccurrence& p : pairs) {
    if (p.count <= 0)
      throw ContractViolation("train_embedding: nonpositive count for (" + p.community +
                              ", " + p.author + ")");
    agg[{p.community, p.author}] += p.count;
  }

  std::map<std::string, std::int64_t> community_total, author_total;
  for (const auto& [key, count] : agg) {
    community_total[key.first] += count;
    author_total[key.second] += count;
  }

  SgnsResult out;
  for (const auto& [name, total] : community_total)
    if (total < params.min_count) out.dropped_communities.push_back(name);
  for (const auto& [name, total] : author_total)
    if (total < params.min_count) out.dropped_authors.push_back(name);
  auto dropped = [](const std::vector<std::string>& names, const std::string& x) {
    return std::binary_search(names.begin(), names.end(), x);
  };

  // Index surviving communities/authors in sorted order and keep only pairs
  // between survivors; anything left with no pairs at all is dropped too.
  std::map<std::string, int> community_id, author_id;
  std::vector<std::pair<int, int>> pair_ids;
  std::vector<std::int64_t> pair_count;
  for (const auto& [key, count] : agg) {
    if (dropped(out.dropped_communities, key.first) ||
        dropped(out.dropped_authors, key.second))
      continue;
    const int ci = static_cast<int>(
        community_id.try_emplace(key.first, static_cast<int>(community_id.size()))
            .first->second);
    const int ai = static_cast<int>(
        author_id.try_emplace(key.second, static_cast<int>(author_id.size()))
            .first->second);
    pair_ids.emplace_back(ci, ai);
    pair_count.push_back(count);
  }
  for (const auto& [name, total] : community_total)
    if (!community_id.count(name) && !dropped(out.dropped_communities, name))
      out.dropped_communities.push_back(name);
  for (const auto& [name, total] : author_total)
    if (!author_id.count(name) && !dropped(out.dropped_authors, name))
      out.dropped_authors.push_back(name);
  std::sort(out.dropped_communities.begin(), out.dropped_communities.end());
  std::sort(out.dropped_authors.begin(), out.dropped_authors.end());
  if (pair_ids.empty())
    throw ContractViolation("train_embedding: every pair fell below min_count");

  const std::size_t nc = community_id.size();
  const std::size_t na = author_id.size();
  const std::size_t d = static_cast<std::size_t>(params.dim);

  // map insertion order == sorted order, so ids follow sorted names
  std::vector<std::string> community_names(nc), author_names(na);
  for (const auto& [name, id] : community_id) community_names[id] = name;
  for (const auto& [name, id] : author_id) author_names[id] = name;

  std::vector<std::int64_t> pair_cum(pair_ids.size());
  std::int64_t total_count = 0;
  for (std::size_t i = 0; i < pair_ids.size(); ++i) {
    total_count += pair_count[i];
    pair_cum[i] = total_count;
  }

  std::vector<double> noise_cum(na, 0.0);
  {
    std::vector<double> weight(na, 0.0);
    for (std::size_t i = 0; i < pair_ids.size(); ++i)
      weight[pair_ids[i].second] += static_cast<double>(pair_count[i]);
    double acc = 0;
    for (std::size_t a = 0; a < na; ++a) {
      acc += std::pow(weight[a], params.noise_power);
      noise_cum[a] = acc;
    }
  }
  const double noise_total = noise_cum.back();

  std::mt19937_64 rng(params.seed);
  std::vector<double> cvec(nc * d), avec(na * d, 0.0);
  for (double& x : cvec)
    x = (detail::unit_uniform(rng) - 0.5) / static_cast<double>(params.dim);

  const std::int64_t total_steps = static_cast<std::int64_t>(params.epochs) * total_count;
  const double lr_floor = params.lr0 * 1e-4;
  std::vector<double> grad(d);

  for (std::int64_t step = 0; step < total_steps; ++step) {
    double lr = params.lr0 *
                (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
    if (lr < lr_floor) lr = lr_floor;

    const std::int64_t pick = static_cast<std::int64_t>(
        detail::bounded_uniform(rng, static_cast<std::uint64_t>(total_count)));
    const std::size_t pi = static_cast<std::size_t>(
        std::upper_bound(pair_cum.begin(), pair_cum.end(), pick) - pair_cum.begin());
    const auto [ci, ai] = pair_ids[pi];
    double* u = &cvec[static_cast<std::size_t>(ci) * d];

    std::fill(grad.begin(), grad.end(), 0.0);
    for (int k = 0; k <= params.negatives; ++k) {
      int target;
      double label;
      if (k == 0) {
        target = ai;
        label = 1.0;
      } else {
        const double r = detail::unit_uniform(rng) * noise_total;
        target = static_cast<int>(std::lower_bound(noise_cum.begin(), noise_cum.end(), r) -
                                  noise_cum.begin());
        if (target >= static_cast<int>(na)) target = static_cast<int>(na) - 1;
        if (target == ai) continue;
        label = 0.0;
      }
      double* v = &avec[static_cast<std::size_t>(target) * d];
      double dot = 0;
      for (std::size_t j = 0; j < d; ++j) dot += u[j] * v[j];
      const double g = (label - detail::sigmoid(dot)) * lr;
      for (std::size_t j = 0; j < d; ++j) {
        grad[j] += g * v[j];
        v[j] += g * u[j];
      }
    }
    for (std::size_t j = 0; j < d; ++j) u[j] += grad[j];
  }

  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<float> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = static_cast<float>(cvec[c * d + j]);
    out.embedding.add(community_names[c], std::move(v));
  }
  return out;
}

/// CSV `community,author,count` with header.
inline std::vector<CoOccurrence> read_cooccurrence_csv(std::istream& in,
                                                       const std::string& what = "pairs") {
  std::vector<CoOccurrence> out;
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
    if (f.size() != 3) throw ContractViolation("bad " + what + " row: '" + line + "'");
    out.push_back({f[0], f[1], parse_int_field(f[2], what)});
  }
  return out;
}

inline std::vector<CoOccurrence> read_cooccurrence_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pairs file: " + path);
  return read_cooccurrence_csv(in, path);
}

}  // namespace stancekit
