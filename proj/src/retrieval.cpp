#include "feta/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>

#include "feta/errors.hpp"

namespace feta {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Band membership with length-ratio adjustment, symmetric in (i, n) <-> (j, m):
// |j*(n-1) - i*(m-1)| <= w * max(n-1, m-1). Reduces to |i - j| <= w for equal
// lengths and keeps the corners reachable for any w.
bool in_band(std::size_t i, std::size_t j, std::size_t n, std::size_t m, std::size_t w) {
  const auto lhs = std::llabs(static_cast<long long>(j) * static_cast<long long>(n - 1) -
                              static_cast<long long>(i) * static_cast<long long>(m - 1));
  const auto rhs = static_cast<long long>(w) *
                   static_cast<long long>(std::max(n, m) - 1);
  return lhs <= rhs;
}

// Banded DP; returns infinity when the band admits no monotone path.
double dtw_banded(std::span<const double> a, std::span<const double> b, std::size_t w) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> prev(m, kInf);
  std::vector<double> cur(m, kInf);

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_band(i, j, n, m, w)) continue;
      const double cost = std::abs(a[i] - b[j]);
      if (i == 0 && j == 0) {
        cur[j] = cost;
        continue;
      }
      double best = kInf;
      if (i > 0) best = std::min(best, prev[j]);
      if (j > 0) best = std::min(best, cur[j - 1]);
      if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      if (best < kInf) cur[j] = cost + best;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

}  // namespace

DtwResult dtw_distance(std::span<const double> a, std::span<const double> b,
                       const DtwConfig& cfg) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::empty_sequence, "dtw_distance on empty sequence");
  }
  // w = max(n, m) covers every cell, i.e. the unconstrained recurrence.
  const std::size_t unconstrained = std::max(a.size(), b.size());
  std::size_t w = cfg.band_radius.value_or(unconstrained);

  DtwResult result;
  for (;; ++w) {
    const double d = dtw_banded(a, b, w);
    if (d < kInf) {
      result.distance = d;
      return result;
    }
    result.band_widened = true;
  }
}

NeighborSet retrieve_neighbors(const ChannelSequence& query,
                               const std::vector<LabeledSequence>& train, std::size_t k,
                               const DtwConfig& cfg) {
  if (train.empty()) {
    throw Error(ErrorKind::empty_train_set, "retrieve_neighbors on empty training pool");
  }
  if (k == 0) {
    throw Error(ErrorKind::empty_neighbors, "k must be >= 1");
  }

  NeighborSet set;
  set.channel = query.channel;

  std::vector<std::pair<double, std::size_t>> distances(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const DtwResult r = dtw_distance(query.values, train[i].sequence.values, cfg);
    distances[i] = {r.distance, i};
    set.band_widened = set.band_widened || r.band_widened;
  }
  std::sort(distances.begin(), distances.end());  // pair order = (distance, index)

  const std::size_t take = std::min(k, train.size());
  set.neighbors.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const auto& [d, i] = distances[r];
    set.neighbors.push_back({train[i].sequence, train[i].label, d});
    ++set.summary[train[i].label];
  }
  return set;
}

NeighborSet random_exemplars(const std::vector<LabeledSequence>& train, std::size_t k,
                             std::uint64_t seed) {
  if (train.empty()) {
    throw Error(ErrorKind::empty_train_set, "random_exemplars on empty training pool");
  }

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.size(); ++i) by_class[train[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  for (auto& [name, indices] : by_class) {
    for (std::size_t i = indices.size(); i > 1; --i) {
      std::swap(indices[i - 1], indices[static_cast<std::size_t>(rng() % i)]);
    }
  }

  NeighborSet set;
  set.channel = train.front().sequence.channel;
  const std::size_t take = std::min(k, train.size());
  for (std::size_t round = 0; set.neighbors.size() < take; ++round) {
    for (const auto& [name, indices] : by_class) {
      if (set.neighbors.size() == take) break;
      if (round >= indices.size()) continue;
      const std::size_t i = indices[round];
      set.neighbors.push_back({train[i].sequence, train[i].label, std::nullopt});
      ++set.summary[train[i].label];
    }
  }
  return set;
}

}  // namespace feta
