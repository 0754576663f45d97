#include "feta/channel_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "feta/errors.hpp"

namespace feta {
namespace {

void require_equal_lengths(const std::vector<ChannelSequence>& seqs) {
  for (const auto& s : seqs) {
    if (s.values.size() != seqs.front().values.size()) {
      throw Error(ErrorKind::length_mismatch, "sequences differ in length");
    }
  }
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

double squared_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return sq;
}

// Population z-scores across channels; all zeros when the spread vanishes.
std::vector<double> zscore(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double sigma = std::sqrt(sq / n);
  std::vector<double> out(values.size(), 0.0);
  if (sigma < 1e-12) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sigma;
  return out;
}

}  // namespace

double prototype_margin_score(const std::vector<ChannelSequence>& channel_train,
                              const std::vector<std::string>& labels, double eps) {
  if (channel_train.size() != labels.size()) {
    throw Error(ErrorKind::length_mismatch, "sequence/label count mismatch");
  }
  if (channel_train.empty()) {
    throw Error(ErrorKind::single_class, "no training sequences");
  }
  require_equal_lengths(channel_train);

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  if (by_class.size() < 2) {
    throw Error(ErrorKind::single_class, "need >= 2 distinct labels");
  }

  const std::size_t len = channel_train.front().values.size();
  std::map<std::string, std::vector<double>> centroids;
  for (const auto& [name, indices] : by_class) {
    std::vector<double> centroid(len, 0.0);
    for (std::size_t i : indices) {
      for (std::size_t t = 0; t < len; ++t) centroid[t] += channel_train[i].values[t];
    }
    for (double& v : centroid) v /= static_cast<double>(indices.size());
    centroids[name] = std::move(centroid);
  }

  double within = 0.0;
  for (std::size_t i = 0; i < channel_train.size(); ++i) {
    within += euclidean(channel_train[i].values, centroids[labels[i]]);
  }
  within /= static_cast<double>(channel_train.size());

  double between = 0.0;
  std::size_t pairs = 0;
  for (auto it = centroids.begin(); it != centroids.end(); ++it) {
    for (auto jt = std::next(it); jt != centroids.end(); ++jt) {
      between += euclidean(it->second, jt->second);
      ++pairs;
    }
  }
  between /= static_cast<double>(pairs);

  return between / (within + eps);
}

double loo_1nn_accuracy(const std::vector<ChannelSequence>& channel_train,
                        const std::vector<std::string>& labels, std::size_t n_probe,
                        std::uint64_t seed) {
  if (channel_train.size() != labels.size()) {
    throw Error(ErrorKind::length_mismatch, "sequence/label count mismatch");
  }
  const std::size_t n = channel_train.size();
  if (n < 2) {
    throw Error(ErrorKind::too_few_samples, "need >= 2 samples for leave-one-out");
  }
  require_equal_lengths(channel_train);

  std::vector<std::size_t> probe(n);
  std::iota(probe.begin(), probe.end(), 0);
  if (n_probe < n) {
    // Partial Fisher-Yates driven by the raw mt19937_64 stream keeps the
    // selection identical across platforms.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_probe; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
      std::swap(probe[i], probe[j]);
    }
    probe.resize(n_probe);
  }

  std::size_t hits = 0;
  for (std::size_t i : probe) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = squared_euclidean(channel_train[i].values, channel_train[j].values);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (labels[best_j] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(probe.size());
}

std::vector<ChannelScore> fuse_and_rank(const std::vector<double>& margin_scores,
                                        const std::vector<double>& loo_accuracies,
                                        const SelectConfig& cfg) {
  if (margin_scores.size() != loo_accuracies.size() || margin_scores.empty()) {
    throw Error(ErrorKind::length_mismatch, "score lists must be non-empty and equal length");
  }
  const std::vector<double> zb = zscore(margin_scores);
  const std::vector<double> zc = zscore(loo_accuracies);

  std::vector<ChannelScore> scores(margin_scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c].channel = c;
    scores[c].margin_score = margin_scores[c];
    scores[c].loo_accuracy = loo_accuracies[c];
    scores[c].fused = cfg.alpha * zb[c] + (1.0 - cfg.alpha) * zc[c];
  }
  std::sort(scores.begin(), scores.end(), [](const ChannelScore& a, const ChannelScore& b) {
    if (a.fused != b.fused) return a.fused > b.fused;
    return a.channel < b.channel;
  });
  for (std::size_t r = 0; r < scores.size(); ++r) scores[r].rank = r + 1;
  return scores;
}

}  // namespace feta
