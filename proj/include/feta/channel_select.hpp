#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "feta/preprocess.hpp"

namespace feta {

/// Per-channel relevance evidence: prototype-margin score, approximate
/// leave-one-out 1NN accuracy, and their z-score fusion.
struct ChannelScore {
  std::size_t channel = 0;
  double margin_score = 0.0;  // B_c, nonnegative
  double loo_accuracy = 0.0;  // C_c in [0, 1]
  double fused = 0.0;         // S_c on z-score scale
  std::size_t rank = 0;       // 1-based, ties broken by ascending channel

  bool operator==(const ChannelScore&) const = default;
};

struct SelectConfig {
  double alpha = 0.5;          // weight on the margin score, in [0, 1]
  std::size_t top_m = 4;       // channels forwarded downstream
  std::size_t probe_size = 64;  // 1NN leave-one-out probe subset size
  double eps = 1e-8;           // margin-score denominator guard
  std::uint64_t seed = 42;
};

/// Ratio of mean pairwise class-centroid distance to average within-class
/// spread (both unsquared Euclidean). Requires >= 2 distinct labels and
/// equal-length sequences.
double prototype_margin_score(const std::vector<ChannelSequence>& channel_train,
                              const std::vector<std::string>& labels, double eps = 1e-8);

/// Fraction of probed training samples whose nearest other sample (squared
/// Euclidean, argmin ties to the smallest index) shares their label. Probes
/// everything when n_probe >= N, otherwise a seeded uniform sample without
/// replacement.
double loo_1nn_accuracy(const std::vector<ChannelSequence>& channel_train,
                        const std::vector<std::string>& labels, std::size_t n_probe,
                        std::uint64_t seed);

/// Standardizes both score lists across channels (population z-scores; all
/// zeros when the spread is below 1e-12), fuses with weight alpha, and ranks
/// descending with ties broken by ascending channel index.
std::vector<ChannelScore> fuse_and_rank(const std::vector<double>& margin_scores,
                                        const std::vector<double>& loo_accuracies,
                                        const SelectConfig& cfg);

}  // namespace feta
