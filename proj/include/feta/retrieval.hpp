#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "feta/preprocess.hpp"

namespace feta {

struct DtwConfig {
  /// Sakoe-Chiba window half-width in steps, with length-ratio adjustment for
  /// unequal lengths. Absent = unconstrained.
  std::optional<std::size_t> band_radius;
};

struct DtwResult {
  double distance = 0.0;
  /// Set when the requested band admitted no monotone path and was widened
  /// internally to the minimal feasible width.
  bool band_widened = false;
};

/// One retrieved exemplar. `distance` is absent for ablation
/// (random-sampling) retrieval, where DTW is not computed.
struct Neighbor {
  ChannelSequence exemplar;
  std::string label;
  std::optional<double> distance;
};

/// The K_r most similar labeled training sequences for one channel,
/// distances nondecreasing, plus a label histogram of the evidence.
struct NeighborSet {
  std::size_t channel = 0;
  std::vector<Neighbor> neighbors;
  std::map<std::string, std::size_t> summary;  // label -> count
  bool band_widened = false;
};

struct LabeledSequence {
  ChannelSequence sequence;
  std::string label;
};

/// Classic dynamic-programming DTW with absolute-difference point cost:
///   D[i][j] = |a_i - b_j| + min(D[i-1][j], D[i][j-1], D[i-1][j-1]),
/// D[0][0] = |a_0 - b_0|. Symmetric in its arguments, banded or not.
DtwResult dtw_distance(std::span<const double> a, std::span<const double> b,
                       const DtwConfig& cfg = {});

/// Scans the whole training pool and keeps the min(k, N) smallest DTW
/// distances, ties broken by the smaller training index.
NeighborSet retrieve_neighbors(const ChannelSequence& query,
                               const std::vector<LabeledSequence>& train, std::size_t k,
                               const DtwConfig& cfg = {});

/// Label-wise random sampling for the retrieval ablation: cycles over classes
/// in lexicographic order, one exemplar per class per round, with a seeded
/// shuffle within each class. Distances are reported as not-applicable.
NeighborSet random_exemplars(const std::vector<LabeledSequence>& train, std::size_t k,
                             std::uint64_t seed);

}  // namespace feta
