#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "feta/dataset.hpp"

namespace feta {

struct PreprocessConfig {
  std::size_t target_length = 128;  // >= 2
  double sigma_floor = 1e-8;        // guard for constant channels
};

/// One normalized univariate channel plus its provenance.
struct ChannelSequence {
  std::vector<double> values;
  std::size_t series_id = 0;
  std::size_t channel = 0;

  bool operator==(const ChannelSequence&) const = default;
};

/// Rescales to zero mean and unit population standard deviation. A constant
/// input maps to all zeros (the sigma floor caps the divisor).
std::vector<double> znormalize(std::span<const double> raw, double sigma_floor = 1e-8);

/// Uniform subsampling to at most `target_length` points via the index map
/// idx(j) = round_half_up(j * (len-1) / (target_length-1)). Sequences at or
/// below the target length pass through unchanged; the first and last samples
/// are always retained.
std::vector<double> subsample(std::span<const double> seq, std::size_t target_length);

/// Normalizes the full-length raw channel, then subsamples, so the statistics
/// reflect the original sequence.
ChannelSequence preprocess_channel(const LabeledSeries& series, std::size_t channel,
                                   const PreprocessConfig& cfg);

}  // namespace feta
