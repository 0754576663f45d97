#include "feta/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "feta/errors.hpp"

namespace feta {

std::vector<double> znormalize(std::span<const double> raw, double sigma_floor) {
  if (raw.empty()) {
    throw Error(ErrorKind::empty_sequence, "znormalize on empty sequence");
  }
  double sum = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::non_finite_input, "znormalize input contains NaN/Inf");
    }
    sum += v;
  }
  const double mean = sum / static_cast<double>(raw.size());
  double sq = 0.0;
  for (double v : raw) {
    const double d = v - mean;
    sq += d * d;
  }
  const double sigma = std::sqrt(sq / static_cast<double>(raw.size()));
  const double divisor = std::max(sigma, sigma_floor);

  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = (raw[i] - mean) / divisor;
  }
  return out;
}

std::vector<double> subsample(std::span<const double> seq, std::size_t target_length) {
  if (seq.empty()) {
    throw Error(ErrorKind::empty_sequence, "subsample on empty sequence");
  }
  if (seq.size() <= target_length) {
    return {seq.begin(), seq.end()};
  }
  // target_length >= 2 by config invariant; len > target here.
  std::vector<double> out(target_length);
  const double stride = static_cast<double>(seq.size() - 1) / static_cast<double>(target_length - 1);
  for (std::size_t j = 0; j < target_length; ++j) {
    const auto idx = static_cast<std::size_t>(std::floor(static_cast<double>(j) * stride + 0.5));
    out[j] = seq[std::min(idx, seq.size() - 1)];
  }
  return out;
}

ChannelSequence preprocess_channel(const LabeledSeries& series, std::size_t channel,
                                   const PreprocessConfig& cfg) {
  if (channel >= series.channel_count()) {
    throw Error(ErrorKind::channel_out_of_range,
                "channel " + std::to_string(channel) + " of " +
                    std::to_string(series.channel_count()));
  }
  ChannelSequence out;
  out.series_id = series.series_id;
  out.channel = channel;
  out.values = subsample(znormalize(series.values[channel], cfg.sigma_floor), cfg.target_length);
  return out;
}

}  // namespace feta
