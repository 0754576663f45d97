#pragma once

// Deterministic synthetic datasets shared by the unit and acceptance suites.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "feta/dataset.hpp"
#include "feta/preprocess.hpp"

namespace fixtures {

inline constexpr double kPi = 3.14159265358979323846;

/// Two-class sinusoid dataset: class "low" is a 3-cycle sine, class "high" a
/// 7-cycle sine, with a small per-sample phase jitter (so centroid-based and
/// alignment-based evidence both separate the classes). Exactly one channel
/// carries the signal (plus mild noise); every other channel is pure seeded
/// noise.
inline feta::Dataset make_sinusoid_dataset(std::size_t n_train, std::size_t n_test,
                                           std::size_t channels, std::size_t informative,
                                           std::uint64_t seed, std::size_t length = 160) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> phase(0.0, 0.3);
  std::normal_distribution<double> noise(0.0, 1.0);

  auto make_series = [&](std::size_t id, bool high) {
    feta::LabeledSeries s;
    s.series_id = id;
    s.label = high ? "high" : "low";
    const double cycles = high ? 7.0 : 3.0;
    const double offset = phase(rng);
    s.values.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
      s.values[c].resize(length);
      for (std::size_t t = 0; t < length; ++t) {
        if (c == informative) {
          const double x = 2.0 * kPi * cycles * static_cast<double>(t) / static_cast<double>(length);
          s.values[c][t] = std::sin(x + offset) + 0.05 * noise(rng);
        } else {
          s.values[c][t] = noise(rng);
        }
      }
    }
    return s;
  };

  feta::Dataset ds;
  ds.name = "SynthSine";
  ds.classes = {"high", "low"};
  ds.channel_count = channels;
  ds.declared_length = length;
  for (std::size_t i = 0; i < n_train; ++i) ds.train.push_back(make_series(i, i % 2 == 0));
  for (std::size_t i = 0; i < n_test; ++i) ds.test.push_back(make_series(i, i % 2 == 1));
  return ds;
}

/// Stand-in with the exact shape of the AtrialFibrillation archive entry:
/// 3 classes, 2 channels, 15 train / 15 test, length 640. Channel 0 carries a
/// class-dependent oscillation, channel 1 is noise.
inline feta::Dataset make_af_standin(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> phase(0.0, 0.3);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::vector<std::string> classes = {"n", "s", "t"};
  const std::vector<double> cycles = {2.0, 5.0, 11.0};

  auto make_series = [&](std::size_t id, std::size_t cls) {
    feta::LabeledSeries s;
    s.series_id = id;
    s.label = classes[cls];
    s.values.resize(2);
    const double offset = phase(rng);
    for (std::size_t c = 0; c < 2; ++c) {
      s.values[c].resize(640);
      for (std::size_t t = 0; t < 640; ++t) {
        if (c == 0) {
          const double x = 2.0 * kPi * cycles[cls] * static_cast<double>(t) / 640.0;
          s.values[c][t] = std::sin(x + offset) + 0.05 * noise(rng);
        } else {
          s.values[c][t] = noise(rng);
        }
      }
    }
    return s;
  };

  feta::Dataset ds;
  ds.name = "SynthAF";
  ds.classes = classes;
  ds.channel_count = 2;
  ds.declared_length = 640;
  for (std::size_t i = 0; i < 15; ++i) ds.train.push_back(make_series(i, i % 3));
  for (std::size_t i = 0; i < 15; ++i) ds.test.push_back(make_series(i, (i + 1) % 3));
  return ds;
}

/// Writes <root>/<name>/<name>_TRAIN.ts and _TEST.ts.
inline void write_dataset(const feta::Dataset& ds, const std::filesystem::path& root) {
  const std::filesystem::path dir = root / ds.name;
  std::filesystem::create_directories(dir);
  std::ofstream(dir / (ds.name + "_TRAIN.ts"), std::ios::binary)
      << feta::to_ts_text(ds, feta::Split::train);
  std::ofstream(dir / (ds.name + "_TEST.ts"), std::ios::binary)
      << feta::to_ts_text(ds, feta::Split::test);
}

/// Two tight, well-separated clusters: class "a" near the zero vector, class
/// "b" near the ten vector, five samples each.
inline std::pair<std::vector<feta::ChannelSequence>, std::vector<std::string>>
separable_clusters(std::uint64_t seed = 7, std::size_t per_class = 5, std::size_t length = 8) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.05);
  std::vector<feta::ChannelSequence> seqs;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool is_b = i >= per_class;
    feta::ChannelSequence s;
    s.series_id = i;
    s.channel = 0;
    s.values.resize(length);
    for (auto& v : s.values) v = (is_b ? 10.0 : 0.0) + jitter(rng);
    seqs.push_back(std::move(s));
    labels.push_back(is_b ? "b" : "a");
  }
  return {seqs, labels};
}

inline feta::ChannelSequence make_sequence(std::vector<double> values, std::size_t id = 0,
                                           std::size_t channel = 0) {
  feta::ChannelSequence s;
  s.values = std::move(values);
  s.series_id = id;
  s.channel = channel;
  return s;
}

/// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("feta_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
