#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "feta/aggregator.hpp"
#include "feta/channel_select.hpp"
#include "feta/dataset.hpp"
#include "feta/llm_client.hpp"
#include "feta/preprocess.hpp"
#include "feta/reasoner.hpp"
#include "feta/retrieval.hpp"

namespace feta {

struct AblationFlags {
  bool no_decomposer = false;  // use every channel; joint prompt for the llm backend
  bool no_retriever = false;   // label-wise random exemplars instead of DTW retrieval
  bool no_reasoner = false;    // adopt the top-1 exemplar label, no reasoning step
  bool no_aggregator = false;  // majority vote instead of confidence-weighted fusion
};

struct RunConfig {
  std::filesystem::path data_root;
  std::string dataset;
  PreprocessConfig preprocess;
  SelectConfig select;
  DtwConfig dtw;
  std::size_t k_neighbors = 3;
  ReasonerConfig reasoner;
  AggregateConfig aggregate;
  AblationFlags ablation;
  std::size_t concurrency = 1;
  std::filesystem::path out_path = "results.jsonl";
  std::filesystem::path cache_dir = ".feta_cache";
  std::uint64_t seed = 42;
};

/// Evidence retained per (sample, channel) for reporting. Exemplar values are
/// dropped; labels, distances and the histogram describe the retrieval.
struct NeighborDigest {
  std::vector<std::string> labels;
  std::vector<std::optional<double>> distances;
  std::map<std::string, std::size_t> histogram;
};

struct ChannelRecord {
  std::optional<ChannelScore> score;  // absent when the decomposer is ablated
  NeighborDigest neighbors;
  ChannelDecision decision;
};

/// Wall-clock per stage, milliseconds. Kept out of the JSONL records so
/// repeated runs stay byte-identical; the summary carries the aggregates.
struct StageTimings {
  double preprocess_ms = 0.0;
  double retrieve_ms = 0.0;
  double reason_ms = 0.0;
  double aggregate_ms = 0.0;
};

struct SampleResult {
  std::size_t series_id = 0;
  std::optional<std::string> true_label;
  FinalDecision decision;
  std::vector<ChannelRecord> channels;
  StageTimings timings;
  bool correct = false;
};

struct RunReport {
  std::string dataset;
  std::size_t sample_count = 0;
  std::size_t correct_count = 0;
  double accuracy = 0.0;
  std::map<std::string, double> per_class_accuracy;
  std::size_t null_decisions = 0;
  nlohmann::json config_snapshot;
  double fit_ms = 0.0;
  StageTimings stage_totals;
  std::size_t network_calls = 0;  // llm backend HTTP attempts; 0 on cached replay
};

/// Train-split state computed once per run: preprocessed per-channel pools,
/// channel ranking, and the selected channel subset. Immutable after
/// construction; classify_sample only reads it, so concurrent classification
/// over one fitted pipeline is safe.
class FittedPipeline {
 public:
  FittedPipeline(const Dataset& dataset, const RunConfig& cfg);

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<ChannelScore>& ranking() const { return ranking_; }
  const std::vector<std::size_t>& selected_channels() const { return selected_; }
  double fit_ms() const { return fit_ms_; }

  /// Runs the per-sample pipeline: preprocess each selected channel of the
  /// query, retrieve exemplars, obtain a channel decision from the configured
  /// backend, then fuse. Reasoner transport failures downgrade the affected
  /// channel to an invalid-marker decision and are logged, never fatal.
  SampleResult classify_sample(const LabeledSeries& series, LlmClient* client = nullptr) const;

 private:
  ChannelDecision decide(const ChannelSequence& query, const NeighborSet& neighbors,
                         LlmClient* client) const;

  RunConfig cfg_;
  std::vector<std::string> classes_;
  std::size_t channel_count_ = 0;
  std::vector<std::vector<LabeledSequence>> train_pool_;  // [channel] -> preprocessed train
  std::vector<ChannelScore> ranking_;                     // empty when decomposer is ablated
  std::vector<std::size_t> selected_;
  double fit_ms_ = 0.0;
};

/// Deterministic JSON encoding of one sample result (timings excluded).
nlohmann::json sample_to_json(const SampleResult& result);

nlohmann::json config_to_json(const RunConfig& cfg);

nlohmann::json report_to_json(const RunReport& report);

/// Loads the dataset, fits the channel ranking on the train split once,
/// classifies every test series, and writes one JSONL line per sample to
/// cfg.out_path plus a summary JSON next to it (`<stem>.summary.json`).
/// With a warm response cache the JSONL output is byte-identical across
/// repeated runs and across concurrency levels.
RunReport evaluate(const RunConfig& cfg);

/// Summary path derived from the JSONL output path.
std::filesystem::path summary_path(const std::filesystem::path& out_path);

}  // namespace feta
