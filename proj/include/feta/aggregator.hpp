#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feta/reasoner.hpp"

namespace feta {

enum class FusionMode { consensus, weighted, null_decision };

const char* to_string(FusionMode mode);

struct FinalDecision {
  std::optional<std::string> label;  // nullopt on a null decision
  double confidence = 0.0;
  FusionMode mode = FusionMode::null_decision;
  /// Normalized per-class scores; populated in weighted mode only.
  std::map<std::string, double> per_class_scores;
};

struct AggregateConfig {
  double clip_lo = 0.05;
  double clip_hi = 0.95;
  double smoothing_eps = 0.01;
};

/// Confidence-weighted fusion. Invalid decisions (no label, or a label
/// outside the class set) are discarded first. If none survive, returns a
/// null decision. If all survivors agree, consensus mode fuses their
/// confidences as 1 - prod(1 - w_c), capped at 0.99. Otherwise each clipped
/// confidence votes for its class, every other class receives the smoothing
/// weight, and the argmax of the normalized scores wins (ties to the
/// lexicographically smallest class).
FinalDecision aggregate(const std::vector<ChannelDecision>& decisions,
                        const std::vector<std::string>& classes, const AggregateConfig& cfg);

/// Plain majority voting (aggregation ablation): modal label among valid
/// decisions, confidence = modal count / valid count.
FinalDecision majority_vote(const std::vector<ChannelDecision>& decisions,
                            const std::vector<std::string>& classes);

}  // namespace feta
