#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "feta/retrieval.hpp"

namespace feta {

enum class Backend { llm, mock, top1 };

const char* to_string(Backend backend);

/// A channel-level decision: predicted label plus self-assessed confidence.
/// An absent label marks the decision invalid (unparseable or out-of-set
/// response); invalid decisions always carry confidence 0.
struct ChannelDecision {
  int channel = 0;  // -1 when one joint decision covers all channels
  std::optional<std::string> label;
  double confidence = 0.0;
  std::string rationale;
  Backend backend = Backend::mock;
};

struct ReasonerConfig {
  Backend backend = Backend::mock;
  std::string endpoint_url = "https://api.deepseek.com/v1";
  std::string model = "deepseek-reasoner";
  std::string api_key_env = "FETA_API_KEY";
  double temperature = 0.0;
  double top_p = 1.0;
  std::size_t max_retries = 3;
  std::chrono::milliseconds timeout{120000};
  std::chrono::milliseconds retry_base_delay{500};
  int value_decimals = 3;  // fixed-decimal serialization of sequence values
};

/// Renders the dataset-agnostic channel prompt: retrieved exemplars (label,
/// DTW distance when applicable, fixed-decimal values), the unlabeled query,
/// the label histogram summary, the instruction block with the confidence
/// rubric, and the JSON response stanza with the allowed classes injected.
/// Pure: identical inputs give a byte-identical prompt.
std::string build_prompt(const ChannelSequence& query, const NeighborSet& neighbors,
                         const std::vector<std::string>& classes, int value_decimals = 3);

/// Joint-prompt variant used when channel decomposition is ablated: every
/// channel's exemplars and query share one instruction block and one reply.
std::string build_joint_prompt(const std::vector<ChannelSequence>& queries,
                               const std::vector<NeighborSet>& neighbor_sets,
                               const std::vector<std::string>& classes, int value_decimals = 3);

/// Extracts the first balanced JSON object from arbitrary reply text
/// (tolerating preambles and code fences) and maps it onto a decision.
/// Never throws: anything unusable becomes an invalid-marker decision with
/// the failure noted in the rationale. Label matching is trimmed and
/// case-insensitive; confidence is coerced to a real and clamped to [0, 1].
ChannelDecision parse_decision(const std::string& response,
                               const std::vector<std::string>& classes, int channel);

/// Deterministic offline stand-in for the LLM: a distance-weighted neighbor
/// vote with weight 1/(d + 1e-6), label = argmax class weight (ties to the
/// lexicographically smallest class), confidence = winning share. Neighbors
/// without distances (ablation retrieval) fall back to uniform weights.
ChannelDecision mock_reason(const ChannelSequence& query, const NeighborSet& neighbors);

/// Reasoning ablation: adopt the nearest exemplar's label with confidence 1.
ChannelDecision top1_reason(const NeighborSet& neighbors);

}  // namespace feta
