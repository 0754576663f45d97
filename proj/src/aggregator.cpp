#include "feta/aggregator.hpp"

#include <algorithm>
#include <cmath>

#include "feta/errors.hpp"

namespace feta {
namespace {

std::vector<const ChannelDecision*> valid_decisions(const std::vector<ChannelDecision>& decisions,
                                                    const std::vector<std::string>& classes) {
  std::vector<const ChannelDecision*> valid;
  for (const auto& d : decisions) {
    if (d.label && std::find(classes.begin(), classes.end(), *d.label) != classes.end()) {
      valid.push_back(&d);
    }
  }
  return valid;
}

}  // namespace

const char* to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::consensus: return "consensus";
    case FusionMode::weighted: return "weighted";
    case FusionMode::null_decision: return "null";
  }
  return "null";
}

FinalDecision aggregate(const std::vector<ChannelDecision>& decisions,
                        const std::vector<std::string>& classes, const AggregateConfig& cfg) {
  if (classes.empty()) {
    throw Error(ErrorKind::empty_class_set, "aggregate needs a non-empty class set");
  }
  const auto valid = valid_decisions(decisions, classes);

  FinalDecision out;
  if (valid.empty()) {
    return out;  // null decision, zero confidence
  }

  const bool unanimous = std::all_of(valid.begin(), valid.end(), [&](const ChannelDecision* d) {
    return *d->label == *valid.front()->label;
  });
  if (unanimous) {
    double miss = 1.0;
    for (const ChannelDecision* d : valid) miss *= 1.0 - d->confidence;
    out.label = *valid.front()->label;
    out.confidence = std::min(0.99, 1.0 - miss);
    out.mode = FusionMode::consensus;
    return out;
  }

  double total = 0.0;
  std::map<std::string, double> scores;
  for (const auto& y : classes) {
    double s = 0.0;
    for (const ChannelDecision* d : valid) {
      const double clipped = std::min(cfg.clip_hi, std::max(cfg.clip_lo, d->confidence));
      s += (*d->label == y) ? clipped : cfg.smoothing_eps;
    }
    scores[y] = s;
    total += s;
  }

  const std::string* best = nullptr;
  for (const auto& y : classes) {
    if (!best || scores[y] > scores[*best] || (scores[y] == scores[*best] && y < *best)) {
      best = &y;
    }
  }
  out.label = *best;
  out.confidence = scores[*best] / total;
  out.mode = FusionMode::weighted;
  for (auto& [y, s] : scores) out.per_class_scores[y] = s / total;
  return out;
}

FinalDecision majority_vote(const std::vector<ChannelDecision>& decisions,
                            const std::vector<std::string>& classes) {
  if (classes.empty()) {
    throw Error(ErrorKind::empty_class_set, "majority_vote needs a non-empty class set");
  }
  const auto valid = valid_decisions(decisions, classes);

  FinalDecision out;
  if (valid.empty()) {
    return out;
  }

  std::map<std::string, std::size_t> counts;
  for (const ChannelDecision* d : valid) ++counts[*d->label];

  const std::string* best = nullptr;
  for (const auto& [y, n] : counts) {
    if (!best || n > counts[*best]) best = &y;  // map order breaks ties lexicographically
  }
  out.label = *best;
  out.confidence = static_cast<double>(counts[*best]) / static_cast<double>(valid.size());
  out.mode = counts.size() == 1 ? FusionMode::consensus : FusionMode::weighted;
  for (const auto& [y, n] : counts) {
    out.per_class_scores[y] = static_cast<double>(n) / static_cast<double>(valid.size());
  }
  return out;
}

}  // namespace feta
