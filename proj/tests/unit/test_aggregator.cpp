#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "feta/aggregator.hpp"
#include "feta/errors.hpp"
#include "support/oracles.hpp"

using namespace feta;

namespace {

ChannelDecision decision(const char* label, double confidence) {
  ChannelDecision d;
  d.label = label;
  d.confidence = confidence;
  return d;
}

ChannelDecision invalid() {
  ChannelDecision d;
  d.label = std::nullopt;
  d.confidence = 0.0;
  return d;
}

const std::vector<std::string> kAbc = {"A", "B", "C"};

}  // namespace

TEST_CASE("consensus fuses agreeing confidences with the product rule") {
  AggregateConfig cfg;
  const FinalDecision f =
      aggregate({decision("A", 0.9), decision("A", 0.7), decision("A", 0.5)}, kAbc, cfg);
  CHECK(f.label == "A");
  CHECK(f.mode == FusionMode::consensus);
  // 1 - 0.1 * 0.3 * 0.5 = 0.985
  CHECK(f.confidence == doctest::Approx(0.985).epsilon(1e-12));
  CHECK(f.per_class_scores.empty());
}

TEST_CASE("a single valid decision is unanimous and the cap bites at 0.99") {
  const FinalDecision f = aggregate({decision("A", 0.999)}, kAbc, AggregateConfig{});
  CHECK(f.label == "A");
  CHECK(f.mode == FusionMode::consensus);
  CHECK(f.confidence == 0.99);
}

TEST_CASE("weighted mode hand example") {
  AggregateConfig cfg;
  cfg.clip_lo = 0.05;
  cfg.clip_hi = 0.95;
  cfg.smoothing_eps = 0.01;
  const FinalDecision f =
      aggregate({decision("A", 0.9), decision("B", 0.6), decision("A", 0.4)}, kAbc, cfg);
  CHECK(f.label == "A");
  CHECK(f.mode == FusionMode::weighted);
  // s_A = 0.9 + 0.01 + 0.4 = 1.31, s_B = 0.62, s_C = 0.03, total 1.96.
  CHECK(f.confidence == doctest::Approx(1.31 / 1.96).epsilon(1e-12));
  CHECK(f.confidence == doctest::Approx(0.6684).epsilon(1e-4));
  CHECK(f.per_class_scores.at("A") == doctest::Approx(1.31 / 1.96).epsilon(1e-12));
  CHECK(f.per_class_scores.at("B") == doctest::Approx(0.62 / 1.96).epsilon(1e-12));
  CHECK(f.per_class_scores.at("C") == doctest::Approx(0.03 / 1.96).epsilon(1e-12));

  double sum = 0.0;
  for (const auto& [y, s] : f.per_class_scores) sum += s;
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("invalid and out-of-set decisions are discarded before fusing") {
  const FinalDecision all_invalid = aggregate({invalid(), invalid()}, kAbc, AggregateConfig{});
  CHECK(all_invalid.mode == FusionMode::null_decision);
  CHECK_FALSE(all_invalid.label.has_value());
  CHECK(all_invalid.confidence == 0.0);

  // An out-of-set label behaves like an invalid marker.
  const FinalDecision f =
      aggregate({decision("Z", 0.9), decision("A", 0.4)}, kAbc, AggregateConfig{});
  CHECK(f.label == "A");
  CHECK(f.mode == FusionMode::consensus);

  try {
    aggregate({decision("A", 0.5)}, {}, AggregateConfig{});
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_class_set);
  }
}

TEST_CASE("consensus confidence is monotone in agreeing agents and bounded") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> conf(0.01, 0.99);
  for (int round = 0; round < 200; ++round) {
    std::vector<ChannelDecision> agreeing;
    const std::size_t n = 1 + rng() % 5;
    double max_conf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = conf(rng);
      agreeing.push_back(decision("B", w));
      max_conf = std::max(max_conf, w);
    }
    const FinalDecision base = aggregate(agreeing, kAbc, AggregateConfig{});

    // Raw (uncapped) fused confidence sits in [max w_c, 1).
    double product = 1.0;
    for (const auto& d : agreeing) product *= 1.0 - d.confidence;
    const double raw = 1.0 - product;
    CHECK(raw >= max_conf - 1e-12);
    CHECK(raw < 1.0);
    CHECK(base.confidence == doctest::Approx(std::min(0.99, raw)).epsilon(1e-12));

    // Appending an agreeing decision with w > 0 strictly raises the raw value.
    agreeing.push_back(decision("B", conf(rng)));
    double product2 = 1.0;
    for (const auto& d : agreeing) product2 *= 1.0 - d.confidence;
    CHECK(1.0 - product2 > raw);
  }
}

TEST_CASE("aggregate is invariant to the order of decisions") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int round = 0; round < 200; ++round) {
    std::vector<ChannelDecision> decisions;
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = rng() % (kAbc.size() + 1);
      if (pick == kAbc.size()) {
        decisions.push_back(invalid());
      } else {
        decisions.push_back(decision(kAbc[pick].c_str(), conf(rng)));
      }
    }
    const FinalDecision base = aggregate(decisions, kAbc, AggregateConfig{});
    std::shuffle(decisions.begin(), decisions.end(), rng);
    const FinalDecision shuffled = aggregate(decisions, kAbc, AggregateConfig{});
    CHECK(base.label == shuffled.label);
    CHECK(base.mode == shuffled.mode);
    CHECK(base.confidence == doctest::Approx(shuffled.confidence).epsilon(1e-12));
  }
}

TEST_CASE("weighted-mode score identity") {
  AggregateConfig cfg;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int round = 0; round < 200; ++round) {
    std::vector<ChannelDecision> decisions;
    const std::size_t n = 2 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      decisions.push_back(decision(kAbc[rng() % kAbc.size()].c_str(), conf(rng)));
    }
    const FinalDecision f = aggregate(decisions, kAbc, cfg);
    if (f.mode != FusionMode::weighted) continue;

    // sum_y s_y = sum_c clipped(w_c) + (|Y| - 1) * n_valid * eps
    double clipped_sum = 0.0;
    for (const auto& d : decisions) {
      clipped_sum += std::min(cfg.clip_hi, std::max(cfg.clip_lo, d.confidence));
    }
    const double expected_total =
        clipped_sum + static_cast<double>(kAbc.size() - 1) * static_cast<double>(n) * cfg.smoothing_eps;
    // Recover the actual total from the normalized winning score.
    const double actual_winning_raw = [&] {
      double s = 0.0;
      for (const auto& d : decisions) {
        s += (*d.label == *f.label) ? std::min(cfg.clip_hi, std::max(cfg.clip_lo, d.confidence))
                                    : cfg.smoothing_eps;
      }
      return s;
    }();
    CHECK(std::abs(f.confidence - actual_winning_raw / expected_total) < 1e-12);
  }
}

TEST_CASE("clipping does not change the argmax when no confidence crosses a bound") {
  AggregateConfig cfg;
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> conf(cfg.clip_lo + 1e-3, cfg.clip_hi - 1e-3);
  for (int round = 0; round < 100; ++round) {
    std::vector<ChannelDecision> decisions;
    for (std::size_t i = 0; i < 4; ++i) {
      decisions.push_back(decision(kAbc[rng() % kAbc.size()].c_str(), conf(rng)));
    }
    const FinalDecision clipped = aggregate(decisions, kAbc, cfg);
    AggregateConfig wide;
    wide.clip_lo = 1e-9;
    wide.clip_hi = 1.0 - 1e-9;
    wide.smoothing_eps = cfg.smoothing_eps;
    const FinalDecision unclipped = aggregate(decisions, kAbc, wide);
    CHECK(clipped.label == unclipped.label);
  }
}

TEST_CASE("aggregate matches the naive transcription on random cases") {
  AggregateConfig cfg;
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int round = 0; round < 500; ++round) {
    std::vector<ChannelDecision> decisions;
    std::vector<oracles::NaiveDecision> naive;
    const std::size_t n = rng() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = rng() % (kAbc.size() + 1);
      if (pick == kAbc.size()) {
        decisions.push_back(invalid());
        naive.push_back({std::nullopt, 0.0});
      } else {
        const double w = conf(rng);
        decisions.push_back(decision(kAbc[pick].c_str(), w));
        naive.push_back({kAbc[pick], w});
      }
    }
    const FinalDecision got = aggregate(decisions, kAbc, cfg);
    const oracles::NaiveFinal want =
        oracles::naive_aggregate(naive, kAbc, cfg.clip_lo, cfg.clip_hi, cfg.smoothing_eps);
    CHECK(got.label == want.label);
    CHECK(std::abs(got.confidence - want.confidence) < 1e-12);
    CHECK(to_string(got.mode) == want.mode);
  }
}

TEST_CASE("majority vote") {
  const FinalDecision two_one =
      majority_vote({decision("A", 0.2), decision("A", 0.3), decision("B", 0.99)}, kAbc);
  CHECK(two_one.label == "A");
  CHECK(two_one.confidence == doctest::Approx(2.0 / 3.0));

  const FinalDecision tie = majority_vote({decision("B", 0.9), decision("A", 0.1)}, kAbc);
  CHECK(tie.label == "A");  // lexicographic tie-break
  CHECK(tie.confidence == doctest::Approx(0.5));

  const FinalDecision none = majority_vote({invalid(), invalid()}, kAbc);
  CHECK(none.mode == FusionMode::null_decision);
  CHECK(none.confidence == 0.0);

  try {
    majority_vote({decision("A", 0.5)}, {});
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_class_set);
  }
}
