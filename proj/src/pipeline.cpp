#include "feta/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include "feta/errors.hpp"

namespace feta {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// splitmix64-style mixing so per-(sample, channel) streams are independent of
// execution order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

NeighborDigest digest(const NeighborSet& set) {
  NeighborDigest d;
  d.histogram = set.summary;
  d.labels.reserve(set.neighbors.size());
  d.distances.reserve(set.neighbors.size());
  for (const Neighbor& n : set.neighbors) {
    d.labels.push_back(n.label);
    d.distances.push_back(n.distance);
  }
  return d;
}

json decision_to_json(const ChannelDecision& d) {
  return {
      {"backend", to_string(d.backend)},
      {"channel", d.channel},
      {"confidence", d.confidence},
      {"label", d.label ? json(*d.label) : json(nullptr)},
      {"rationale", d.rationale},
  };
}

}  // namespace

FittedPipeline::FittedPipeline(const Dataset& dataset, const RunConfig& cfg) : cfg_(cfg) {
  const auto start = Clock::now();
  if (dataset.train.empty()) {
    throw Error(ErrorKind::empty_train_set, "dataset '" + dataset.name + "' has no train split");
  }
  if (dataset.classes.empty()) {
    throw Error(ErrorKind::empty_class_set, "dataset '" + dataset.name + "' declares no classes");
  }
  classes_ = dataset.classes;
  channel_count_ = dataset.channel_count;

  std::vector<std::string> labels;
  labels.reserve(dataset.train.size());
  for (const auto& s : dataset.train) {
    if (!s.label) {
      throw Error(ErrorKind::missing_label,
                  "train series " + std::to_string(s.series_id) + " has no label");
    }
    labels.push_back(*s.label);
  }

  train_pool_.resize(channel_count_);
  parallel_for(channel_count_, cfg_.concurrency, [&](std::size_t c) {
    std::vector<LabeledSequence> pool;
    pool.reserve(dataset.train.size());
    for (std::size_t i = 0; i < dataset.train.size(); ++i) {
      pool.push_back({preprocess_channel(dataset.train[i], c, cfg_.preprocess), labels[i]});
    }
    train_pool_[c] = std::move(pool);
  });

  if (cfg_.ablation.no_decomposer) {
    selected_.resize(channel_count_);
    for (std::size_t c = 0; c < channel_count_; ++c) selected_[c] = c;
  } else {
    std::vector<double> margin(channel_count_);
    std::vector<double> loo(channel_count_);
    parallel_for(channel_count_, cfg_.concurrency, [&](std::size_t c) {
      std::vector<ChannelSequence> seqs;
      seqs.reserve(train_pool_[c].size());
      for (const auto& e : train_pool_[c]) seqs.push_back(e.sequence);
      margin[c] = prototype_margin_score(seqs, labels, cfg_.select.eps);
      loo[c] = loo_1nn_accuracy(seqs, labels, cfg_.select.probe_size, cfg_.select.seed);
    });
    ranking_ = fuse_and_rank(margin, loo, cfg_.select);
    const std::size_t take = std::min(cfg_.select.top_m, channel_count_);
    selected_.reserve(take);
    for (std::size_t r = 0; r < take; ++r) selected_.push_back(ranking_[r].channel);
  }
  fit_ms_ = ms_since(start);
}

ChannelDecision FittedPipeline::decide(const ChannelSequence& query, const NeighborSet& neighbors,
                                       LlmClient* client) const {
  if (cfg_.ablation.no_reasoner) {
    return top1_reason(neighbors);
  }
  switch (cfg_.reasoner.backend) {
    case Backend::top1:
      return top1_reason(neighbors);
    case Backend::mock:
      return mock_reason(query, neighbors);
    case Backend::llm: {
      const std::string prompt =
          build_prompt(query, neighbors, classes_, cfg_.reasoner.value_decimals);
      try {
        if (!client) {
          throw Error(ErrorKind::auth_failure, "no reasoner client configured");
        }
        const std::string reply = client->complete(prompt);
        return parse_decision(reply, classes_, static_cast<int>(query.channel));
      } catch (const Error& e) {
        std::cerr << "feta: reasoner call failed on channel " << query.channel << ": " << e.what()
                  << "\n";
        ChannelDecision d;
        d.channel = static_cast<int>(query.channel);
        d.confidence = 0.0;
        d.rationale = std::string("reasoner call failed: ") + e.what();
        d.backend = Backend::llm;
        return d;
      }
    }
  }
  throw Error(ErrorKind::malformed_api_response, "unknown backend");
}

SampleResult FittedPipeline::classify_sample(const LabeledSeries& series, LlmClient* client) const {
  SampleResult result;
  result.series_id = series.series_id;
  result.true_label = series.label;

  std::vector<ChannelSequence> queries;
  std::vector<NeighborSet> neighbor_sets;
  queries.reserve(selected_.size());
  neighbor_sets.reserve(selected_.size());

  for (std::size_t c : selected_) {
    auto t0 = Clock::now();
    queries.push_back(preprocess_channel(series, c, cfg_.preprocess));
    result.timings.preprocess_ms += ms_since(t0);

    t0 = Clock::now();
    if (cfg_.ablation.no_retriever) {
      neighbor_sets.push_back(random_exemplars(train_pool_[c], cfg_.k_neighbors,
                                               mix_seed(cfg_.seed, series.series_id, c)));
    } else {
      neighbor_sets.push_back(
          retrieve_neighbors(queries.back(), train_pool_[c], cfg_.k_neighbors, cfg_.dtw));
    }
    result.timings.retrieve_ms += ms_since(t0);
  }

  std::vector<ChannelDecision> decisions;
  const bool joint_prompt =
      cfg_.ablation.no_decomposer && !cfg_.ablation.no_reasoner && cfg_.reasoner.backend == Backend::llm;

  auto t0 = Clock::now();
  if (joint_prompt) {
    ChannelDecision joint;
    const std::string prompt =
        build_joint_prompt(queries, neighbor_sets, classes_, cfg_.reasoner.value_decimals);
    try {
      if (!client) {
        throw Error(ErrorKind::auth_failure, "no reasoner client configured");
      }
      joint = parse_decision(client->complete(prompt), classes_, -1);
    } catch (const Error& e) {
      std::cerr << "feta: joint reasoner call failed: " << e.what() << "\n";
      joint.channel = -1;
      joint.rationale = std::string("reasoner call failed: ") + e.what();
      joint.backend = Backend::llm;
    }
    decisions.push_back(joint);
    for (std::size_t i = 0; i < selected_.size(); ++i) {
      result.channels.push_back({std::nullopt, digest(neighbor_sets[i]), joint});
    }
  } else {
    for (std::size_t i = 0; i < selected_.size(); ++i) {
      ChannelDecision d = decide(queries[i], neighbor_sets[i], client);
      d.channel = static_cast<int>(selected_[i]);
      decisions.push_back(d);

      std::optional<ChannelScore> score;
      if (!ranking_.empty()) {
        const auto it = std::find_if(ranking_.begin(), ranking_.end(), [&](const ChannelScore& s) {
          return s.channel == selected_[i];
        });
        if (it != ranking_.end()) score = *it;
      }
      result.channels.push_back({score, digest(neighbor_sets[i]), std::move(d)});
    }
  }
  result.timings.reason_ms += ms_since(t0);

  t0 = Clock::now();
  result.decision = cfg_.ablation.no_aggregator ? majority_vote(decisions, classes_)
                                                : aggregate(decisions, classes_, cfg_.aggregate);
  result.timings.aggregate_ms += ms_since(t0);

  result.correct =
      result.true_label && result.decision.label && *result.true_label == *result.decision.label;
  return result;
}

json sample_to_json(const SampleResult& result) {
  json channels = json::array();
  for (const ChannelRecord& record : result.channels) {
    json neighbors = {
        {"histogram", record.neighbors.histogram},
        {"labels", record.neighbors.labels},
    };
    json distances = json::array();
    for (const auto& d : record.neighbors.distances) {
      distances.push_back(d ? json(*d) : json(nullptr));
    }
    neighbors["distances"] = std::move(distances);

    json score(nullptr);
    if (record.score) {
      score = {
          {"channel", record.score->channel},
          {"fused", record.score->fused},
          {"loo_accuracy", record.score->loo_accuracy},
          {"margin_score", record.score->margin_score},
          {"rank", record.score->rank},
      };
    }
    channels.push_back({
        {"decision", decision_to_json(record.decision)},
        {"neighbors", std::move(neighbors)},
        {"score", std::move(score)},
    });
  }

  json prediction = {
      {"confidence", result.decision.confidence},
      {"label", result.decision.label ? json(*result.decision.label) : json(nullptr)},
      {"mode", to_string(result.decision.mode)},
  };
  if (!result.decision.per_class_scores.empty()) {
    prediction["per_class_scores"] = result.decision.per_class_scores;
  }

  return {
      {"channels", std::move(channels)},
      {"correct", result.correct},
      {"prediction", std::move(prediction)},
      {"series_id", result.series_id},
      {"true_label", result.true_label ? json(*result.true_label) : json(nullptr)},
  };
}

json config_to_json(const RunConfig& cfg) {
  json ablation = json::array();
  if (cfg.ablation.no_decomposer) ablation.push_back("decomposer");
  if (cfg.ablation.no_retriever) ablation.push_back("retriever");
  if (cfg.ablation.no_reasoner) ablation.push_back("reasoner");
  if (cfg.ablation.no_aggregator) ablation.push_back("aggregator");
  return {
      {"ablation", std::move(ablation)},
      {"aggregate",
       {{"clip_hi", cfg.aggregate.clip_hi},
        {"clip_lo", cfg.aggregate.clip_lo},
        {"smoothing_eps", cfg.aggregate.smoothing_eps}}},
      {"cache_dir", cfg.cache_dir.string()},
      {"concurrency", cfg.concurrency},
      {"data_root", cfg.data_root.string()},
      {"dataset", cfg.dataset},
      {"dtw",
       {{"band_radius", cfg.dtw.band_radius ? json(*cfg.dtw.band_radius) : json(nullptr)}}},
      {"k_neighbors", cfg.k_neighbors},
      {"out", cfg.out_path.string()},
      {"preprocess",
       {{"sigma_floor", cfg.preprocess.sigma_floor},
        {"target_length", cfg.preprocess.target_length}}},
      {"reasoner",
       {{"api_key_env", cfg.reasoner.api_key_env},
        {"backend", to_string(cfg.reasoner.backend)},
        {"endpoint_url", cfg.reasoner.endpoint_url},
        {"max_retries", cfg.reasoner.max_retries},
        {"model", cfg.reasoner.model},
        {"retry_base_delay_ms", cfg.reasoner.retry_base_delay.count()},
        {"temperature", cfg.reasoner.temperature},
        {"timeout_ms", cfg.reasoner.timeout.count()},
        {"top_p", cfg.reasoner.top_p},
        {"value_decimals", cfg.reasoner.value_decimals}}},
      {"seed", cfg.seed},
      {"select",
       {{"alpha", cfg.select.alpha},
        {"eps", cfg.select.eps},
        {"probe_size", cfg.select.probe_size},
        {"seed", cfg.select.seed},
        {"top_m", cfg.select.top_m}}},
  };
}

json report_to_json(const RunReport& report) {
  return {
      {"accuracy", report.accuracy},
      {"config", report.config_snapshot},
      {"correct_count", report.correct_count},
      {"dataset", report.dataset},
      {"network_calls", report.network_calls},
      {"null_decisions", report.null_decisions},
      {"per_class_accuracy", report.per_class_accuracy},
      {"sample_count", report.sample_count},
      {"timing_ms",
       {{"aggregate", report.stage_totals.aggregate_ms},
        {"fit", report.fit_ms},
        {"preprocess", report.stage_totals.preprocess_ms},
        {"reason", report.stage_totals.reason_ms},
        {"retrieve", report.stage_totals.retrieve_ms}}},
  };
}

std::filesystem::path summary_path(const std::filesystem::path& out_path) {
  std::filesystem::path p = out_path;
  p.replace_extension();
  p += ".summary.json";
  return p;
}

RunReport evaluate(const RunConfig& cfg) {
  const Dataset dataset = load_split(cfg.data_root, cfg.dataset);
  FittedPipeline fitted(dataset, cfg);

  std::optional<LlmClient> client;
  if (cfg.reasoner.backend == Backend::llm && !cfg.ablation.no_reasoner) {
    client.emplace(cfg.reasoner, cfg.cache_dir);
  }

  std::vector<SampleResult> results(dataset.test.size());
  parallel_for(dataset.test.size(), cfg.concurrency, [&](std::size_t i) {
    results[i] = fitted.classify_sample(dataset.test[i], client ? &*client : nullptr);
  });

  RunReport report;
  report.dataset = cfg.dataset;
  report.sample_count = results.size();
  report.config_snapshot = config_to_json(cfg);
  report.fit_ms = fitted.fit_ms();

  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // correct, total
  for (const SampleResult& r : results) {
    if (r.correct) ++report.correct_count;
    if (r.decision.mode == FusionMode::null_decision) ++report.null_decisions;
    if (r.true_label) {
      auto& [correct, total] = per_class[*r.true_label];
      if (r.correct) ++correct;
      ++total;
    }
    report.stage_totals.preprocess_ms += r.timings.preprocess_ms;
    report.stage_totals.retrieve_ms += r.timings.retrieve_ms;
    report.stage_totals.reason_ms += r.timings.reason_ms;
    report.stage_totals.aggregate_ms += r.timings.aggregate_ms;
  }
  report.accuracy = results.empty()
                        ? 0.0
                        : static_cast<double>(report.correct_count) / static_cast<double>(results.size());
  for (const auto& [name, counts] : per_class) {
    report.per_class_accuracy[name] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  if (client) report.network_calls = client->network_calls();

  if (cfg.out_path.has_parent_path()) {
    std::filesystem::create_directories(cfg.out_path.parent_path());
  }
  std::ofstream jsonl(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!jsonl) {
    throw Error(ErrorKind::file_not_found, "cannot open " + cfg.out_path.string() + " for writing");
  }
  for (const SampleResult& r : results) {
    jsonl << sample_to_json(r).dump() << "\n";
  }
  std::ofstream summary(summary_path(cfg.out_path), std::ios::binary | std::ios::trunc);
  summary << report_to_json(report).dump(2) << "\n";

  return report;
}

}  // namespace feta
