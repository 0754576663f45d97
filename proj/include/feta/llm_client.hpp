#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include "feta/reasoner.hpp"

namespace feta {

/// On-disk store of chat-completion replies, one JSON record per entry
/// ({prompt_hash, model, response, timestamp}) keyed by
/// sha256(model \n prompt). Entries are written to a temp file and renamed
/// into place, so concurrent writers are safe.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string key_for(const std::string& prompt, const std::string& model);

  std::optional<std::string> lookup(const std::string& key) const;
  void store(const std::string& key, const std::string& model, const std::string& response) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Chat-completion client. Every reply is cached before it is returned and
/// cache hits short-circuit the network entirely, so a warm cache replays a
/// run without any transport. Transient failures (transport errors, HTTP
/// 429/5xx) are retried with exponential backoff plus jitter.
class LlmClient {
 public:
  LlmClient(ReasonerConfig cfg, const std::filesystem::path& cache_dir);

  /// Cache lookup, then one POST per attempt. Throws Error with kind
  /// auth_failure (missing key env var or HTTP 401/403), rate_limited
  /// (429 after retries), timeout (transport failure or 5xx after retries)
  /// or malformed_api_response.
  std::string complete(const std::string& prompt);

  /// Number of HTTP attempts made so far; zero on a fully cached run.
  std::size_t network_calls() const { return network_calls_.load(); }

  const ReasonerConfig& config() const { return cfg_; }
  const ResponseCache& cache() const { return cache_; }

 private:
  void backoff(std::size_t attempt);

  ReasonerConfig cfg_;
  ResponseCache cache_;
  std::atomic<std::size_t> network_calls_{0};
  std::mutex jitter_mutex_;
  std::mt19937_64 jitter_rng_{std::random_device{}()};
};

}  // namespace feta
