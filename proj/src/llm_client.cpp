#include "feta/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>  // CPPHTTPLIB_OPENSSL_SUPPORT is set target-wide

#include <nlohmann/json.hpp>

#include "feta/errors.hpp"

namespace feta {
namespace {

using json = nlohmann::json;

constexpr const char* kSystemPrompt =
    "You are a time series classification assistant. Follow the instructions exactly and reply "
    "with a single JSON object.";

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0F]);
  }
  return out;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "https://host:port/v1" -> ("https://host:port", "/v1")
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const std::size_t scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key_for(const std::string& prompt, const std::string& model) {
  return sha256_hex(model + "\n" + prompt);
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
  const std::filesystem::path path = dir_ / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json record = json::parse(buffer.str(), nullptr, false);
  if (record.is_discarded() || !record.contains("response") || !record["response"].is_string()) {
    return std::nullopt;
  }
  return record["response"].get<std::string>();
}

void ResponseCache::store(const std::string& key, const std::string& model,
                          const std::string& response) const {
  std::filesystem::create_directories(dir_);
  json record = {
      {"prompt_hash", key},
      {"model", model},
      {"response", response},
      {"timestamp", iso_timestamp()},
  };
  // Write-then-rename keeps concurrent writers from exposing partial entries.
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::this_thread::get_id();
  const std::filesystem::path tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << record.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, dir_ / (key + ".json"));
}

LlmClient::LlmClient(ReasonerConfig cfg, const std::filesystem::path& cache_dir)
    : cfg_(std::move(cfg)), cache_(cache_dir) {}

void LlmClient::backoff(std::size_t attempt) {
  const auto base = cfg_.retry_base_delay.count();
  std::int64_t delay = base << std::min<std::size_t>(attempt, 6);
  delay = std::min<std::int64_t>(delay, 30000);
  {
    std::lock_guard<std::mutex> lock(jitter_mutex_);
    if (base > 0) delay += static_cast<std::int64_t>(jitter_rng_() % static_cast<std::uint64_t>(base));
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(delay));
}

std::string LlmClient::complete(const std::string& prompt) {
  const std::string key = ResponseCache::key_for(prompt, cfg_.model);
  if (auto hit = cache_.lookup(key)) {
    return *hit;
  }

  const char* api_key = std::getenv(cfg_.api_key_env.c_str());
  if (!api_key || !*api_key) {
    throw Error(ErrorKind::auth_failure,
                "environment variable " + cfg_.api_key_env + " is not set");
  }

  const auto [base_url, path_prefix] = split_endpoint(cfg_.endpoint_url);
  const std::string path = path_prefix + "/chat/completions";
  const json body = {
      {"model", cfg_.model},
      {"messages",
       {{{"role", "system"}, {"content", kSystemPrompt}},
        {{"role", "user"}, {"content", prompt}}}},
      {"temperature", cfg_.temperature},
      {"top_p", cfg_.top_p},
  };
  const std::string payload = body.dump();

  std::string last_failure;
  for (std::size_t attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) backoff(attempt - 1);
    ++network_calls_;

    httplib::Client client(base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
    client.set_connection_timeout(secs.count(), 0);
    client.set_read_timeout(secs.count(), 0);
    client.set_write_timeout(secs.count(), 0);
    client.set_bearer_token_auth(api_key);

    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorKind::auth_failure, "HTTP " + std::to_string(res->status));
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::malformed_api_response,
                  "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty() ||
        !reply["choices"][0].contains("message") ||
        !reply["choices"][0]["message"].contains("content") ||
        !reply["choices"][0]["message"]["content"].is_string()) {
      throw Error(ErrorKind::malformed_api_response,
                  "reply lacks choices[0].message.content: " + res->body.substr(0, 200));
    }
    const std::string content = reply["choices"][0]["message"]["content"].get<std::string>();
    cache_.store(key, cfg_.model, content);
    return content;
  }

  const std::string detail =
      last_failure + " after " + std::to_string(cfg_.max_retries + 1) + " attempts";
  if (last_failure == "HTTP 429") {
    throw Error(ErrorKind::rate_limited, detail);
  }
  throw Error(ErrorKind::timeout, detail);
}

}  // namespace feta
