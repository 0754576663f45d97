#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feta/errors.hpp"
#include "feta/pipeline.hpp"

namespace {

feta::Backend parse_backend(const std::string& name) {
  if (name == "llm") return feta::Backend::llm;
  if (name == "top1") return feta::Backend::top1;
  return feta::Backend::mock;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "feta: training-free multivariate time-series classification via channel decomposition, "
      "DTW exemplar retrieval, channel-level reasoning, and confidence-weighted fusion"};

  feta::RunConfig cfg;
  std::string data_root = "data";
  std::string out = "results.jsonl";
  std::string cache_dir = ".feta_cache";
  std::string backend = "mock";
  std::vector<std::string> ablate;
  std::int64_t band_radius = -1;
  std::uint64_t timeout_s = 120;

  app.add_option("--data-root", data_root, "Directory containing <name>/<name>_TRAIN.ts files")
      ->capture_default_str();
  app.add_option("--dataset", cfg.dataset, "Dataset name within the data root")->required();
  app.add_option("--target-length", cfg.preprocess.target_length,
                 "Uniform subsampling target length L")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}))
      ->capture_default_str();
  app.add_option("--alpha", cfg.select.alpha,
                 "Channel-score fusion weight on the prototype-margin score")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--top-m", cfg.select.top_m, "Number of channels selected for reasoning")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--k-neighbors", cfg.k_neighbors, "Exemplars retrieved per channel (K_r)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--probe-size", cfg.select.probe_size,
                 "Probe subset size for leave-one-out 1NN channel scoring")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--band-radius", band_radius,
                 "Sakoe-Chiba band half-width for DTW (-1 = unconstrained)")
      ->capture_default_str();
  app.add_option("--backend", backend, "Reasoner backend")
      ->check(CLI::IsMember({"llm", "mock", "top1"}))
      ->capture_default_str();
  app.add_option("--model", cfg.reasoner.model, "Chat-completion model name")
      ->capture_default_str();
  app.add_option("--endpoint", cfg.reasoner.endpoint_url, "Chat-completion base URL")
      ->capture_default_str();
  app.add_option("--api-key-env", cfg.reasoner.api_key_env,
                 "Environment variable holding the API key")
      ->capture_default_str();
  app.add_option("--temperature", cfg.reasoner.temperature, "Sampling temperature")
      ->capture_default_str();
  app.add_option("--top-p", cfg.reasoner.top_p, "Nucleus sampling parameter")
      ->capture_default_str();
  app.add_option("--max-retries", cfg.reasoner.max_retries,
                 "Retries after transient transport failures")
      ->capture_default_str();
  app.add_option("--timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
  app.add_option("--clip-lo", cfg.aggregate.clip_lo, "Lower confidence clip bound")
      ->capture_default_str();
  app.add_option("--clip-hi", cfg.aggregate.clip_hi, "Upper confidence clip bound")
      ->capture_default_str();
  app.add_option("--smoothing-eps", cfg.aggregate.smoothing_eps,
                 "Smoothing weight for non-voted classes")
      ->capture_default_str();
  app.add_option("--concurrency", cfg.concurrency, "Worker threads for samples and channels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed (probe sampling and ablation retrieval)")
      ->capture_default_str();
  app.add_option("--cache-dir", cache_dir, "Response cache directory")->capture_default_str();
  app.add_option("--out", out, "JSONL output path (summary lands next to it)")
      ->capture_default_str();
  app.add_option("--ablate", ablate, "Disable a stage (repeatable)")
      ->check(CLI::IsMember({"decomposer", "retriever", "reasoner", "aggregator"}));

  CLI11_PARSE(app, argc, argv);

  cfg.data_root = data_root;
  cfg.out_path = out;
  cfg.cache_dir = cache_dir;
  cfg.reasoner.backend = parse_backend(backend);
  cfg.reasoner.timeout = std::chrono::milliseconds(timeout_s * 1000);
  cfg.select.seed = cfg.seed;
  if (band_radius >= 0) cfg.dtw.band_radius = static_cast<std::size_t>(band_radius);
  const std::set<std::string> flags(ablate.begin(), ablate.end());
  cfg.ablation.no_decomposer = flags.count("decomposer") > 0;
  cfg.ablation.no_retriever = flags.count("retriever") > 0;
  cfg.ablation.no_reasoner = flags.count("reasoner") > 0;
  cfg.ablation.no_aggregator = flags.count("aggregator") > 0;

  try {
    const feta::RunReport report = feta::evaluate(cfg);
    std::cout << "dataset:        " << report.dataset << "\n"
              << "samples:        " << report.sample_count << "\n"
              << "correct:        " << report.correct_count << "\n"
              << "accuracy:       " << report.accuracy << "\n"
              << "null decisions: " << report.null_decisions << "\n"
              << "results:        " << cfg.out_path.string() << "\n"
              << "summary:        " << feta::summary_path(cfg.out_path).string() << "\n";
  } catch (const feta::Error& e) {
    std::cerr << "feta: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "feta: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
