#include <pybind11/chrono.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "feta/aggregator.hpp"
#include "feta/channel_select.hpp"
#include "feta/dataset.hpp"
#include "feta/errors.hpp"
#include "feta/llm_client.hpp"
#include "feta/pipeline.hpp"
#include "feta/preprocess.hpp"
#include "feta/reasoner.hpp"
#include "feta/retrieval.hpp"

namespace py = pybind11;
using namespace feta;

namespace {

std::vector<double> to_values(const std::vector<double>& v) { return v; }

ChannelSequence make_channel_sequence(std::vector<double> values, std::size_t series_id,
                                      std::size_t channel) {
  ChannelSequence s;
  s.values = std::move(values);
  s.series_id = series_id;
  s.channel = channel;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Training-free multivariate time-series classification: channel ranking, DTW "
            "exemplar retrieval, pluggable channel reasoning, confidence-weighted fusion.";

  py::register_exception<Error>(m, "FetaError", PyExc_RuntimeError);

  // ---- dataset ----
  py::class_<LabeledSeries>(m, "LabeledSeries")
      .def(py::init([](std::vector<std::vector<double>> values,
                       std::optional<std::string> label, std::size_t series_id) {
             LabeledSeries s;
             s.values = std::move(values);
             s.label = std::move(label);
             s.series_id = series_id;
             return s;
           }),
           py::arg("values"), py::arg("label") = std::nullopt, py::arg("series_id") = 0)
      .def_readonly("values", &LabeledSeries::values)
      .def_readonly("label", &LabeledSeries::label)
      .def_readonly("series_id", &LabeledSeries::series_id)
      .def_property_readonly("channel_count", &LabeledSeries::channel_count)
      .def_property_readonly("length", &LabeledSeries::length);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_readonly("classes", &Dataset::classes)
      .def_readonly("train", &Dataset::train)
      .def_readonly("test", &Dataset::test)
      .def_readonly("channel_count", &Dataset::channel_count)
      .def_readonly("declared_length", &Dataset::declared_length);

  py::enum_<Split>(m, "Split").value("train", Split::train).value("test", Split::test);

  m.def("parse_ts_text", &parse_ts_text, py::arg("text"),
        "Parse UEA .ts text into a dataset half (series plus header metadata).");
  py::class_<DatasetHalf>(m, "DatasetHalf")
      .def_readonly("problem_name", &DatasetHalf::problem_name)
      .def_readonly("has_labels", &DatasetHalf::has_labels)
      .def_readonly("declared_classes", &DatasetHalf::declared_classes)
      .def_readonly("series", &DatasetHalf::series)
      .def("class_set", &DatasetHalf::class_set);
  m.def("make_dataset", &make_dataset, py::arg("name"), py::arg("train"), py::arg("test"));
  m.def("load_split", &load_split, py::arg("root"), py::arg("name"),
        "Load <root>/<name>/<name>_TRAIN.ts and _TEST.ts into a Dataset.");
  m.def("to_ts_text", &to_ts_text, py::arg("dataset"), py::arg("split"),
        "Serialize one split back to .ts text (value-exact round trip).");

  // ---- preprocess ----
  py::class_<PreprocessConfig>(m, "PreprocessConfig")
      .def(py::init<>())
      .def_readwrite("target_length", &PreprocessConfig::target_length)
      .def_readwrite("sigma_floor", &PreprocessConfig::sigma_floor);

  py::class_<ChannelSequence>(m, "ChannelSequence")
      .def(py::init(&make_channel_sequence), py::arg("values"), py::arg("series_id") = 0,
           py::arg("channel") = 0)
      .def_property_readonly("values",
                             [](const ChannelSequence& s) { return to_values(s.values); })
      .def_readonly("series_id", &ChannelSequence::series_id)
      .def_readonly("channel", &ChannelSequence::channel);

  m.def(
      "znormalize",
      [](const std::vector<double>& raw, double sigma_floor) {
        return znormalize(raw, sigma_floor);
      },
      py::arg("raw"), py::arg("sigma_floor") = 1e-8);
  m.def(
      "subsample",
      [](const std::vector<double>& seq, std::size_t target_length) {
        return subsample(seq, target_length);
      },
      py::arg("seq"), py::arg("target_length"));
  m.def("preprocess_channel", &preprocess_channel, py::arg("series"), py::arg("channel"),
        py::arg("config") = PreprocessConfig{});

  // ---- channel selection ----
  py::class_<ChannelScore>(m, "ChannelScore")
      .def_readonly("channel", &ChannelScore::channel)
      .def_readonly("margin_score", &ChannelScore::margin_score)
      .def_readonly("loo_accuracy", &ChannelScore::loo_accuracy)
      .def_readonly("fused", &ChannelScore::fused)
      .def_readonly("rank", &ChannelScore::rank);

  py::class_<SelectConfig>(m, "SelectConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &SelectConfig::alpha)
      .def_readwrite("top_m", &SelectConfig::top_m)
      .def_readwrite("probe_size", &SelectConfig::probe_size)
      .def_readwrite("eps", &SelectConfig::eps)
      .def_readwrite("seed", &SelectConfig::seed);

  m.def("prototype_margin_score", &prototype_margin_score, py::arg("channel_train"),
        py::arg("labels"), py::arg("eps") = 1e-8);
  m.def("loo_1nn_accuracy", &loo_1nn_accuracy, py::arg("channel_train"), py::arg("labels"),
        py::arg("n_probe"), py::arg("seed") = 42);
  m.def("fuse_and_rank", &fuse_and_rank, py::arg("margin_scores"), py::arg("loo_accuracies"),
        py::arg("config") = SelectConfig{});

  // ---- retrieval ----
  py::class_<DtwConfig>(m, "DtwConfig")
      .def(py::init<>())
      .def_readwrite("band_radius", &DtwConfig::band_radius);

  py::class_<DtwResult>(m, "DtwResult")
      .def_readonly("distance", &DtwResult::distance)
      .def_readonly("band_widened", &DtwResult::band_widened)
      .def("__float__", [](const DtwResult& r) { return r.distance; });

  py::class_<Neighbor>(m, "Neighbor")
      .def_readonly("exemplar", &Neighbor::exemplar)
      .def_readonly("label", &Neighbor::label)
      .def_readonly("distance", &Neighbor::distance);

  py::class_<NeighborSet>(m, "NeighborSet")
      .def_readonly("channel", &NeighborSet::channel)
      .def_readonly("neighbors", &NeighborSet::neighbors)
      .def_readonly("summary", &NeighborSet::summary)
      .def_readonly("band_widened", &NeighborSet::band_widened);

  py::class_<LabeledSequence>(m, "LabeledSequence")
      .def(py::init([](ChannelSequence sequence, std::string label) {
             return LabeledSequence{std::move(sequence), std::move(label)};
           }),
           py::arg("sequence"), py::arg("label"))
      .def_readonly("sequence", &LabeledSequence::sequence)
      .def_readonly("label", &LabeledSequence::label);

  m.def(
      "dtw_distance",
      [](const std::vector<double>& a, const std::vector<double>& b, const DtwConfig& cfg) {
        return dtw_distance(a, b, cfg);
      },
      py::arg("a"), py::arg("b"), py::arg("config") = DtwConfig{});
  m.def("retrieve_neighbors", &retrieve_neighbors, py::arg("query"), py::arg("train"),
        py::arg("k"), py::arg("config") = DtwConfig{});
  m.def("random_exemplars", &random_exemplars, py::arg("train"), py::arg("k"),
        py::arg("seed") = 42);

  // ---- reasoner ----
  py::enum_<Backend>(m, "Backend")
      .value("llm", Backend::llm)
      .value("mock", Backend::mock)
      .value("top1", Backend::top1);

  py::class_<ChannelDecision>(m, "ChannelDecision")
      .def(py::init([](int channel, std::optional<std::string> label, double confidence) {
             ChannelDecision d;
             d.channel = channel;
             d.label = std::move(label);
             d.confidence = confidence;
             return d;
           }),
           py::arg("channel") = 0, py::arg("label") = std::nullopt, py::arg("confidence") = 0.0)
      .def_readonly("channel", &ChannelDecision::channel)
      .def_readonly("label", &ChannelDecision::label)
      .def_readonly("confidence", &ChannelDecision::confidence)
      .def_readonly("rationale", &ChannelDecision::rationale)
      .def_readonly("backend", &ChannelDecision::backend);

  py::class_<ReasonerConfig>(m, "ReasonerConfig")
      .def(py::init<>())
      .def_readwrite("backend", &ReasonerConfig::backend)
      .def_readwrite("endpoint_url", &ReasonerConfig::endpoint_url)
      .def_readwrite("model", &ReasonerConfig::model)
      .def_readwrite("api_key_env", &ReasonerConfig::api_key_env)
      .def_readwrite("temperature", &ReasonerConfig::temperature)
      .def_readwrite("top_p", &ReasonerConfig::top_p)
      .def_readwrite("max_retries", &ReasonerConfig::max_retries)
      .def_readwrite("timeout", &ReasonerConfig::timeout)
      .def_readwrite("retry_base_delay", &ReasonerConfig::retry_base_delay)
      .def_readwrite("value_decimals", &ReasonerConfig::value_decimals);

  m.def("build_prompt", &build_prompt, py::arg("query"), py::arg("neighbors"),
        py::arg("classes"), py::arg("value_decimals") = 3);
  m.def("build_joint_prompt", &build_joint_prompt, py::arg("queries"), py::arg("neighbor_sets"),
        py::arg("classes"), py::arg("value_decimals") = 3);
  m.def("parse_decision", &parse_decision, py::arg("response"), py::arg("classes"),
        py::arg("channel") = 0);
  m.def("mock_reason", &mock_reason, py::arg("query"), py::arg("neighbors"));
  m.def("top1_reason", &top1_reason, py::arg("neighbors"));

  // ---- aggregator ----
  py::enum_<FusionMode>(m, "FusionMode")
      .value("consensus", FusionMode::consensus)
      .value("weighted", FusionMode::weighted)
      .value("null_decision", FusionMode::null_decision);

  py::class_<FinalDecision>(m, "FinalDecision")
      .def_readonly("label", &FinalDecision::label)
      .def_readonly("confidence", &FinalDecision::confidence)
      .def_readonly("mode", &FinalDecision::mode)
      .def_readonly("per_class_scores", &FinalDecision::per_class_scores);

  py::class_<AggregateConfig>(m, "AggregateConfig")
      .def(py::init<>())
      .def_readwrite("clip_lo", &AggregateConfig::clip_lo)
      .def_readwrite("clip_hi", &AggregateConfig::clip_hi)
      .def_readwrite("smoothing_eps", &AggregateConfig::smoothing_eps);

  m.def("aggregate", &aggregate, py::arg("decisions"), py::arg("classes"),
        py::arg("config") = AggregateConfig{});
  m.def("majority_vote", &majority_vote, py::arg("decisions"), py::arg("classes"));

  // ---- pipeline ----
  py::class_<AblationFlags>(m, "AblationFlags")
      .def(py::init<>())
      .def_readwrite("no_decomposer", &AblationFlags::no_decomposer)
      .def_readwrite("no_retriever", &AblationFlags::no_retriever)
      .def_readwrite("no_reasoner", &AblationFlags::no_reasoner)
      .def_readwrite("no_aggregator", &AblationFlags::no_aggregator);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("data_root", &RunConfig::data_root)
      .def_readwrite("dataset", &RunConfig::dataset)
      .def_readwrite("preprocess", &RunConfig::preprocess)
      .def_readwrite("select", &RunConfig::select)
      .def_readwrite("dtw", &RunConfig::dtw)
      .def_readwrite("k_neighbors", &RunConfig::k_neighbors)
      .def_readwrite("reasoner", &RunConfig::reasoner)
      .def_readwrite("aggregate", &RunConfig::aggregate)
      .def_readwrite("ablation", &RunConfig::ablation)
      .def_readwrite("concurrency", &RunConfig::concurrency)
      .def_readwrite("out_path", &RunConfig::out_path)
      .def_readwrite("cache_dir", &RunConfig::cache_dir)
      .def_readwrite("seed", &RunConfig::seed);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("dataset", &RunReport::dataset)
      .def_readonly("sample_count", &RunReport::sample_count)
      .def_readonly("correct_count", &RunReport::correct_count)
      .def_readonly("accuracy", &RunReport::accuracy)
      .def_readonly("per_class_accuracy", &RunReport::per_class_accuracy)
      .def_readonly("null_decisions", &RunReport::null_decisions)
      .def_readonly("network_calls", &RunReport::network_calls)
      .def("config_json", [](const RunReport& r) { return r.config_snapshot.dump(); });

  py::class_<FittedPipeline>(m, "FittedPipeline")
      .def(py::init<const Dataset&, const RunConfig&>(), py::arg("dataset"), py::arg("config"))
      .def_property_readonly("classes", &FittedPipeline::classes)
      .def_property_readonly("ranking", &FittedPipeline::ranking)
      .def_property_readonly("selected_channels", &FittedPipeline::selected_channels)
      .def(
          "classify_sample",
          [](const FittedPipeline& p, const LabeledSeries& series) {
            return p.classify_sample(series);
          },
          py::arg("series"),
          "Classify one series with the mock or top1 backend (llm runs go through evaluate).");

  py::class_<SampleResult>(m, "SampleResult")
      .def_readonly("series_id", &SampleResult::series_id)
      .def_readonly("true_label", &SampleResult::true_label)
      .def_readonly("decision", &SampleResult::decision)
      .def_readonly("correct", &SampleResult::correct)
      .def("to_json", [](const SampleResult& r) { return sample_to_json(r).dump(); });

  m.def("evaluate", &evaluate, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(),
        "Run the full pipeline over a dataset's official test split; writes JSONL plus a "
        "summary JSON and returns the report.");
  m.def("summary_path", &summary_path, py::arg("out_path"));
}
