#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace feta {

/// One multivariate series: a [channel][time] value grid plus an optional
/// class label. Channel rows always have equal, nonzero length and finite
/// values once parsing has succeeded.
struct LabeledSeries {
  std::vector<std::vector<double>> values;  // [channel][time]
  std::optional<std::string> label;
  std::size_t series_id = 0;  // ordinal index within its split

  std::size_t channel_count() const { return values.size(); }
  std::size_t length() const { return values.empty() ? 0 : values.front().size(); }

  bool operator==(const LabeledSeries&) const = default;
};

/// Result of parsing one `.ts` file: the series in file order plus the
/// header metadata needed to assemble a Dataset.
struct DatasetHalf {
  std::string problem_name;
  bool has_labels = false;
  std::vector<std::string> declared_classes;  // from @classLabel, file order
  std::optional<std::size_t> declared_length;  // from @seriesLength
  std::vector<LabeledSeries> series;

  /// Class set for split-consistency checks: the declared list when present,
  /// otherwise the distinct observed labels. Sorted lexicographically.
  std::vector<std::string> class_set() const;
};

struct Dataset {
  std::string name;
  std::vector<std::string> classes;  // duplicate-free, lexicographically sorted
  std::vector<LabeledSeries> train;
  std::vector<LabeledSeries> test;
  std::size_t channel_count = 0;
  std::optional<std::size_t> declared_length;  // nullopt = variable length

  bool operator==(const Dataset&) const = default;
};

enum class Split { train, test };

/// Parses UEA/sktime `.ts` text. Header directives are case-insensitive and
/// `#` comment lines are skipped. Data lines encode channels separated by
/// `:` with comma-separated values; when `@classLabel true`, the final
/// `:`-field is the label.
///
/// Throws Error with kind malformed_header (no @data, or @timeStamps true),
/// dimension_mismatch, non_numeric_value (including `?` missing-value
/// markers and non-finite literals) or missing_label.
DatasetHalf parse_ts_text(const std::string& text);

/// Combines two parsed halves into a Dataset, checking channel-count and
/// class-set agreement (kind inconsistent_splits on disagreement).
Dataset make_dataset(const std::string& name, const DatasetHalf& train, const DatasetHalf& test);

/// Loads `<root>/<name>/<name>_TRAIN.ts` and `<name>_TEST.ts`.
Dataset load_split(const std::filesystem::path& root, const std::string& name);

/// Serializes one split back to `.ts` text. Values are written with the
/// shortest decimal form that round-trips exactly, so
/// parse -> serialize -> parse is the identity.
std::string to_ts_text(const Dataset& dataset, Split split);

}  // namespace feta
