#pragma once

#include <stdexcept>
#include <string>

namespace feta {

enum class ErrorKind {
  // dataset
  malformed_header,
  dimension_mismatch,
  non_numeric_value,
  missing_label,
  file_not_found,
  inconsistent_splits,
  // preprocessing
  empty_sequence,
  non_finite_input,
  channel_out_of_range,
  // channel scoring
  single_class,
  length_mismatch,
  too_few_samples,
  // retrieval / reasoning
  empty_train_set,
  empty_neighbors,
  empty_class_set,
  // transport
  timeout,
  auth_failure,
  rate_limited,
  malformed_api_response,
};

const char* to_string(ErrorKind kind);

/// Single exception type for all library failure modes; `kind()` carries the
/// machine-readable category, what() the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace feta
