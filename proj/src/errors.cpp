#include "feta/errors.hpp"

namespace feta {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_header: return "MalformedHeader";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::non_numeric_value: return "NonNumericValue";
    case ErrorKind::missing_label: return "MissingLabel";
    case ErrorKind::file_not_found: return "FileNotFound";
    case ErrorKind::inconsistent_splits: return "InconsistentSplits";
    case ErrorKind::empty_sequence: return "EmptySequence";
    case ErrorKind::non_finite_input: return "NonFiniteInput";
    case ErrorKind::channel_out_of_range: return "ChannelOutOfRange";
    case ErrorKind::single_class: return "SingleClass";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::too_few_samples: return "TooFewSamples";
    case ErrorKind::empty_train_set: return "EmptyTrainSet";
    case ErrorKind::empty_neighbors: return "EmptyNeighbors";
    case ErrorKind::empty_class_set: return "EmptyClassSet";
    case ErrorKind::timeout: return "Timeout";
    case ErrorKind::auth_failure: return "AuthFailure";
    case ErrorKind::rate_limited: return "RateLimited";
    case ErrorKind::malformed_api_response: return "MalformedApiResponse";
  }
  return "UnknownError";
}

}  // namespace feta
