#include "geoctx/error.hpp"

namespace geoctx {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::out_of_range_latitude: return "out_of_range_latitude";
    case ErrorCode::non_finite_input: return "non_finite_input";
    case ErrorCode::invalid_bbox: return "invalid_bbox";
    case ErrorCode::invalid_time_window: return "invalid_time_window";
    case ErrorCode::invalid_record: return "invalid_record";
    case ErrorCode::degenerate_polygon: return "degenerate_polygon";
    case ErrorCode::invalid_n: return "invalid_n";
    case ErrorCode::vocab_too_small: return "vocab_too_small";
    case ErrorCode::bad_template: return "bad_template";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::unparseable_address: return "unparseable_address";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::missing_window: return "missing_window";
    case ErrorCode::invalid_vector_dim: return "invalid_vector_dim";
    case ErrorCode::invalid_weights: return "invalid_weights";
    case ErrorCode::corrupt_file: return "corrupt_file";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::undefined_bearing: return "undefined_bearing";
    case ErrorCode::missing_point: return "missing_point";
    case ErrorCode::empty_path: return "empty_path";
    case ErrorCode::unsupported_geometry: return "unsupported_geometry";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::non_positive_speed: return "non_positive_speed";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::empty_prompt: return "empty_prompt";
    case ErrorCode::empty_store: return "empty_store";
    case ErrorCode::client_error: return "client_error";
    case ErrorCode::missing_header: return "missing_header";
    case ErrorCode::row_error: return "row_error";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::dataset_parse_error: return "dataset_parse_error";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace geoctx
