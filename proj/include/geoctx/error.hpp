#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geoctx {

enum class ErrorCode {
  out_of_range_latitude,
  non_finite_input,
  invalid_bbox,
  invalid_time_window,
  invalid_record,
  degenerate_polygon,
  invalid_n,
  vocab_too_small,
  bad_template,
  parse_error,
  unparseable_address,
  dimension_mismatch,
  missing_window,
  invalid_vector_dim,
  invalid_weights,
  corrupt_file,
  version_mismatch,
  io_error,
  undefined_bearing,
  missing_point,
  empty_path,
  unsupported_geometry,
  empty_input,
  non_positive_speed,
  duplicate_id,
  empty_prompt,
  empty_store,
  client_error,
  missing_header,
  row_error,
  length_mismatch,
  dataset_parse_error,
  config_error,
  invalid_argument,
};

/// Stable snake_case name used in CLI diagnostics ("error_code=<name>").
std::string_view error_code_name(ErrorCode code);

/// Exception carrying a machine-readable code and, for parse-like failures,
/// the byte offset (or line number, see `line()`) where input stopped making
/// sense.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(message), code_(code), offset_(offset), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
  std::optional<std::size_t> line_;
};

}  // namespace geoctx
