#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace geoctx {

enum class AnchorMode { first_place, centroid };

/// Every tunable number of the engine in one place. The text form is flat
/// "key = value" lines with '#' comments; key names equal the field names.
struct EngineConfig {
  // embedding dimensions
  std::size_t d_text = 256;
  std::size_t d_loc = 64;  // 4 components per scale
  std::size_t d_st = 256;
  std::size_t d_dyn = 128;
  std::uint64_t hash_seed = 0x5eed0f6e0c0de5ULL;
  std::uint64_t projection_seed = 0x9a0c0de57a7eULL;

  // hybrid scoring
  double w_text = 0.6;
  double w_spatial = 0.3;
  double w_temporal = 0.1;
  double lambda_m = 1000.0;
  int geohash_precision = 7;

  // relation phrasing
  double adjacent_m = 100.0;
  double close_m = 1000.0;
  double radius_m = 10000.0;
  int cardinal_ways = 8;

  // relevance and quality filtering
  double min_credibility = 0.3;
  double dedup_cosine = 0.95;
  std::size_t min_description_chars = 20;
  double min_printable_ratio = 0.9;

  // retrieval and prompt assembly
  std::size_t default_k = 5;
  std::size_t max_context_chars = 4000;
  AnchorMode anchor = AnchorMode::first_place;

  double earth_radius_m = 6371008.8;

  /// Throws Error{config_error} if weights don't sum to 1, a dimension is 0,
  /// lambda is not positive, and so on.
  void validate() const;
};

EngineConfig parse_config(const std::string& text);
EngineConfig load_config(const std::string& path);
std::string to_config_text(const EngineConfig& cfg);

}  // namespace geoctx
