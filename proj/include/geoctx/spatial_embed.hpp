#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoctx/config.hpp"
#include "geoctx/geomodel.hpp"
#include "geoctx/geotext.hpp"

namespace geoctx {

/// Dense vector that is either all zeros or unit length.
struct TextVector {
  std::vector<double> values;
  double norm() const;
};

/// Multi-scale sinusoidal position code: for scale s_k = 2^k degrees the
/// components are sin/cos of pi*lat/s_k and pi*lon/s_k.
struct LocationVector {
  std::vector<double> values;
};

struct SpatialTextVector {
  std::vector<double> values;
};

struct DynamicVector {
  std::vector<double> values;
  TimeWindow window;
};

struct CompositeSpatialVector {
  LocationVector location;
  SpatialTextVector spatial_text;
  std::optional<DynamicVector> dynamic;
  std::vector<double> standardized;  // length d_text
};

/// Seeded 64-bit token hash (FNV-1a over the bytes, then a splitmix64 finalizer).
std::uint64_t feature_hash(std::string_view token, std::uint64_t seed);

/// Signed feature hashing: index = h mod dim, sign from the top hash bit;
/// accumulated then L2-normalized. No terms gives the zero vector.
TextVector embed_text(std::span<const std::string> terms, std::size_t dim, std::uint64_t seed);
TextVector embed_text(std::span<const Token> tokens, std::size_t dim, std::uint64_t seed);

/// `scales` = d_loc / 4 (16 for the default 64 components).
LocationVector encode_location(const GeoPoint& p, std::size_t scales = 16);

double cosine(std::span<const double> a, std::span<const double> b);

/// Text embedder contract. Implementations must be deterministic per
/// (terms, dim, configuration) for stores to stay reproducible.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::span<const std::string> terms, std::size_t dim) const = 0;
};

class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::uint64_t seed) : seed_(seed) {}
  std::vector<double> embed(std::span<const std::string> terms, std::size_t dim) const override;

 private:
  std::uint64_t seed_;
};

/// Fixed random projection from the concatenated composite space to d_text.
/// Entries are +-1/sqrt(d_out), signs drawn once from mt19937_64(seed).
class Standardizer {
 public:
  Standardizer(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return d_in_; }
  std::size_t output_dim() const noexcept { return d_out_; }

  /// Linear part only. Throws Error{dimension_mismatch}.
  std::vector<double> project(std::span<const double> input) const;
  /// project() then L2-normalize; zero stays zero.
  std::vector<double> standardize(std::span<const double> input) const;

 private:
  std::size_t d_in_;
  std::size_t d_out_;
  std::vector<double> matrix_;  // row-major d_out x d_in
};

/// Builds composite vectors and query vectors with one shared configuration.
///
/// The concatenation scales the location block by 1/sqrt(d_loc/2) so that
/// each of the three blocks has unit length (the raw location code has
/// length sqrt(d_loc/2), which would otherwise swamp both text blocks).
class SpatialEncoder {
 public:
  explicit SpatialEncoder(const EngineConfig& cfg, std::shared_ptr<const Embedder> embedder = nullptr);

  const EngineConfig& config() const noexcept { return cfg_; }
  const Standardizer& standardizer() const noexcept { return standardizer_; }

  /// Throws Error{missing_window} if `event_text` is given without a window,
  /// Error{missing_point} if the landmark has no point.
  CompositeSpatialVector make_composite(const LandmarkRecord& landmark,
                                        const std::optional<std::string>& event_text) const;

  std::vector<double> concat(const CompositeSpatialVector& c) const;
  std::vector<double> concat(const std::optional<GeoPoint>& point, std::span<const double> spatial_text,
                             std::span<const double> dynamic) const;
  std::vector<double> standardize(std::span<const double> concatenated) const;

  /// True iff `c.standardized` equals a fresh standardization of its blocks.
  bool verify(const CompositeSpatialVector& c) const;

  /// Query vector through the same pipeline: the location block comes from
  /// `point` (zeros if absent), the text block from `terms`, and the dynamic
  /// block from `terms` too when the query carries a time.
  std::vector<double> query_vector(std::span<const std::string> terms, const std::optional<GeoPoint>& point,
                                   bool has_time) const;

  std::vector<double> embed(std::span<const std::string> terms, std::size_t dim) const;

 private:
  EngineConfig cfg_;
  std::shared_ptr<const Embedder> embedder_;
  Standardizer standardizer_;
};

/// Terms describing a landmark: name, category, description.
std::vector<std::string> landmark_terms(const LandmarkRecord& landmark);

}  // namespace geoctx
