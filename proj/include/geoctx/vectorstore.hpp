#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoctx/config.hpp"
#include "geoctx/geomodel.hpp"

namespace geoctx {

// ---------------------------------------------------------------------------
// Geohash

/// Standard base-32 geohash (alternating lon/lat bisection, lon first).
/// Throws Error{invalid_argument} unless 1 <= precision <= 12.
std::string geohash_encode(const GeoPoint& p, int precision);

/// Cell covered by a geohash. Throws Error{parse_error} on bad characters.
BoundingBox geohash_decode_bbox(std::string_view hash);

/// Geohash prefixes at `precision` that together cover every point within
/// `radius_m` of `center`. Empty optional means "the whole globe" (callers
/// fall back to a full scan).
std::optional<std::vector<std::string>> geohash_cover(const GeoPoint& center, double radius_m, int precision,
                                                      double earth_radius_m);

// ---------------------------------------------------------------------------
// Records and queries

struct VectorRecord {
  std::string doc_id;
  std::vector<float> vector;  // standardized, zero or unit length
  std::optional<GeoPoint> point;
  std::optional<TimeWindow> window;
  std::string cell;  // geohash of point, filled in by the store
  double credibility = 1.0;
  std::string source;
  std::string text;  // passage text shown in retrieved context
};

struct Weights {
  double text = 0.6;
  double spatial = 0.3;
  double temporal = 0.1;
};

struct QuerySpec {
  std::vector<double> text_vector;
  std::optional<GeoPoint> point;
  std::optional<std::int64_t> time;
  std::size_t k = 5;
  Weights weights;
  std::optional<double> radius_m;  // ignored without a query point
  double min_credibility = 0.0;
};

struct ScoredHit {
  std::string doc_id;
  double combined = 0.0;
  double text_sim = 0.0;
  double spatial_prox = 0.0;
  double temporal_rel = 0.0;

  friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

/// Weights actually applied to a query. Without a query point the spatial
/// weight is shared out to text and temporal in proportion to their weights
/// (all of it to text when both are zero).
Weights effective_weights(const QuerySpec& q);

/// Throws Error{invalid_weights} unless weights are non-negative and sum to 1 (+-1e-9).
void validate_weights(const Weights& w);

/// Deterministic JSON rendering of hits, used for byte-level comparisons.
std::string hits_to_json(std::span<const ScoredHit> hits);

struct StoreOptions {
  std::size_t dim = 256;
  double lambda_m = 1000.0;
  int geohash_precision = 7;
  double earth_radius_m = 6371008.8;

  static StoreOptions from_config(const EngineConfig& cfg);
};

/// In-memory exact vector store with a geohash cell index.
///
/// Thread-safe: any number of concurrent readers, one writer at a time. A
/// query sees a record either entirely before or entirely after an upsert.
class VectorStore {
 public:
  explicit VectorStore(StoreOptions options = {});
  VectorStore(VectorStore&&) noexcept;
  VectorStore& operator=(VectorStore&&) noexcept;
  ~VectorStore();

  const StoreOptions& options() const noexcept { return options_; }

  /// Inserts or replaces by doc_id; returns true if a record was replaced.
  /// Throws Error{invalid_vector_dim} / Error{invalid_record}.
  bool upsert(VectorRecord record);

  std::size_t size() const;
  std::optional<VectorRecord> get(const std::string& doc_id) const;
  std::vector<std::string> ids() const;  // insertion order

  /// Exact top-k by cosine, ties by ascending doc_id.
  std::vector<ScoredHit> knn(std::span<const double> query, std::size_t k) const;

  /// Exact top-k by w_t*cos + w_s*exp(-d/lambda) + w_d*[time in window].
  /// With a radius the candidates come from the covering geohash cells; the
  /// result is identical to `hybrid_search_full_scan`.
  std::vector<ScoredHit> hybrid_search(const QuerySpec& q) const;
  std::vector<ScoredHit> hybrid_search_full_scan(const QuerySpec& q) const;

  /// Drops hits below `min_credibility`, then keeps a hit only if its cosine
  /// to every already-kept hit is below `dedup_cosine`.
  std::vector<ScoredHit> relevance_filter(std::span<const ScoredHit> hits, double min_credibility,
                                          double dedup_cosine) const;

  /// Little-endian binary: "GCEV", u16 version, u64 count, records.
  void save(const std::string& path) const;
  std::string serialize() const;
  static VectorStore load(const std::string& path, StoreOptions options = {});
  static VectorStore deserialize(std::string_view bytes, StoreOptions options = {});

  static constexpr std::uint16_t kFormatVersion = 1;

 private:
  struct Entry {
    VectorRecord record;
    double norm = 0.0;
  };

  std::vector<ScoredHit> search(const QuerySpec& q, bool use_cells) const;
  ScoredHit score(const Entry& e, const QuerySpec& q, const Weights& w, double query_norm) const;

  StoreOptions options_;
  std::unique_ptr<std::shared_mutex> mutex_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> cells_;
};

}  // namespace geoctx
