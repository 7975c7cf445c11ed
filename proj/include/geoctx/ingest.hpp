#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geoctx/config.hpp"
#include "geoctx/geomodel.hpp"
#include "geoctx/spatial_embed.hpp"
#include "geoctx/vectorstore.hpp"

namespace geoctx {

// ---------------------------------------------------------------------------
// Gazetteer CSV
//
// Columns: id,name,lat,lon,category,description,source,credibility,admin_path
// optionally followed by event_text,window_start,window_end (window bounds
// as epoch seconds or ISO-8601 UTC). admin_path is pipe-separated,
// innermost first. Quoting per RFC 4180.

struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

struct GazetteerLoad {
  std::vector<LandmarkRecord> records;
  std::vector<Diagnostic> diagnostics;  // skipped rows (lenient mode)
};

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader; a UTF-8 BOM is ignored. Throws Error{parse_error} on an
/// unterminated quoted field.
std::vector<CsvRow> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

/// Throws Error{missing_header}, Error{duplicate_id}, and in strict mode
/// Error{row_error} (line set). Lenient mode skips bad rows into diagnostics.
GazetteerLoad parse_gazetteer(std::string_view text, bool strict = false);
GazetteerLoad load_gazetteer(const std::string& path, bool strict = false);
std::string gazetteer_to_csv(const std::vector<LandmarkRecord>& records);

/// Records within `radius_m` of `p`, nearest first (ties by id).
std::vector<LandmarkRecord> query_by_location(const std::vector<LandmarkRecord>& records, const GeoPoint& p,
                                              double radius_m, double earth_radius_m = 6371008.8);

// ---------------------------------------------------------------------------
// Descriptions

struct DescriptionCandidate {
  std::string landmark_id;
  std::string text;
  std::string source;
  double credibility = 1.0;
  double relevance = 0.0;
};

/// Source of candidate descriptions for a landmark.
class DescriptionFetcher {
 public:
  virtual ~DescriptionFetcher() = default;
  virtual std::vector<DescriptionCandidate> fetch(const LandmarkRecord& landmark) const = 0;
};

/// Reads {dir}/{landmark_id}.txt. Line 1 is "source: {label}", an optional
/// "credibility: {x}" line may follow, and the rest is the description.
/// Missing files yield no candidates. Never touches the network.
class FixtureFetcher final : public DescriptionFetcher {
 public:
  explicit FixtureFetcher(std::string dir) : dir_(std::move(dir)) {}
  std::vector<DescriptionCandidate> fetch(const LandmarkRecord& landmark) const override;

 private:
  std::string dir_;
};

/// Cosine between hashed embeddings of the description and the query terms,
/// clamped to [0, 1].
double score_relevance(std::string_view description, const std::vector<std::string>& query_terms,
                       const EngineConfig& cfg = {});

struct QualityReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t dropped_low_credibility = 0;
  std::size_t dropped_language = 0;
  std::size_t dropped_redundant = 0;
};

/// Code points that are printable (or \t \n \r) over all code points;
/// invalid UTF-8 bytes count as unprintable. Empty text scores 1.
double printable_ratio(std::string_view text);

/// Credibility gate, then language quality (min length in code points and
/// printable ratio), then redundancy against already-kept candidates.
std::pair<std::vector<DescriptionCandidate>, QualityReport> quality_filter(
    const std::vector<DescriptionCandidate>& candidates, const EngineConfig& cfg);

// ---------------------------------------------------------------------------
// Indexing

/// Passage text stored alongside a landmark's vector.
std::string landmark_passage(const LandmarkRecord& r);

/// Composite-encodes and upserts every record (doc_id = landmark id).
std::size_t index_gazetteer(const std::vector<LandmarkRecord>& records, VectorStore& store,
                            const SpatialEncoder& encoder);

/// Indexes kept description candidates as separate records with doc_id
/// "{landmark_id}#{source}".
std::size_t index_descriptions(const std::vector<DescriptionCandidate>& kept,
                               const std::vector<LandmarkRecord>& records, VectorStore& store,
                               const SpatialEncoder& encoder);

}  // namespace geoctx
