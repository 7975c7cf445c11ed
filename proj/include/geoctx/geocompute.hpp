#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geoctx/geomodel.hpp"
#include "geoctx/georelate.hpp"

namespace geoctx {

struct PolygonGeometry {
  std::vector<std::vector<GeoPoint>> rings;  // rings[0] is the outer ring

  /// Arithmetic mean of the outer ring's vertices (closing vertex excluded).
  GeoPoint vertex_centroid() const;
};

using Geometry = std::variant<GeoPoint, PolygonGeometry>;

struct Feature {
  std::string id;
  Geometry geometry;
  std::map<std::string, std::string> properties;

  /// The point itself, or the vertex centroid of a polygon.
  GeoPoint representative_point() const;
};

struct FeatureSet {
  std::vector<Feature> features;

  std::size_t size() const noexcept { return features.size(); }
  bool empty() const noexcept { return features.empty(); }
};

/// Parses a GeoJSON FeatureCollection holding Point and Polygon features.
/// Features without an id get "f{index}". Throws Error{parse_error} (with
/// line and byte offset), Error{unsupported_geometry}, Error{duplicate_id}.
FeatureSet parse_feature_collection(std::string_view text);
FeatureSet load_geo_file(const std::string& path);

/// Admin areas from polygon features carrying "name" and "level" properties
/// ("city", "county", "state", "country" or 0..3).
std::vector<AdminArea> to_admin_areas(const FeatureSet& set);

enum class ComputeKind { distance_matrix, nearest_join, within_radius, travel_time };

std::string_view compute_kind_name(ComputeKind kind);

struct DistanceMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> meters;
};

struct NearestPair {
  std::string a_id;
  std::string b_id;
  double meters = 0.0;
};

struct RadiusHit {
  std::string id;
  double meters = 0.0;
};

struct TravelTime {
  std::string a_id;
  std::string b_id;
  double meters = 0.0;
  double seconds = 0.0;
};

using ComputePayload =
    std::variant<DistanceMatrix, std::vector<NearestPair>, std::vector<RadiusHit>, std::vector<TravelTime>>;

struct ComputeResult {
  ComputeKind kind = ComputeKind::distance_matrix;
  ComputePayload payload;
  /// "{op}: inputs={..}; count={n}; min={..} m; max={..} m; mean={..} m"
  /// (durations in seconds for travel_time). Numbers print in shortest
  /// round-trip form, so they parse back exactly.
  std::string summary;

  /// The numeric values the summary describes, in payload order.
  std::vector<double> values() const;
};

/// |A| x |B| haversine meters. Throws Error{empty_input}.
ComputeResult distance_matrix(const FeatureSet& a, const FeatureSet& b, double radius_m = kDefaultEarthRadiusM);

/// Closest feature of `b` for every feature of `a`, ties by ascending id.
ComputeResult nearest_join(const FeatureSet& a, const FeatureSet& b, double radius_m = kDefaultEarthRadiusM);

/// Features of `a` within `r` meters of `center` (inclusive), nearest first,
/// ties by ascending id. Throws Error{invalid_argument} for negative r.
ComputeResult within_radius(const FeatureSet& a, const GeoPoint& center, double r,
                            double radius_m = kDefaultEarthRadiusM);

/// Seconds to cover `meters` at constant `speed_mps`. Throws Error{non_positive_speed}.
double travel_time(double meters, double speed_mps);

/// Travel times along each pair of a nearest join.
ComputeResult travel_times(const ComputeResult& nearest, double speed_mps);

/// Matrix results: {"rows": [...], "cols": [...], "meters": [[...]]}.
/// Joins, radius selections and travel times: a FeatureCollection of the
/// matching features of `a` with the computed values added as properties.
std::string result_to_json(const ComputeResult& result, const FeatureSet& a);

struct ComputeRequest {
  std::string op;  // distance-matrix, nearest-join, within-radius, travel-time
  FeatureSet a;
  std::optional<FeatureSet> b;
  std::optional<GeoPoint> center;
  std::optional<double> radius_m;
  std::optional<double> speed_mps;
};

/// Dispatches on `op`. Throws Error{invalid_argument} for an unknown op or a
/// missing input the op needs.
ComputeResult run_compute(const ComputeRequest& req, double earth_radius_m = kDefaultEarthRadiusM);

}  // namespace geoctx
