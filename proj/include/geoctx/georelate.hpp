#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geoctx/config.hpp"
#include "geoctx/geomodel.hpp"

namespace geoctx {

inline constexpr double kDefaultEarthRadiusM = 6371008.8;

/// Great-circle distance in meters (haversine formula on a sphere).
double haversine(const GeoPoint& a, const GeoPoint& b, double radius_m = kDefaultEarthRadiusM);

/// Forward azimuth from `a` toward `b`, clockwise from true north, in [0, 360).
/// Throws Error{undefined_bearing} for coincident or antipodal points.
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

/// Point reached by travelling `distance_m` from `origin` along the great
/// circle with the given initial bearing.
GeoPoint destination(const GeoPoint& origin, double bearing_deg, double distance_m,
                     double radius_m = kDefaultEarthRadiusM);

/// Compass token for a bearing. `ways` is 8 or 16; sectors are half-open and
/// centered on each token, so 337.5 is "north" with 8 ways.
std::string cardinal(double bearing_deg, int ways = 8);

struct ProximityThresholds {
  double adjacent_m = 100.0;
  double close_m = 1000.0;
};

std::string proximity_phrase(double distance_m, double radius_m, ProximityThresholds t = {});

/// Even-odd ray casting in the lat/lon plane; boundary points are inside.
/// `ring` may be open or closed. Throws Error{degenerate_polygon}.
bool point_in_polygon(const GeoPoint& p, std::span<const GeoPoint> ring);

struct HierarchyPath {
  std::vector<std::pair<std::string, AdminLevel>> areas;  // innermost first
};

HierarchyPath containment_path(const GeoPoint& p, std::span<const AdminArea> areas);

struct RelationPhrase {
  std::string subject_id;
  std::string object_id;
  double distance_m = 0.0;
  double bearing_deg = 0.0;
  std::string cardinal;   // empty when points coincide (no defined bearing)
  std::string proximity;  // token from proximity_phrase
  std::string rendered;
};

/// Describes where `b` lies relative to `a`:
///   "{b} is adjacent to {a}"                 below cfg.adjacent_m
///   "{b} is close to {a}, to the {cardinal}" below cfg.close_m
///   "{b} is {dist} {cardinal} of {a}"        otherwise
/// Distances print as "2.0 km" below 10 km and whole km ("12 km") above.
RelationPhrase render_relation(const LandmarkRecord& a, const LandmarkRecord& b, const EngineConfig& cfg = {});

/// "X is within Y, which is within Z"; a single area renders as its name.
/// Ids missing from `names` render as the id itself.
std::string render_hierarchy(const HierarchyPath& path, const std::unordered_map<std::string, std::string>& names);

/// "X km"/"X.Y km" formatting shared by relation rendering.
std::string format_km(double meters);

}  // namespace geoctx
