#include "geoctx/georelate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geoctx/error.hpp"

namespace geoctx {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// haversine h and 1 - h, each written as a sum of squares so neither
// cancels near coincident or antipodal points
std::pair<double, double> haversine_terms(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double sd = std::sin((phi2 - phi1) / 2.0), cd = std::cos((phi2 - phi1) / 2.0);
  const double ss = std::sin((phi1 + phi2) / 2.0), cs = std::cos((phi1 + phi2) / 2.0);
  const double sl = std::sin((b.lon() - a.lon()) * kDegToRad / 2.0);
  const double cl = std::cos((b.lon() - a.lon()) * kDegToRad / 2.0);
  return {sd * sd * cl * cl + cs * cs * sl * sl, cd * cd * cl * cl + ss * ss * sl * sl};
}

bool near_antipodal(const GeoPoint& a, const GeoPoint& b) { return haversine_terms(a, b).second <= 1e-15; }

double wrap_degrees(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  if (d >= 360.0) d -= 360.0;
  return d;
}

const std::array<const char*, 8> kCardinal8 = {"north", "northeast", "east", "southeast",
                                               "south", "southwest", "west", "northwest"};
const std::array<const char*, 16> kCardinal16 = {
    "north", "north-northeast", "northeast", "east-northeast", "east", "east-southeast",
    "southeast", "south-southeast", "south", "south-southwest", "southwest", "west-southwest",
    "west", "west-northwest", "northwest", "north-northwest"};

std::size_t distinct_vertices(std::span<const GeoPoint> ring) {
  std::vector<GeoPoint> seen;
  for (const auto& p : ring) {
    if (std::find(seen.begin(), seen.end(), p) == seen.end()) seen.push_back(p);
  }
  return seen.size();
}

bool on_segment(double px, double py, double x1, double y1, double x2, double y2) {
  const double cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
  const double scale = std::max({std::abs(x2 - x1), std::abs(y2 - y1), 1.0});
  if (std::abs(cross) > 1e-12 * scale) return false;
  return px >= std::min(x1, x2) && px <= std::max(x1, x2) && py >= std::min(y1, y2) && py <= std::max(y1, y2);
}

}  // namespace

double haversine(const GeoPoint& a, const GeoPoint& b, double radius_m) {
  const auto [h, rest] = haversine_terms(a, b);
  return 2.0 * radius_m * std::atan2(std::sqrt(h), std::sqrt(rest));
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) throw Error(ErrorCode::undefined_bearing, "bearing between coincident points is undefined");
  if (near_antipodal(a, b)) {
    throw Error(ErrorCode::undefined_bearing, "bearing between antipodal points is undefined");
  }
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dlam = (b.lon() - a.lon()) * kDegToRad;
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  return wrap_degrees(std::atan2(y, x) * kRadToDeg);
}

GeoPoint destination(const GeoPoint& origin, double bearing_deg, double distance_m, double radius_m) {
  const double delta = distance_m / radius_m;
  const double theta = bearing_deg * kDegToRad;
  const double phi1 = origin.lat() * kDegToRad;
  const double lam1 = origin.lon() * kDegToRad;
  const double sin_phi2 = std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lam2 = lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                        std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  return normalize_point(phi2 * kRadToDeg, lam2 * kRadToDeg);
}

std::string cardinal(double bearing_deg, int ways) {
  if (ways != 8 && ways != 16) throw Error(ErrorCode::invalid_argument, "cardinal ways must be 8 or 16");
  const double width = 360.0 / ways;
  const double b = wrap_degrees(bearing_deg);
  const auto sector = static_cast<std::size_t>(std::floor((b + width / 2.0) / width)) % static_cast<std::size_t>(ways);
  return ways == 8 ? kCardinal8[sector] : kCardinal16[sector];
}

std::string proximity_phrase(double distance_m, double radius_m, ProximityThresholds t) {
  if (distance_m < t.adjacent_m) return "adjacent to";
  if (distance_m < t.close_m) return "close to";
  if (distance_m <= radius_m) return fmt::format("within a radius of {} m", radius_m);
  return "far from";
}

bool point_in_polygon(const GeoPoint& p, std::span<const GeoPoint> ring) {
  if (distinct_vertices(ring) < 3) throw Error(ErrorCode::degenerate_polygon, "polygon needs 3 distinct vertices");
  const double px = p.lon();
  const double py = p.lat();
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = ring[i].lon(), yi = ring[i].lat();
    const double xj = ring[j].lon(), yj = ring[j].lat();
    if (on_segment(px, py, xj, yj, xi, yi)) return true;
    if ((yi > py) != (yj > py)) {
      const double x_cross = (xj - xi) * (py - yi) / (yj - yi) + xi;
      if (px < x_cross) inside = !inside;
    }
  }
  return inside;
}

HierarchyPath containment_path(const GeoPoint& p, std::span<const AdminArea> areas) {
  std::vector<const AdminArea*> hits;
  for (const auto& area : areas) {
    if (point_in_polygon(p, area.polygon)) hits.push_back(&area);
  }
  std::sort(hits.begin(), hits.end(), [](const AdminArea* x, const AdminArea* y) {
    if (x->level != y->level) return x->level < y->level;
    return x->id < y->id;
  });
  HierarchyPath path;
  for (const auto* area : hits) {
    // one area per level keeps the path strictly increasing
    if (!path.areas.empty() && path.areas.back().second == area->level) continue;
    path.areas.emplace_back(area->id, area->level);
  }
  return path;
}

std::string format_km(double meters) {
  const double km = meters / 1000.0;
  if (meters < 10000.0) return fmt::format("{:.1f} km", km);
  return fmt::format("{:.0f} km", km);
}

RelationPhrase render_relation(const LandmarkRecord& a, const LandmarkRecord& b, const EngineConfig& cfg) {
  if (!a.point || !b.point) {
    throw Error(ErrorCode::missing_point,
                fmt::format("relation between '{}' and '{}' needs both points", a.id, b.id));
  }
  RelationPhrase r;
  r.subject_id = b.id;
  r.object_id = a.id;
  r.distance_m = haversine(*a.point, *b.point, cfg.earth_radius_m);
  r.proximity = proximity_phrase(r.distance_m, cfg.radius_m, {cfg.adjacent_m, cfg.close_m});
  if (!(*a.point == *b.point) && !near_antipodal(*a.point, *b.point)) {
    r.bearing_deg = initial_bearing(*a.point, *b.point);
    r.cardinal = cardinal(r.bearing_deg, cfg.cardinal_ways);
  }
  if (r.distance_m < cfg.adjacent_m) {
    r.rendered = fmt::format("{} is adjacent to {}", b.name, a.name);
  } else if (r.distance_m < cfg.close_m) {
    r.rendered = fmt::format("{} is close to {}, to the {}", b.name, a.name, r.cardinal);
  } else {
    r.rendered = fmt::format("{} is {} {} of {}", b.name, format_km(r.distance_m), r.cardinal, a.name);
  }
  return r;
}

std::string render_hierarchy(const HierarchyPath& path, const std::unordered_map<std::string, std::string>& names) {
  if (path.areas.empty()) throw Error(ErrorCode::empty_path, "cannot render an empty hierarchy path");
  auto name_of = [&](const std::string& id) {
    auto it = names.find(id);
    return it == names.end() ? id : it->second;
  };
  std::string out = name_of(path.areas[0].first);
  for (std::size_t i = 1; i < path.areas.size(); ++i) {
    out += (i == 1 ? " is within " : ", which is within ");
    out += name_of(path.areas[i].first);
  }
  return out;
}

}  // namespace geoctx
