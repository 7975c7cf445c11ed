#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geoctx {

/// Spherical lat/lon position in degrees. Latitude is in [-90, 90] and
/// longitude is kept in (-180, 180]; the only way to build one is through
/// `normalize_point` (or `GeoPoint::make`, its alias), so every instance is
/// valid.
class GeoPoint {
 public:
  static GeoPoint make(double lat, double lon);

  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
  friend GeoPoint normalize_point(double lat, double lon);

 private:
  GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {}
  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Wraps `lon` into (-180, 180] (so -180 becomes +180) and validates `lat`.
/// Throws Error{out_of_range_latitude} or Error{non_finite_input}.
GeoPoint normalize_point(double lat, double lon);

/// Axis-aligned lat/lon box with inclusive edges. Boxes crossing the
/// antimeridian are rejected; split them into two boxes instead.
class BoundingBox {
 public:
  static BoundingBox make(double min_lat, double max_lat, double min_lon, double max_lon);

  double min_lat() const noexcept { return min_lat_; }
  double max_lat() const noexcept { return max_lat_; }
  double min_lon() const noexcept { return min_lon_; }
  double max_lon() const noexcept { return max_lon_; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  BoundingBox(double a, double b, double c, double d)
      : min_lat_(a), max_lat_(b), min_lon_(c), max_lon_(d) {}
  double min_lat_, max_lat_, min_lon_, max_lon_;
};

bool point_in_bbox(const GeoPoint& p, const BoundingBox& b) noexcept;

/// Closed interval of UTC epoch seconds.
class TimeWindow {
 public:
  static TimeWindow make(std::int64_t start, std::int64_t end);

  std::int64_t start() const noexcept { return start_; }
  std::int64_t end() const noexcept { return end_; }
  bool contains(std::int64_t t) const noexcept { return start_ <= t && t <= end_; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;

 private:
  TimeWindow(std::int64_t s, std::int64_t e) : start_(s), end_(e) {}
  std::int64_t start_ = 0;
  std::int64_t end_ = 0;
};

enum class AdminLevel : int { city = 0, county = 1, state = 2, country = 3 };

struct AdminArea {
  std::string id;
  std::string name;
  AdminLevel level = AdminLevel::city;
  std::vector<GeoPoint> polygon;  // closed: front() == back()

  /// Closes the ring if needed and checks for at least 3 distinct vertices.
  static AdminArea make(std::string id, std::string name, AdminLevel level,
                        std::vector<GeoPoint> ring);
};

struct LandmarkRecord {
  std::string id;
  std::string name;
  std::optional<GeoPoint> point;
  std::string category;
  std::string description;
  std::string source;
  double credibility = 1.0;
  std::vector<std::string> admin_path;  // innermost first
  std::optional<TimeWindow> window;
  std::optional<std::string> event_text;

  /// Throws Error{invalid_record} on an empty name/id or credibility outside [0, 1].
  void validate() const;
};

/// Checks that levels strictly increase along `path` (innermost first).
/// Ids that do not resolve in `areas` are an error.
void validate_admin_path(std::span<const std::string> path, std::span<const AdminArea> areas);

/// Parses either an integer epoch-seconds value or an ISO-8601 UTC timestamp
/// ("YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" with optional trailing 'Z').
std::int64_t parse_utc_instant(const std::string& text);

}  // namespace geoctx
