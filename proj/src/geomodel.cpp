#include "geoctx/geomodel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <fmt/format.h>

#include "geoctx/error.hpp"

namespace geoctx {

GeoPoint GeoPoint::make(double lat, double lon) { return normalize_point(lat, lon); }

GeoPoint normalize_point(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw Error(ErrorCode::non_finite_input, "coordinate is NaN or infinite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw Error(ErrorCode::out_of_range_latitude, fmt::format("latitude {} outside [-90, 90]", lat));
  }
  // fmod is exact, and so is the single +/-360 shift below, so the result
  // differs from the input by an exact multiple of 360.
  double wrapped = std::fmod(lon, 360.0);
  if (wrapped <= -180.0) {
    wrapped += 360.0;
  } else if (wrapped > 180.0) {
    wrapped -= 360.0;
  }
  if (wrapped == 0.0) wrapped = 0.0;  // drop negative zero
  if (lat == 0.0) lat = 0.0;
  return GeoPoint(lat, wrapped);
}

BoundingBox BoundingBox::make(double min_lat, double max_lat, double min_lon, double max_lon) {
  for (double v : {min_lat, max_lat, min_lon, max_lon}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite_input, "bounding box edge is not finite");
  }
  if (min_lat < -90.0 || max_lat > 90.0 || min_lat > max_lat) {
    throw Error(ErrorCode::invalid_bbox, fmt::format("bad latitude range [{}, {}]", min_lat, max_lat));
  }
  if (min_lon < -180.0 || max_lon > 180.0 || min_lon > max_lon) {
    throw Error(ErrorCode::invalid_bbox,
                fmt::format("bad longitude range [{}, {}] (antimeridian boxes must be split)", min_lon,
                            max_lon));
  }
  return BoundingBox(min_lat, max_lat, min_lon, max_lon);
}

bool point_in_bbox(const GeoPoint& p, const BoundingBox& b) noexcept {
  return b.min_lat() <= p.lat() && p.lat() <= b.max_lat() && b.min_lon() <= p.lon() &&
         p.lon() <= b.max_lon();
}

TimeWindow TimeWindow::make(std::int64_t start, std::int64_t end) {
  if (start > end) {
    throw Error(ErrorCode::invalid_time_window, fmt::format("window start {} after end {}", start, end));
  }
  return TimeWindow(start, end);
}

AdminArea AdminArea::make(std::string id, std::string name, AdminLevel level, std::vector<GeoPoint> ring) {
  if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
  std::vector<GeoPoint> distinct;
  for (const auto& p : ring) {
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  }
  if (distinct.size() < 3) {
    throw Error(ErrorCode::degenerate_polygon,
                fmt::format("admin area '{}' has {} distinct vertices, need 3", id, distinct.size()));
  }
  return AdminArea{std::move(id), std::move(name), level, std::move(ring)};
}

void LandmarkRecord::validate() const {
  if (id.empty()) throw Error(ErrorCode::invalid_record, "landmark id is empty");
  if (name.empty()) throw Error(ErrorCode::invalid_record, fmt::format("landmark '{}' has an empty name", id));
  if (!(credibility >= 0.0 && credibility <= 1.0)) {
    throw Error(ErrorCode::invalid_record,
                fmt::format("landmark '{}' credibility {} outside [0, 1]", id, credibility));
  }
  if (event_text && !window) {
    throw Error(ErrorCode::missing_window, fmt::format("landmark '{}' has event text but no window", id));
  }
}

void validate_admin_path(std::span<const std::string> path, std::span<const AdminArea> areas) {
  int previous = -1;
  for (const auto& id : path) {
    auto it = std::find_if(areas.begin(), areas.end(), [&](const AdminArea& a) { return a.id == id; });
    if (it == areas.end()) throw Error(ErrorCode::invalid_record, fmt::format("unknown admin area '{}'", id));
    int level = static_cast<int>(it->level);
    if (level <= previous) {
      throw Error(ErrorCode::invalid_record, fmt::format("admin path level does not increase at '{}'", id));
    }
    previous = level;
  }
}

std::int64_t parse_utc_instant(const std::string& text) {
  std::int64_t epoch = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, epoch);
  if (ec == std::errc() && ptr == last) return epoch;

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  int consumed = 0;
  bool ok = false;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) == 6) {
    ok = true;
    if (static_cast<std::size_t>(consumed) < text.size() && text[consumed] == 'Z') ++consumed;
  } else if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) == 3) {
    ok = true;
    h = mi = s = 0;
  }
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ok || static_cast<std::size_t>(consumed) != text.size() || !ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorCode::parse_error, fmt::format("cannot parse UTC instant '{}'", text));
  }
  auto days = sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s;
}

}  // namespace geoctx
