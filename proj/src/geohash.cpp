#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/vectorstore.hpp"

namespace geoctx {

namespace {

constexpr std::string_view kBase32 = "0123456789bcdefghjkmnpqrstuvwxyz";
constexpr std::size_t kMaxCoverCells = 1024;

int lon_bits(int precision) { return (5 * precision + 1) / 2; }
int lat_bits(int precision) { return (5 * precision) / 2; }

// Index of the dyadic sub-interval of [lo, hi] holding v, by repeated
// bisection (v >= mid goes to the upper half, so hi itself lands in the
// last interval).
std::uint64_t interval_index(double v, double lo, double hi, int bits) {
  std::uint64_t idx = 0;
  for (int i = 0; i < bits; ++i) {
    const double mid = (lo + hi) / 2.0;
    idx <<= 1;
    if (v >= mid) {
      idx |= 1;
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return idx;
}

std::string from_indices(std::uint64_t lat_idx, std::uint64_t lon_idx, int precision) {
  const int nlon = lon_bits(precision);
  const int nlat = lat_bits(precision);
  std::string out;
  out.reserve(static_cast<std::size_t>(precision));
  int lon_pos = nlon - 1;
  int lat_pos = nlat - 1;
  unsigned ch = 0;
  for (int bit = 0; bit < 5 * precision; ++bit) {
    unsigned b = 0;
    if (bit % 2 == 0) {
      b = static_cast<unsigned>((lon_idx >> lon_pos--) & 1U);
    } else {
      b = static_cast<unsigned>((lat_idx >> lat_pos--) & 1U);
    }
    ch = (ch << 1) | b;
    if (bit % 5 == 4) {
      out.push_back(kBase32[ch]);
      ch = 0;
    }
  }
  return out;
}

void check_precision(int precision) {
  if (precision < 1 || precision > 12) {
    throw Error(ErrorCode::invalid_argument, fmt::format("geohash precision {} outside [1, 12]", precision));
  }
}

}  // namespace

std::string geohash_encode(const GeoPoint& p, int precision) {
  check_precision(precision);
  return from_indices(interval_index(p.lat(), -90.0, 90.0, lat_bits(precision)),
                      interval_index(p.lon(), -180.0, 180.0, lon_bits(precision)), precision);
}

BoundingBox geohash_decode_bbox(std::string_view hash) {
  if (hash.empty() || hash.size() > 12) throw Error(ErrorCode::parse_error, "geohash length must be 1..12");
  double lat_lo = -90, lat_hi = 90, lon_lo = -180, lon_hi = 180;
  bool lon_turn = true;
  for (std::size_t i = 0; i < hash.size(); ++i) {
    auto pos = kBase32.find(hash[i]);
    if (pos == std::string_view::npos) {
      throw Error(ErrorCode::parse_error, fmt::format("invalid geohash character '{}'", hash[i]), i);
    }
    for (int b = 4; b >= 0; --b) {
      const bool bit = (pos >> b) & 1U;
      double& lo = lon_turn ? lon_lo : lat_lo;
      double& hi = lon_turn ? lon_hi : lat_hi;
      const double mid = (lo + hi) / 2.0;
      (bit ? lo : hi) = mid;
      lon_turn = !lon_turn;
    }
  }
  return BoundingBox::make(lat_lo, lat_hi, lon_lo, lon_hi);
}

std::optional<std::vector<std::string>> geohash_cover(const GeoPoint& center, double radius_m, int precision,
                                                      double earth_radius_m) {
  check_precision(precision);
  constexpr double kRadToDeg = 180.0 / std::numbers::pi;
  const double delta = radius_m / earth_radius_m;
  if (!(delta < std::numbers::pi)) return std::nullopt;

  // Conservative bounding box of the spherical cap, padded against rounding.
  constexpr double kPad = 1e-9;
  const double dlat = delta * kRadToDeg * (1.0 + kPad) + kPad;
  double lat_min = center.lat() - dlat;
  double lat_max = center.lat() + dlat;
  std::vector<std::pair<double, double>> lon_ranges;
  bool full_lon = lat_max >= 90.0 || lat_min <= -90.0;
  if (!full_lon) {
    const double s = std::sin(delta) / std::cos(center.lat() * std::numbers::pi / 180.0);
    if (s >= 1.0 || delta >= std::numbers::pi / 2) {
      full_lon = true;
    } else {
      const double dlon = std::asin(s) * kRadToDeg * (1.0 + kPad) + kPad;
      const double lo = center.lon() - dlon;
      const double hi = center.lon() + dlon;
      if (hi - lo >= 360.0) {
        full_lon = true;
      } else if (lo < -180.0) {
        lon_ranges.emplace_back(lo + 360.0, 180.0);
        lon_ranges.emplace_back(-180.0, hi);
      } else if (hi > 180.0) {
        lon_ranges.emplace_back(lo, 180.0);
        lon_ranges.emplace_back(-180.0, hi - 360.0);
      } else {
        lon_ranges.emplace_back(lo, hi);
      }
    }
  }
  if (full_lon) {
    lon_ranges.assign(1, {-180.0, 180.0});
  }
  lat_min = std::max(lat_min, -90.0);
  lat_max = std::min(lat_max, 90.0);

  // Coarsest-first search for the finest precision that keeps the cover small.
  for (int p = precision; p >= 1; --p) {
    const int nlat = lat_bits(p);
    const int nlon = lon_bits(p);
    const std::uint64_t i0 = interval_index(lat_min, -90.0, 90.0, nlat);
    const std::uint64_t i1 = interval_index(lat_max, -90.0, 90.0, nlat);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> lon_idx;
    std::size_t count_lon = 0;
    for (const auto& [lo, hi] : lon_ranges) {
      const auto j0 = interval_index(lo, -180.0, 180.0, nlon);
      const auto j1 = interval_index(hi, -180.0, 180.0, nlon);
      lon_idx.emplace_back(j0, j1);
      count_lon += static_cast<std::size_t>(j1 - j0 + 1);
    }
    const std::size_t count = static_cast<std::size_t>(i1 - i0 + 1) * count_lon;
    if (count > kMaxCoverCells && p > 1) continue;
    std::vector<std::string> cells;
    cells.reserve(count);
    for (auto i = i0; i <= i1; ++i) {
      for (const auto& [j0, j1] : lon_idx) {
        for (auto j = j0; j <= j1; ++j) cells.push_back(from_indices(i, j, p));
      }
    }
    return cells;
  }
  return std::nullopt;
}

}  // namespace geoctx
