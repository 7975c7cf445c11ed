#include "geoctx/geocompute.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "geoctx/error.hpp"

namespace geoctx {

using nlohmann::json;

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n')) + 1;
}

GeoPoint parse_position(const json& pos) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
    throw Error(ErrorCode::parse_error, "position must be an array [lon, lat]");
  }
  return normalize_point(pos[1].get<double>(), pos[0].get<double>());
}

std::size_t distinct_count(const std::vector<GeoPoint>& ring) {
  std::vector<GeoPoint> seen;
  for (const auto& p : ring) {
    if (std::find(seen.begin(), seen.end(), p) == seen.end()) seen.push_back(p);
  }
  return seen.size();
}

Geometry parse_geometry(const json& g, const std::string& feature_id) {
  if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) {
    throw Error(ErrorCode::parse_error, fmt::format("feature '{}' has no geometry type", feature_id));
  }
  const auto type = g["type"].get<std::string>();
  if (type == "Point") return parse_position(g.at("coordinates"));
  if (type == "Polygon") {
    PolygonGeometry poly;
    for (const auto& ring_json : g.at("coordinates")) {
      std::vector<GeoPoint> ring;
      for (const auto& pos : ring_json) ring.push_back(parse_position(pos));
      if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
      if (distinct_count(ring) < 3) {
        throw Error(ErrorCode::degenerate_polygon,
                    fmt::format("feature '{}' has a ring with fewer than 3 distinct vertices", feature_id));
      }
      poly.rings.push_back(std::move(ring));
    }
    if (poly.rings.empty()) throw Error(ErrorCode::degenerate_polygon, fmt::format("feature '{}' polygon has no rings", feature_id));
    return poly;
  }
  throw Error(ErrorCode::unsupported_geometry, fmt::format("unsupported geometry type '{}'", type));
}

json position_json(const GeoPoint& p) { return json::array({p.lon(), p.lat()}); }

json geometry_json(const Geometry& g) {
  if (const auto* p = std::get_if<GeoPoint>(&g)) return {{"type", "Point"}, {"coordinates", position_json(*p)}};
  const auto& poly = std::get<PolygonGeometry>(g);
  auto rings = json::array();
  for (const auto& ring : poly.rings) {
    auto r = json::array();
    for (const auto& p : ring) r.push_back(position_json(p));
    rings.push_back(r);
  }
  return {{"type", "Polygon"}, {"coordinates", rings}};
}

json feature_json(const Feature& f) {
  json props = json::object();
  for (const auto& [k, v] : f.properties) props[k] = v;
  return {{"type", "Feature"}, {"id", f.id}, {"geometry", geometry_json(f.geometry)}, {"properties", props}};
}

std::string summarize(ComputeKind kind, const std::string& inputs, const std::vector<double>& values,
                      std::string_view unit) {
  std::string s = fmt::format("{}: inputs={}; count={}", compute_kind_name(kind), inputs, values.size());
  if (values.empty()) return s + "; min=n/a; max=n/a; mean=n/a";
  double lo = values.front(), hi = values.front(), sum = 0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  return s + fmt::format("; min={} {}; max={} {}; mean={} {}", lo, unit, hi, unit, mean, unit);
}

void require_nonempty(const FeatureSet& s, std::string_view which) {
  if (s.empty()) throw Error(ErrorCode::empty_input, fmt::format("feature set {} is empty", which));
}

}  // namespace

GeoPoint PolygonGeometry::vertex_centroid() const {
  const auto& ring = rings.at(0);
  std::size_t n = ring.size();
  if (n > 1 && ring.front() == ring.back()) --n;
  double lat = 0, lon = 0;
  for (std::size_t i = 0; i < n; ++i) {
    lat += ring[i].lat();
    lon += ring[i].lon();
  }
  return normalize_point(lat / static_cast<double>(n), lon / static_cast<double>(n));
}

GeoPoint Feature::representative_point() const {
  if (const auto* p = std::get_if<GeoPoint>(&geometry)) return *p;
  return std::get<PolygonGeometry>(geometry).vertex_centroid();
}

FeatureSet parse_feature_collection(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const std::size_t line = line_of(text, byte);
    throw Error(ErrorCode::parse_error, fmt::format("GeoJSON parse error at line {}, byte {}: {}", line, byte, e.what()),
                byte, line);
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw Error(ErrorCode::parse_error, "expected a GeoJSON FeatureCollection with a features array");
  }
  FeatureSet set;
  std::set<std::string> seen;
  std::size_t index = 0;
  try {
    for (const auto& fj : doc["features"]) {
      std::string id;
      if (fj.contains("id") && fj["id"].is_string()) {
        id = fj["id"].get<std::string>();
      } else if (fj.contains("id") && fj["id"].is_number()) {
        id = fj["id"].dump();
      } else {
        id = fmt::format("f{}", index);
      }
      if (!seen.insert(id).second) {
        throw Error(ErrorCode::duplicate_id, fmt::format("duplicate feature id '{}'", id));
      }
      Feature f{id, parse_geometry(fj.contains("geometry") ? fj["geometry"] : json(), id), {}};
      if (fj.contains("properties") && fj["properties"].is_object()) {
        for (const auto& [k, v] : fj["properties"].items()) {
          f.properties[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      set.features.push_back(std::move(f));
      ++index;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, fmt::format("malformed feature {}: {}", index, e.what()));
  }
  return set;
}

FeatureSet load_geo_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open geospatial file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_feature_collection(ss.str());
}

std::vector<AdminArea> to_admin_areas(const FeatureSet& set) {
  static const std::map<std::string, AdminLevel> kLevels = {{"city", AdminLevel::city},   {"0", AdminLevel::city},
                                                            {"county", AdminLevel::county}, {"1", AdminLevel::county},
                                                            {"state", AdminLevel::state},   {"2", AdminLevel::state},
                                                            {"country", AdminLevel::country}, {"3", AdminLevel::country}};
  std::vector<AdminArea> out;
  for (const auto& f : set.features) {
    const auto* poly = std::get_if<PolygonGeometry>(&f.geometry);
    if (!poly) continue;
    auto level_it = f.properties.find("level");
    if (level_it == f.properties.end() || !kLevels.contains(level_it->second)) {
      throw Error(ErrorCode::invalid_record, fmt::format("admin feature '{}' needs a level property", f.id));
    }
    auto name_it = f.properties.find("name");
    out.push_back(AdminArea::make(f.id, name_it == f.properties.end() ? f.id : name_it->second,
                                  kLevels.at(level_it->second), poly->rings.front()));
  }
  return out;
}

std::string_view compute_kind_name(ComputeKind kind) {
  switch (kind) {
    case ComputeKind::distance_matrix: return "distance_matrix";
    case ComputeKind::nearest_join: return "nearest_join";
    case ComputeKind::within_radius: return "within_radius";
    case ComputeKind::travel_time: return "travel_time";
  }
  return "unknown";
}

std::vector<double> ComputeResult::values() const {
  std::vector<double> out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DistanceMatrix>) {
          for (const auto& row : p.meters) out.insert(out.end(), row.begin(), row.end());
        } else if constexpr (std::is_same_v<T, std::vector<TravelTime>>) {
          for (const auto& t : p) out.push_back(t.seconds);
        } else {
          for (const auto& x : p) out.push_back(x.meters);
        }
      },
      payload);
  return out;
}

ComputeResult distance_matrix(const FeatureSet& a, const FeatureSet& b, double radius_m) {
  require_nonempty(a, "A");
  require_nonempty(b, "B");
  DistanceMatrix m;
  std::vector<GeoPoint> bp;
  for (const auto& f : b.features) {
    m.cols.push_back(f.id);
    bp.push_back(f.representative_point());
  }
  for (const auto& f : a.features) {
    m.rows.push_back(f.id);
    const GeoPoint ap = f.representative_point();
    std::vector<double> row;
    row.reserve(bp.size());
    for (const auto& p : bp) row.push_back(haversine(ap, p, radius_m));
    m.meters.push_back(std::move(row));
  }
  ComputeResult r{ComputeKind::distance_matrix, std::move(m), {}};
  r.summary = summarize(r.kind, fmt::format("{}x{}", a.size(), b.size()), r.values(), "m");
  return r;
}

ComputeResult nearest_join(const FeatureSet& a, const FeatureSet& b, double radius_m) {
  require_nonempty(a, "A");
  require_nonempty(b, "B");
  std::vector<NearestPair> pairs;
  for (const auto& fa : a.features) {
    const GeoPoint ap = fa.representative_point();
    const Feature* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& fb : b.features) {
      const double d = haversine(ap, fb.representative_point(), radius_m);
      if (d < best_d || (d == best_d && best && fb.id < best->id)) {
        best = &fb;
        best_d = d;
      }
    }
    pairs.push_back({fa.id, best->id, best_d});
  }
  ComputeResult r{ComputeKind::nearest_join, std::move(pairs), {}};
  r.summary = summarize(r.kind, fmt::format("{}x{}", a.size(), b.size()), r.values(), "m");
  return r;
}

ComputeResult within_radius(const FeatureSet& a, const GeoPoint& center, double r, double radius_m) {
  if (!(r >= 0)) throw Error(ErrorCode::invalid_argument, fmt::format("radius {} must be non-negative", r));
  std::vector<RadiusHit> hits;
  for (const auto& f : a.features) {
    const double d = haversine(center, f.representative_point(), radius_m);
    if (d <= r) hits.push_back({f.id, d});
  }
  std::sort(hits.begin(), hits.end(), [](const RadiusHit& x, const RadiusHit& y) {
    if (x.meters != y.meters) return x.meters < y.meters;
    return x.id < y.id;
  });
  ComputeResult res{ComputeKind::within_radius, std::move(hits), {}};
  res.summary = summarize(res.kind, fmt::format("{}", a.size()), res.values(), "m");
  return res;
}

double travel_time(double meters, double speed_mps) {
  if (!(speed_mps > 0)) throw Error(ErrorCode::non_positive_speed, fmt::format("speed {} m/s must be positive", speed_mps));
  return meters / speed_mps;
}

ComputeResult travel_times(const ComputeResult& nearest, double speed_mps) {
  const auto* pairs = std::get_if<std::vector<NearestPair>>(&nearest.payload);
  if (!pairs) throw Error(ErrorCode::invalid_argument, "travel times need a nearest-join result");
  std::vector<TravelTime> out;
  for (const auto& p : *pairs) out.push_back({p.a_id, p.b_id, p.meters, travel_time(p.meters, speed_mps)});
  ComputeResult r{ComputeKind::travel_time, std::move(out), {}};
  r.summary = summarize(r.kind, fmt::format("{} pairs at {} m/s", pairs->size(), speed_mps), r.values(), "s");
  return r;
}

std::string result_to_json(const ComputeResult& result, const FeatureSet& a) {
  if (const auto* m = std::get_if<DistanceMatrix>(&result.payload)) {
    return json{{"rows", m->rows}, {"cols", m->cols}, {"meters", m->meters}}.dump();
  }
  std::map<std::string, const Feature*> by_id;
  for (const auto& f : a.features) by_id[f.id] = &f;
  auto features = json::array();
  auto emit = [&](const std::string& id, json extra) {
    auto it = by_id.find(id);
    if (it == by_id.end()) return;
    json fj = feature_json(*it->second);
    for (auto& [k, v] : extra.items()) fj["properties"][k] = v;
    features.push_back(std::move(fj));
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::vector<NearestPair>>) {
          for (const auto& x : p) emit(x.a_id, {{"nearest_id", x.b_id}, {"distance_m", x.meters}});
        } else if constexpr (std::is_same_v<T, std::vector<RadiusHit>>) {
          for (const auto& x : p) emit(x.id, {{"distance_m", x.meters}});
        } else if constexpr (std::is_same_v<T, std::vector<TravelTime>>) {
          for (const auto& x : p) {
            emit(x.a_id, {{"nearest_id", x.b_id}, {"distance_m", x.meters}, {"travel_time_s", x.seconds}});
          }
        }
      },
      result.payload);
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump();
}

ComputeResult run_compute(const ComputeRequest& req, double earth_radius_m) {
  auto need_b = [&]() -> const FeatureSet& {
    if (!req.b) throw Error(ErrorCode::invalid_argument, fmt::format("{} needs a second feature set (b)", req.op));
    return *req.b;
  };
  if (req.op == "distance-matrix") return distance_matrix(req.a, need_b(), earth_radius_m);
  if (req.op == "nearest-join") return nearest_join(req.a, need_b(), earth_radius_m);
  if (req.op == "within-radius") {
    if (!req.center || !req.radius_m) throw Error(ErrorCode::invalid_argument, "within-radius needs a center and a radius");
    return within_radius(req.a, *req.center, *req.radius_m, earth_radius_m);
  }
  if (req.op == "travel-time") {
    if (!req.speed_mps) throw Error(ErrorCode::invalid_argument, "travel-time needs a speed in m/s");
    return travel_times(nearest_join(req.a, need_b(), earth_radius_m), *req.speed_mps);
  }
  throw Error(ErrorCode::invalid_argument,
              fmt::format("unknown op '{}' (distance-matrix, nearest-join, within-radius, travel-time)", req.op));
}

}  // namespace geoctx
