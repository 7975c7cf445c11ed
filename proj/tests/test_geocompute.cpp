#include <doctest.h>

#include <numbers>
#include <algorithm>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/geocompute.hpp"

using namespace geoctx;

namespace {

FeatureSet random_points(std::size_t n, std::mt19937_64& rng, const std::string& prefix) {
  std::uniform_real_distribution<double> lat(1.2, 1.45), lon(103.6, 104.0);
  FeatureSet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.features.push_back({fmt::format("{}{:03}", prefix, i), normalize_point(lat(rng), lon(rng)), {}});
  }
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("feature collection parsing") {
  const auto one = parse_feature_collection(
      R"({"type":"FeatureCollection","features":[{"type":"Feature","id":7,"properties":{"name":"x"},)"
      R"("geometry":{"type":"Point","coordinates":[103.9,1.3]}}]})");
  REQUIRE(one.size() == 1);
  CHECK(one.features[0].id == "7");
  CHECK(one.features[0].representative_point() == normalize_point(1.3, 103.9));
  CHECK(one.features[0].properties.at("name") == "x");

  CHECK(parse_feature_collection(R"({"type":"FeatureCollection","features":[]})").empty());

  CHECK(code_of([] {
          parse_feature_collection(R"({"type":"FeatureCollection","features":[{"type":"Feature",)"
                                   R"("geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]}}]})");
        }) == ErrorCode::unsupported_geometry);
  try {
    parse_feature_collection("{\"type\":\n\"FeatureCollection\",,}");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(e.line() == 2);
  }
  CHECK(code_of([] {
          parse_feature_collection(R"({"type":"FeatureCollection","features":[)"
                                   R"({"type":"Feature","id":"a","geometry":{"type":"Point","coordinates":[0,0]}},)"
                                   R"({"type":"Feature","id":"a","geometry":{"type":"Point","coordinates":[1,1]}}]})");
        }) == ErrorCode::duplicate_id);

  const auto poly = load_geo_file(GCE_TEST_DATA "/admin_areas.geojson");
  const auto areas = to_admin_areas(poly);
  REQUIRE(areas.size() == 3);
  CHECK(areas[0].level == AdminLevel::country);
  const auto path = containment_path(normalize_point(1.2834, 103.8607), areas);
  REQUIRE(path.areas.size() == 3);
  CHECK(path.areas[0].first == "downtown");
}

TEST_CASE("distance matrix") {
  const auto p = load_geo_file(GCE_TEST_DATA "/single_point.geojson");
  const auto m = distance_matrix(p, p);
  CHECK(std::get<DistanceMatrix>(m.payload).meters == std::vector<std::vector<double>>{{0.0}});

  const auto a = load_geo_file(GCE_TEST_DATA "/points_a.geojson");
  const auto b = load_geo_file(GCE_TEST_DATA "/points_b.geojson");
  const auto ab = std::get<DistanceMatrix>(distance_matrix(a, b).payload);
  REQUIRE(ab.meters.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(ab.meters[i][j] ==
            haversine(a.features[i].representative_point(), b.features[j].representative_point()));
    }
  }
  const auto aa = std::get<DistanceMatrix>(distance_matrix(a, a).payload);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(aa.meters[i][i] == 0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(aa.meters[i][j] == aa.meters[j][i]);
  }
  CHECK(code_of([&] { distance_matrix(FeatureSet{}, a); }) == ErrorCode::empty_input);

  const auto json = nlohmann::json::parse(result_to_json(distance_matrix(a, b), a));
  CHECK(json["rows"].size() == 3);
  CHECK(json["meters"][0][1].get<double>() == ab.meters[0][1]);
}

TEST_CASE("summary numbers parse back exactly") {
  const auto a = load_geo_file(GCE_TEST_DATA "/points_a.geojson");
  const auto b = load_geo_file(GCE_TEST_DATA "/points_b.geojson");
  const auto r = distance_matrix(a, b);
  const auto v = r.values();
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  CHECK(r.summary.starts_with("distance_matrix: inputs=3x2; count=6; "));
  CHECK(r.summary.find(fmt::format("min={} m", *mn)) != std::string::npos);
  CHECK(r.summary.find(fmt::format("max={} m", *mx)) != std::string::npos);
}

TEST_CASE("nearest join equals the matrix row minimum") {
  std::mt19937_64 rng(12);
  const auto a = random_points(50, rng, "a");
  const auto b = random_points(50, rng, "b");
  const auto m = std::get<DistanceMatrix>(distance_matrix(a, b).payload);
  const auto pairs = std::get<std::vector<NearestPair>>(nearest_join(a, b).payload);
  REQUIRE(pairs.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < 50; ++j) {
      if (m.meters[i][j] < m.meters[i][best]) best = j;
    }
    CHECK(pairs[i].b_id == m.cols[best]);
    CHECK(pairs[i].meters == m.meters[i][best]);
  }

  FeatureSet single;
  single.features.push_back({"only", normalize_point(0, 0), {}});
  const auto to_single = nearest_join(a, single);
  for (const auto& p : std::get<std::vector<NearestPair>>(to_single.payload)) CHECK(p.b_id == "only");
  const auto self = std::get<std::vector<NearestPair>>(nearest_join(a, a).payload);
  for (std::size_t i = 0; i < 50; ++i) CHECK(self[i].meters == 0);
}

TEST_CASE("within radius") {
  std::mt19937_64 rng(13);
  const auto a = random_points(60, rng, "p");
  const auto center = a.features[0].representative_point();
  auto ids = [](const ComputeResult& r) {
    std::vector<std::string> out;
    for (const auto& h : std::get<std::vector<RadiusHit>>(r.payload)) out.push_back(h.id);
    return out;
  };
  CHECK(ids(within_radius(a, center, 0)) == std::vector<std::string>{"p000"});
  CHECK(ids(within_radius(a, center, std::numbers::pi * kDefaultEarthRadiusM)).size() == 60);

  FeatureSet c;
  c.features.push_back({"center", center, {}});
  const auto row = std::get<DistanceMatrix>(distance_matrix(c, a).payload).meters[0];
  std::vector<std::string> prev;
  for (double r = 0; r <= 30000; r += 2500) {
    const auto got = ids(within_radius(a, center, r));
    std::set<std::string> want;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] <= r) want.insert(a.features[j].id);
    }
    CHECK(std::set<std::string>(got.begin(), got.end()) == want);
    for (const auto& id : prev) CHECK(std::find(got.begin(), got.end(), id) != got.end());
    prev = got;
  }
  CHECK(code_of([&] { within_radius(a, center, -1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("travel time") {
  CHECK(travel_time(0, 10) == 0);
  CHECK(travel_time(1000, 10) == 100);
  CHECK(code_of([] { travel_time(1000, 0); }) == ErrorCode::non_positive_speed);
  const auto a = load_geo_file(GCE_TEST_DATA "/points_a.geojson");
  const auto b = load_geo_file(GCE_TEST_DATA "/points_b.geojson");
  const auto tt = travel_times(nearest_join(a, b), 5);
  for (const auto& t : std::get<std::vector<TravelTime>>(tt.payload)) CHECK(t.seconds == t.meters / 5);
  const auto json = nlohmann::json::parse(result_to_json(tt, a));
  CHECK(json["features"].size() == 3);
  CHECK(json["features"][0]["properties"].contains("travel_time_s"));
}

TEST_CASE("compute dispatch") {
  const auto a = load_geo_file(GCE_TEST_DATA "/points_a.geojson");
  ComputeRequest req{"within-radius", a, std::nullopt, normalize_point(1.2834, 103.8607), 7000.0, std::nullopt};
  CHECK(run_compute(req).kind == ComputeKind::within_radius);
  req.op = "nearest-join";
  CHECK(code_of([&] { run_compute(req); }) == ErrorCode::invalid_argument);
  req.op = "teleport";
  CHECK(code_of([&] { run_compute(req); }) == ErrorCode::invalid_argument);
}
