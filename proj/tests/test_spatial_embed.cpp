#include <doctest.h>

#include <cmath>
#include <random>

#include "geoctx/error.hpp"
#include "geoctx/spatial_embed.hpp"
#include "oracles.hpp"

using namespace geoctx;

namespace {

std::vector<std::string> words(std::initializer_list<const char*> ws) { return {ws.begin(), ws.end()}; }

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

LandmarkRecord signature() {
  LandmarkRecord r;
  r.id = "sig";
  r.name = "The Signature";
  r.category = "building";
  r.description = "Office tower hosting conferences.";
  r.point = normalize_point(37.4, -122.1);
  r.window = TimeWindow::make(1717200000, 1719792000);
  return r;
}

}  // namespace

TEST_CASE("feature hashing matches the reference hash") {
  const EngineConfig cfg;
  const auto terms = words({"marina", "bay", "sands", "marina"});
  const auto got = embed_text(terms, 256, cfg.hash_seed);
  const auto want = oracle::hashed_embedding(terms, 256, cfg.hash_seed);
  REQUIRE(got.values.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(got.values[i] == doctest::Approx(want[i]).epsilon(1e-15));
  CHECK(got.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("embedding conventions") {
  const EngineConfig cfg;
  const auto zero = embed_text(std::vector<std::string>{}, 256, cfg.hash_seed);
  CHECK(zero.norm() == 0);
  const auto a = embed_text(words({"x", "y"}), 256, cfg.hash_seed);
  const auto b = embed_text(words({"x", "y"}), 256, cfg.hash_seed);
  CHECK(a.values == b.values);

  const auto mb = oracle::hashed_embedding(words({"marina", "bay"}), 256, cfg.hash_seed);
  const auto mbs = oracle::hashed_embedding(words({"marina", "bay", "sands"}), 256, cfg.hash_seed);
  const auto crs = oracle::hashed_embedding(words({"curry", "rice", "shop"}), 256, cfg.hash_seed);
  const double ref_near = oracle::cos_sim(mb, mbs), ref_far = oracle::cos_sim(mb, crs);
  REQUIRE(ref_near > ref_far);
  const auto v_mb = embed_text(words({"marina", "bay"}), 256, cfg.hash_seed).values;
  const double near = cosine(v_mb, embed_text(words({"marina", "bay", "sands"}), 256, cfg.hash_seed).values);
  const double far = cosine(v_mb, embed_text(words({"curry", "rice", "shop"}), 256, cfg.hash_seed).values);
  CHECK(near == doctest::Approx(ref_near).epsilon(1e-12));
  CHECK(far == doctest::Approx(ref_far).epsilon(1e-12));
  CHECK(near > far);
}

TEST_CASE("location encoding") {
  const auto z = encode_location(normalize_point(0, 0));
  REQUIRE(z.values.size() == 64);
  for (std::size_t i = 0; i < z.values.size(); i += 2) {
    CHECK(z.values[i] == 0);
    CHECK(z.values[i + 1] == 1);
  }
  const auto a = encode_location(normalize_point(1.3, 103.9));
  CHECK(a.values == encode_location(normalize_point(1.3, 103.9)).values);
  const auto near = encode_location(normalize_point(1.301, 103.9));
  const auto far = encode_location(normalize_point(2.3, 103.9));
  CHECK(euclid(a.values, near.values) < euclid(a.values, far.values));
  for (double x : a.values) {
    CHECK(x >= -1);
    CHECK(x <= 1);
  }
}

TEST_CASE("standardizer") {
  const Standardizer s(448, 256, 42);
  std::vector<double> zero(448, 0.0);
  for (double x : s.standardize(zero)) CHECK(x == 0);
  std::vector<double> x(448);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (auto& v : x) v = nd(rng);
  CHECK(s.project(x) == Standardizer(448, 256, 42).project(x));
  const auto y = s.standardize(x);
  double n = 0;
  for (double v : y) n += v * v;
  CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(s.project(std::vector<double>(10)), Error);
}

TEST_CASE("standardizer roughly preserves distances") {
  const Standardizer s(448, 256, EngineConfig{}.projection_seed);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(448);
    double n = 0;
    for (auto& v : x) {
      v = nd(rng);
      n += v * v;
    }
    for (auto& v : x) v /= std::sqrt(n);
    ys.push_back(s.project(x));
    xs.push_back(std::move(x));
  }
  std::size_t ok = 0, total = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double ratio = euclid(ys[i], ys[j]) / euclid(xs[i], xs[j]);
      ok += std::abs(ratio - 1) <= 0.25;
      ++total;
    }
  }
  CHECK(static_cast<double>(ok) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("composite vectors") {
  const EngineConfig cfg;
  const SpatialEncoder enc(cfg);
  const auto r = signature();
  const auto c = enc.make_composite(r, std::string("Partner Summit"));
  REQUIRE(c.dynamic.has_value());
  CHECK(c.dynamic->window == *r.window);
  CHECK(c.standardized.size() == cfg.d_text);
  CHECK(enc.verify(c));
  CHECK(c.standardized == enc.make_composite(r, std::string("Partner Summit")).standardized);

  auto plain = r;
  plain.window.reset();
  const auto p = enc.make_composite(plain, std::nullopt);
  CHECK_FALSE(p.dynamic.has_value());
  const auto cat = enc.concat(p);
  REQUIRE(cat.size() == cfg.d_loc + cfg.d_st + cfg.d_dyn);
  for (std::size_t i = cfg.d_loc + cfg.d_st; i < cat.size(); ++i) CHECK(cat[i] == 0);
  CHECK(enc.verify(p));

  // each block has unit length in the concatenation
  double loc = 0;
  for (std::size_t i = 0; i < cfg.d_loc; ++i) loc += cat[i] * cat[i];
  CHECK(std::sqrt(loc) == doctest::Approx(1.0).epsilon(1e-12));

  auto tampered = c;
  tampered.standardized[0] += 1e-3;
  CHECK_FALSE(enc.verify(tampered));

  try {
    enc.make_composite(plain, std::string("Partner Summit"));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_window);
  }
  auto nowhere = plain;
  nowhere.point.reset();
  try {
    enc.make_composite(nowhere, std::nullopt);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_point);
  }
}

TEST_CASE("query vectors share the record pipeline") {
  const EngineConfig cfg;
  const SpatialEncoder enc(cfg);
  auto r = signature();
  r.window.reset();
  const auto c = enc.make_composite(r, std::nullopt);
  const auto q = enc.query_vector(landmark_terms(r), r.point, false);
  CHECK(cosine(q, c.standardized) == doctest::Approx(1.0).epsilon(1e-12));
}
