#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "geoctx/error.hpp"
#include "geoctx/georelate.hpp"
#include "geoctx/vectorstore.hpp"
#include "oracles.hpp"

using namespace geoctx;

namespace {

constexpr std::size_t kDim = 32;

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim = kDim) {
  std::normal_distribution<double> nd;
  std::vector<double> v(dim);
  double n = 0;
  for (auto& x : v) {
    x = nd(rng);
    n += x * x;
  }
  for (auto& x : v) x /= std::sqrt(n);
  return v;
}

VectorRecord rec(std::string id, const std::vector<double>& v, std::optional<GeoPoint> p = std::nullopt) {
  VectorRecord r;
  r.doc_id = std::move(id);
  r.vector.assign(v.begin(), v.end());
  r.point = p;
  return r;
}

std::vector<std::string> ids_of(const std::vector<ScoredHit>& hits) {
  std::vector<std::string> out;
  for (const auto& h : hits) out.push_back(h.doc_id);
  return out;
}

StoreOptions small() {
  StoreOptions o;
  o.dim = kDim;
  return o;
}

// records clustered around a few centers so radius queries have work to do
std::pair<VectorStore, std::vector<oracle::NaiveRecord>> random_store(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05), u(0, 1);
  const std::vector<std::pair<double, double>> centers = {{1.3, 103.8}, {48.85, 2.35}, {-33.9, 151.2}, {0.0, 179.98}};
  VectorStore store(small());
  std::vector<oracle::NaiveRecord> naive;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[i % centers.size()];
    auto r = rec("d" + std::to_string(i), random_unit(rng), normalize_point(c.first + jitter(rng), c.second + jitter(rng)));
    if (i % 7 == 0) r.point.reset();
    if (i % 5 == 0) r.window = TimeWindow::make(1000, 2000);
    r.credibility = u(rng);
    store.upsert(r);
    naive.push_back(oracle::from_store_record(*store.get(r.doc_id)));
  }
  return {std::move(store), std::move(naive)};
}

}  // namespace

TEST_CASE("geohash encoding") {
  CHECK(geohash_encode(normalize_point(0, 0), 5) == "s0000");
  CHECK(geohash_encode(normalize_point(0, 0), 5) == oracle::geohash(0, 0, 5));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  for (int i = 0; i < 500; ++i) {
    const auto p = normalize_point(lat(rng), lon(rng));
    const auto h7 = geohash_encode(p, 7);
    CHECK(h7 == oracle::geohash(p.lat(), p.lon(), 7));
    CHECK(h7.substr(0, 5) == geohash_encode(p, 5));
    CHECK(point_in_bbox(p, geohash_decode_bbox(h7)));
  }
  CHECK_THROWS_AS(geohash_decode_bbox("a"), Error);
}

TEST_CASE("geohash cover contains every point in the radius") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lat(-85, 85), lon(-180, 180), bearing(0, 360), frac(0, 1);
  for (int i = 0; i < 50; ++i) {
    const auto c = normalize_point(lat(rng), lon(rng));
    const double r = 500 + frac(rng) * 20000;
    const auto cover = geohash_cover(c, r, 7, kDefaultEarthRadiusM);
    REQUIRE(cover.has_value());
    for (int j = 0; j < 40; ++j) {
      const auto p = destination(c, bearing(rng), frac(rng) * r * 0.999);
      const auto h = geohash_encode(p, 7);
      bool found = false;
      for (const auto& prefix : *cover) found = found || h.starts_with(prefix);
      CHECK(found);
    }
  }
}

TEST_CASE("upsert semantics") {
  std::mt19937_64 rng(1);
  VectorStore s(small());
  const auto v = random_unit(rng);
  CHECK_FALSE(s.upsert(rec("a", v)));
  CHECK(s.upsert(rec("a", v)));
  CHECK(s.size() == 1);
  CHECK_THROWS_AS(s.upsert(rec("b", random_unit(rng, kDim + 1))), Error);
  auto bad = rec("c", v);
  bad.vector[0] += 0.5f;
  CHECK_THROWS_AS(s.upsert(bad), Error);
  CHECK_NOTHROW(s.upsert(rec("z", std::vector<double>(kDim, 0.0))));
  auto cell = rec("p", v, normalize_point(1.3, 103.8));
  s.upsert(cell);
  CHECK(s.get("p")->cell == geohash_encode(normalize_point(1.3, 103.8), 7));
}

TEST_CASE("knn basics") {
  std::mt19937_64 rng(4);
  VectorStore s(small());
  const auto v = random_unit(rng);
  s.upsert(rec("only", v));
  CHECK(ids_of(s.knn(random_unit(rng), 3)) == std::vector<std::string>{"only"});
  for (int i = 0; i < 20; ++i) s.upsert(rec("r" + std::to_string(i), random_unit(rng)));
  const auto hits = s.knn(v, 5);
  CHECK(hits[0].doc_id == "only");
  CHECK(hits[0].text_sim == doctest::Approx(1.0).epsilon(1e-9));

  // exact ties break by id
  VectorStore t(small());
  t.upsert(rec("b", v));
  t.upsert(rec("a", v));
  CHECK(ids_of(t.knn(v, 2)) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("knn and hybrid search match the full-scan oracle") {
  auto [store, naive] = random_store(1000, 17);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05), u(0, 1);
  for (int i = 0; i < 40; ++i) {
    oracle::NaiveQuery nq;
    nq.v = random_unit(rng);
    nq.k = 10;
    nq.wt = 1;
    nq.ws = 0;
    nq.wd = 0;
    CHECK(ids_of(store.knn(nq.v, 10)) == oracle::full_scan(naive, nq));

    QuerySpec q;
    q.text_vector = nq.v;
    q.k = nq.k = 10;
    q.weights = {0.5, 0.3, 0.2};
    nq.wt = 0.5;
    nq.ws = 0.3;
    nq.wd = 0.2;
    q.point = normalize_point(1.3 + jitter(rng), 103.8 + jitter(rng));
    nq.point = std::make_pair(q.point->lat(), q.point->lon());
    q.time = nq.time = 1500;
    if (i % 2) {
      q.radius_m = nq.radius = 2000 + u(rng) * 4000;
    }
    if (i % 3 == 0) q.min_credibility = nq.min_credibility = 0.5;
    const auto want = oracle::full_scan(naive, nq);
    CHECK(ids_of(store.hybrid_search(q)) == want);
    CHECK(ids_of(store.hybrid_search_full_scan(q)) == want);
  }
}

TEST_CASE("hybrid weights") {
  std::mt19937_64 rng(6);
  VectorStore s(small());
  const auto a = normalize_point(1.3, 103.8);
  s.upsert(rec("A", random_unit(rng), a));
  s.upsert(rec("B", random_unit(rng), destination(a, 90, 10000)));
  QuerySpec q;
  q.text_vector = random_unit(rng);
  q.point = a;
  q.weights = {0, 1, 0};
  const auto hits = s.hybrid_search(q);
  CHECK(hits[0].doc_id == "A");
  CHECK(hits[1].spatial_prox == doctest::Approx(std::exp(-10.0)).epsilon(1e-9));

  q.weights = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(s.hybrid_search(q), Error);

  QuerySpec nopoint;
  nopoint.weights = {0.6, 0.3, 0.1};
  const auto w = effective_weights(nopoint);
  CHECK(w.spatial == 0);
  CHECK(w.text == doctest::Approx(0.6 + 0.3 * 6.0 / 7.0));
  CHECK(w.temporal == doctest::Approx(0.1 + 0.3 / 7.0));
  nopoint.weights = {0, 1, 0};
  CHECK(effective_weights(nopoint).text == 1);
}

TEST_CASE("relevance filter") {
  std::mt19937_64 rng(9);
  VectorStore s(small());
  const auto v = random_unit(rng);
  s.upsert(rec("a", v));
  s.upsert(rec("b", v));
  auto low = rec("c", random_unit(rng));
  low.credibility = 0.1;
  s.upsert(low);
  s.upsert(rec("d", random_unit(rng)));
  const auto hits = s.knn(v, 4);
  const auto kept = s.relevance_filter(hits, 0.3, 0.95);
  CHECK(ids_of(kept) == std::vector<std::string>{"a", "d"});
  CHECK_THROWS_AS(s.relevance_filter(hits, 0.3, 0.0), Error);
}

TEST_CASE("persistence round-trip") {
  auto [store, naive] = random_store(300, 31);
  const auto bytes = store.serialize();
  const auto back = VectorStore::deserialize(bytes, small());
  CHECK(back.size() == store.size());
  CHECK(back.serialize() == bytes);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    QuerySpec q;
    q.text_vector = random_unit(rng);
    q.point = normalize_point(48.85, 2.35);
    q.time = 1200;
    q.k = 15;
    CHECK(hits_to_json(back.hybrid_search(q)) == hits_to_json(store.hybrid_search(q)));
  }

  const auto empty = VectorStore::deserialize(VectorStore(small()).serialize(), small());
  CHECK(empty.size() == 0);

  try {
    VectorStore::deserialize(bytes.substr(0, bytes.size() / 2), small());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::corrupt_file);
  }
  auto wrong_version = bytes;
  wrong_version[4] = 9;
  try {
    VectorStore::deserialize(wrong_version, small());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::version_mismatch);
  }

  const auto path = std::filesystem::temp_directory_path() / "gce_store_test.gcev";
  store.save(path.string());
  CHECK(VectorStore::load(path.string(), small()).serialize() == bytes);
  std::filesystem::remove(path);
}
