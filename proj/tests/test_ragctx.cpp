#include <doctest.h>

#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/ingest.hpp"
#include "geoctx/ragctx.hpp"
#include "geoctx/service.hpp"

using namespace geoctx;

namespace {

const char* kColdplay = "Where is the Coldplay event going to happen in Singapore?";

Gazetteer sg_gazetteer() { return Gazetteer::from_landmarks(load_gazetteer(GCE_TEST_DATA "/singapore.csv").records); }

Engine sg_engine() {
  const EngineConfig cfg;
  const auto g = load_gazetteer(GCE_TEST_DATA "/singapore.csv").records;
  VectorStore store(StoreOptions::from_config(cfg));
  index_gazetteer(g, store, SpatialEncoder(cfg));
  return Engine(cfg, std::move(store), Gazetteer::from_landmarks(g));
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

ContextPackage two_passages() {
  ContextPackage c;
  c.passages = {{"a", "Alpha is first. More text.", "src1", 0.9}, {"b", "Beta second", "src2", 0.5}};
  c.citations = {{"a", "src1"}, {"b", "src2"}};
  return c;
}

}  // namespace

TEST_CASE("prompt analysis") {
  const auto g = sg_gazetteer();
  const auto a = analyze_prompt(kColdplay, g);
  CHECK(a.intent == Intent::retrieval);
  REQUIRE(a.places.size() == 1);
  CHECK(a.places[0].token.text == "Singapore");
  CHECK(a.places[0].id == "singapore");
  REQUIRE(a.places[0].point.has_value());

  CHECK(analyze_prompt("compute the distances between 2 geospatial files", g).intent == Intent::computational);
  CHECK(analyze_prompt("how long is the travel time to the airport", g).intent == Intent::computational);
  CHECK(analyze_prompt("tell me about withington", g).intent == Intent::retrieval);
  CHECK(code_of([&] { analyze_prompt("", g); }) == ErrorCode::empty_prompt);
  CHECK(code_of([&] { analyze_prompt("  \t ", g); }) == ErrorCode::empty_prompt);

  const auto c = analyze_prompt("what is near 1.3008° N, 103.9122° E on 2024-01-25", g);
  REQUIRE(c.coords.size() == 1);
  CHECK(c.coords[0] == normalize_point(1.3008, 103.9122));
  REQUIRE(c.time_hint.has_value());
  CHECK(c.time_hint->start() == parse_utc_instant("2024-01-25"));
  CHECK(query_anchor(c, AnchorMode::first_place) == c.coords[0]);
}

TEST_CASE("intent is stable under case and surrounding whitespace") {
  const auto g = sg_gazetteer();
  for (const std::string p : {"compute the distances between 2 geospatial files", kColdplay, "Nearest stadium"}) {
    const auto base = analyze_prompt(p, g).intent;
    std::string upper = p, lower = p;
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    CHECK(analyze_prompt(upper, g).intent == base);
    CHECK(analyze_prompt(lower, g).intent == base);
    CHECK(analyze_prompt("  \n" + p + "\t ", g).intent == base);
  }
}

TEST_CASE("centroid anchor") {
  const auto g = sg_gazetteer();
  const auto a = analyze_prompt("from Merlion Park to Raffles Hotel", g);
  REQUIRE(a.places.size() == 2);
  const auto first = query_anchor(a, AnchorMode::first_place);
  CHECK(first == a.places[0].point);
  const auto mid = query_anchor(a, AnchorMode::centroid);
  REQUIRE(mid.has_value());
  CHECK(mid->lat() == doctest::Approx((a.places[0].point->lat() + a.places[1].point->lat()) / 2));
}

TEST_CASE("retrieval") {
  const EngineConfig cfg;
  const SpatialEncoder enc(cfg);
  const auto all = load_gazetteer(GCE_TEST_DATA "/singapore.csv").records;
  const auto g = Gazetteer::from_landmarks(all);

  VectorStore one(StoreOptions::from_config(cfg));
  index_gazetteer({all[1]}, one, enc);
  const auto ctx = retrieve_context(analyze_prompt("Tell me about Marina Bay Sands", g), one, 3, enc);
  REQUIRE(ctx.passages.size() == 1);
  CHECK(ctx.passages[0].doc_id == "marina_bay_sands");
  CHECK(ctx.citations[0] == Citation{"marina_bay_sands", all[1].source});

  VectorStore full(StoreOptions::from_config(cfg));
  index_gazetteer(all, full, enc);
  const auto many = retrieve_context(analyze_prompt("Marina Bay Sands", g), full, 50, enc);
  CHECK(many.passages.size() == all.size());
  for (std::size_t i = 1; i < many.passages.size(); ++i) CHECK(many.passages[i - 1].score >= many.passages[i].score);
  REQUIRE(many.citations.size() == many.passages.size());
  for (std::size_t i = 0; i < many.citations.size(); ++i) CHECK(many.citations[i].doc_id == many.passages[i].doc_id);

  const VectorStore empty(StoreOptions::from_config(cfg));
  CHECK(code_of([&] { retrieve_context(analyze_prompt("x", g), empty, 3, enc); }) == ErrorCode::empty_store);
  CHECK(code_of([&] { retrieve_context(analyze_prompt("x", g), full, 0, enc); }) == ErrorCode::invalid_n);
}

TEST_CASE("prompt assembly") {
  CHECK(assemble_prompt("Where?", {}, 4000) == "Context:\n\nQuestion: Where?");

  const auto two = assemble_prompt("Where?", two_passages(), 4000);
  CHECK(two ==
        "Context:\n"
        "[1] Alpha is first. More text. [source: src1; doc: a]\n"
        "[2] Beta second [source: src2; doc: b]\n"
        "\nQuestion: Where?");

  CHECK(assemble_prompt("Where?", two_passages(), 10) == "Context:\n\nQuestion: Where?");

  // the cap admits passage 1 but not passage 2
  const auto cap = std::string("Context:\n[1] Alpha is first. More text. [source: src1; doc: a]\n\nQuestion: Where?").size();
  CHECK(assemble_prompt("Where?", two_passages(), cap) ==
        "Context:\n[1] Alpha is first. More text. [source: src1; doc: a]\n\nQuestion: Where?");
}

TEST_CASE("offline responder") {
  const OfflineResponder r;
  CHECK(r.deterministic());
  ContextPackage one;
  one.passages = {{"a", "Alpha is first. More text.", "src1", 0.9}};
  one.citations = {{"a", "src1"}};
  const auto out = respond(assemble_prompt("Where?", one, 4000), r);
  CHECK(out == "Based on 1 sources: Alpha is first.\nSources:\n[1] a (src1)");
  CHECK(respond(assemble_prompt("Where?", one, 4000), r) == out);
  CHECK(respond(assemble_prompt("Where?", {}, 4000), r) == OfflineResponder::kNoContext);

  const auto both = respond(assemble_prompt("Where?", two_passages(), 4000), r);
  CHECK(both == "Based on 2 sources: Alpha is first.\nSources:\n[1] a (src1)\n[2] b (src2)");

  CHECK(first_sentence("No terminator") == "No terminator");
  CHECK(first_sentence("Pi is 3.14 or so. Next") == "Pi is 3.14 or so.");
}

TEST_CASE("external client failures") {
  CHECK(code_of([] { HttpLLMClient({"ftp://example.org/x"}); }) == ErrorCode::client_error);
  CHECK(code_of([] { HttpLLMClient({"not a url"}); }) == ErrorCode::client_error);
  HttpClientOptions o;
  o.endpoint = "http://127.0.0.1:1/complete";
  o.timeout = std::chrono::seconds(2);
  const HttpLLMClient c(o);
  CHECK_FALSE(c.deterministic());
  CHECK(code_of([&] { respond("hello", c); }) == ErrorCode::client_error);
}

TEST_CASE("engine and service") {
  const auto engine = sg_engine();
  const auto comp = engine.query("compute the distances between 2 geospatial files");
  CHECK(comp.analysis.intent == Intent::computational);
  CHECK(comp.response == Engine::kComputeHint);
  CHECK(comp.context.passages.empty());

  const auto a = engine.query(kColdplay, 5, parse_utc_instant("2024-01-25"));
  const auto b = engine.query(kColdplay, 5, parse_utc_instant("2024-01-25"));
  CHECK(a.response == b.response);
  bool cites_mbs = false;
  for (const auto& c : a.context.citations) {
    CHECK(engine.store().get(c.doc_id).has_value());
    cites_mbs = cites_mbs || c.doc_id == "marina_bay_sands";
  }
  CHECK(cites_mbs);

  const QueryService svc(engine);
  const auto reply = svc.query(R"({"prompt":"Where is the Coldplay event going to happen in Singapore?","k":5,)"
                               R"("time":"2024-01-25"})");
  CHECK(reply.status == 200);
  CHECK(reply.body == query_result_json(a));

  const auto health = nlohmann::json::parse(svc.healthz().body);
  CHECK(health["status"] == "ok");
  CHECK(health["records"] == engine.store().size());

  CHECK(svc.query("{").status == 400);
  CHECK(svc.query(R"({"prompt":""})").status == 400);
  const auto bad = nlohmann::json::parse(svc.compute(R"({"op":"teleport","a":{"type":"FeatureCollection","features":[]}})").body);
  CHECK(bad.contains("error_code"));

  const std::string fc = R"({"type":"FeatureCollection","features":[{"type":"Feature","id":"p",)"
                         R"("geometry":{"type":"Point","coordinates":[103.85,1.29]}}]})";
  const auto dm = svc.compute(R"({"op":"distance-matrix","a":)" + fc + R"(,"b":)" + fc + "}");
  INFO(dm.body);
  CHECK(dm.status == 200);
  CHECK(nlohmann::json::parse(dm.body)["meters"][0][0] == 0.0);
}
