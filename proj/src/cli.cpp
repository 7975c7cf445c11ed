#include "geoctx/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/evalkit.hpp"
#include "geoctx/geocompute.hpp"
#include "geoctx/ingest.hpp"
#include "geoctx/service.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

std::string read_text(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open {} '{}'", what, path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw Error(ErrorCode::io_error, fmt::format("short write to '{}'", path));
}

std::int64_t parse_time_flag(const std::string& s) { return parse_utc_instant(s); }

void print_tokens(std::ostream& out, const std::vector<Token>& tokens) {
  for (const auto& t : tokens) out << fmt::format("{}\t{}\t{}\t{}\n", t.text, token_kind_name(t.kind), t.start, t.end);
}

struct Options {
  std::string config_path;

  // tokenize
  std::string scheme = "ngram";
  std::size_t n = 2;
  std::string model_path, train_path, save_model_path, tok_gazetteer, text;
  std::size_t vocab_size = 256;

  // ingest
  std::string gazetteer, fixtures, store;
  bool strict = false;

  // query
  std::string prompt, query_gazetteer, time;
  std::size_t k = 0;
  bool json = false;

  // compute
  std::string op, a, b, center, out;
  double radius = -1;
  double speed = 0;

  // eval
  std::string dataset;
  double eval_radius = -1;

  // serve
  std::string bind = "127.0.0.1:8080";
};

int cmd_tokenize(const Options& o, std::ostream& out) {
  if (o.scheme == "ngram") {
    print_tokens(out, ngram_tokenize(o.text, o.n));
  } else if (o.scheme == "subword") {
    SubwordModel model;
    if (!o.train_path.empty()) {
      std::vector<std::string> corpus;
      for (auto line : str::split(read_text(o.train_path, "corpus"), '\n')) {
        if (!str::trim(line).empty()) corpus.emplace_back(line);
      }
      model = subword_train(corpus, o.vocab_size);
      if (!o.save_model_path.empty()) write_text(o.save_model_path, model.to_json());
    } else if (!o.model_path.empty()) {
      model = SubwordModel::from_json(read_text(o.model_path, "subword model"));
    } else {
      throw Error(ErrorCode::invalid_argument, "subword scheme needs --model or --train");
    }
    print_tokens(out, subword_encode(model, o.text));
  } else if (o.scheme == "semantic") {
    Gazetteer g;
    if (!o.tok_gazetteer.empty()) g = Gazetteer::from_landmarks(load_gazetteer(o.tok_gazetteer).records);
    print_tokens(out, analyze_prompt(o.text, g).query_tokens);
  } else {
    throw Error(ErrorCode::invalid_argument, fmt::format("unknown scheme '{}'", o.scheme));
  }
  return kExitOk;
}

int cmd_ingest(const Options& o, const EngineConfig& cfg, std::ostream& out, std::ostream& err) {
  auto loaded = load_gazetteer(o.gazetteer, o.strict);
  for (const auto& d : loaded.diagnostics) err << fmt::format("warning: {} line {}: {}\n", o.gazetteer, d.line, d.message);

  const SpatialEncoder encoder(cfg);
  VectorStore store(StoreOptions::from_config(cfg));
  const auto n = index_gazetteer(loaded.records, store, encoder);
  out << fmt::format("indexed {} landmarks\n", n);

  if (!o.fixtures.empty()) {
    if (!std::filesystem::is_directory(o.fixtures)) {
      throw Error(ErrorCode::io_error, fmt::format("fixtures directory '{}' not found", o.fixtures));
    }
    const FixtureFetcher fetcher(o.fixtures);
    std::vector<DescriptionCandidate> candidates;
    for (const auto& r : loaded.records) {
      for (auto& c : fetcher.fetch(r)) {
        c.relevance = score_relevance(c.text, landmark_terms(r), cfg);
        candidates.push_back(std::move(c));
      }
    }
    const auto [kept, report] = quality_filter(candidates, cfg);
    const auto m = index_descriptions(kept, loaded.records, store, encoder);
    out << fmt::format(
        "descriptions: total={} kept={} dropped_low_credibility={} dropped_language={} dropped_redundant={} "
        "indexed={}\n",
        report.total, report.kept, report.dropped_low_credibility, report.dropped_language, report.dropped_redundant,
        m);
  }
  store.save(o.store);
  write_text(gazetteer_sidecar_path(o.store), gazetteer_to_csv(loaded.records));
  out << fmt::format("store {} holds {} records\n", o.store, store.size());
  return kExitOk;
}

std::optional<std::string> opt_path(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

int cmd_query(const Options& o, const EngineConfig& cfg, std::ostream& out) {
  const auto engine = load_engine(o.store, opt_path(o.query_gazetteer), cfg);
  std::optional<std::int64_t> time;
  if (!o.time.empty()) time = parse_time_flag(o.time);
  const auto r = engine.query(o.prompt, o.k ? std::optional<std::size_t>(o.k) : std::nullopt, time);
  if (o.json) {
    out << query_result_json(r) << "\n";
  } else {
    out << r.response << "\n";
  }
  return kExitOk;
}

int cmd_compute(const Options& o, const EngineConfig& cfg, std::ostream& out) {
  ComputeRequest req;
  req.op = o.op;
  req.a = load_geo_file(o.a);
  if (!o.b.empty()) req.b = load_geo_file(o.b);
  if (!o.center.empty()) {
    try {
      req.center = text_to_coord(o.center);
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid_argument, fmt::format("--center '{}': {}", o.center, e.what()));
    }
  }
  if (o.radius >= 0) req.radius_m = o.radius;
  if (o.speed != 0) req.speed_mps = o.speed;
  const auto result = run_compute(req, cfg.earth_radius_m);
  const auto body = result_to_json(result, req.a);
  out << result.summary << "\n";
  if (o.out.empty()) {
    out << body << "\n";
  } else {
    write_text(o.out, body + "\n");
  }
  return kExitOk;
}

int cmd_eval(const Options& o, const EngineConfig& cfg, std::ostream& out) {
  const auto engine = load_engine(o.store, std::nullopt, cfg);
  EvalOptions opts;
  opts.k = o.k ? o.k : 1;
  opts.strict = o.strict;
  if (o.eval_radius >= 0) opts.radius_m = o.eval_radius;
  const auto report = run_eval(o.dataset, engine, opts);
  const auto table = report.to_table();
  out << table;
  if (!o.out.empty()) {
    write_text(o.out, report.to_json());
    write_text(std::filesystem::path(o.out).replace_extension(".txt").string(), table);
  }
  return kExitOk;
}

int cmd_serve(const Options& o, const EngineConfig& cfg, std::ostream& err) {
  const auto colon = o.bind.rfind(':');
  int port = 0;
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::invalid_argument, fmt::format("--bind '{}' must be host:port", o.bind));
  }
  try {
    port = std::stoi(o.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, fmt::format("--bind '{}' has no valid port", o.bind));
  }
  const auto engine = load_engine(o.store, std::nullopt, cfg);
  const QueryService service(engine);
  err << fmt::format("serving {} records on {}\n", engine.store().size(), o.bind);
  service.serve(o.bind.substr(0, colon), port);
  return kExitOk;
}

}  // namespace

std::string gazetteer_sidecar_path(const std::string& store_path) { return store_path + ".gazetteer.csv"; }

Engine load_engine(const std::string& store_path, const std::optional<std::string>& gazetteer_path,
                   const EngineConfig& cfg) {
  auto store = VectorStore::load(store_path, StoreOptions::from_config(cfg));
  Gazetteer g;
  const auto path = gazetteer_path.value_or(gazetteer_sidecar_path(store_path));
  if (gazetteer_path || std::filesystem::exists(path)) g = Gazetteer::from_landmarks(load_gazetteer(path).records);
  return Engine(cfg, std::move(store), std::move(g));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gce: geospatial context engine"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "engine config file (key = value lines)")->check(CLI::ExistingFile);

  auto* tok = app.add_subcommand("tokenize", "print tokens of a text, one per line: text, kind, start, end");
  tok->add_option("text", o.text, "text to tokenize")->required();
  tok->add_option("--scheme", o.scheme, "ngram, subword or semantic")
      ->check(CLI::IsMember({"ngram", "subword", "semantic"}));
  tok->add_option("--n", o.n, "words per n-gram");
  tok->add_option("--model", o.model_path, "subword model JSON");
  tok->add_option("--train", o.train_path, "train a subword model on this corpus (one line per entry)");
  tok->add_option("--vocab-size", o.vocab_size, "subword vocabulary size when training");
  tok->add_option("--save-model", o.save_model_path, "write the trained subword model here");
  tok->add_option("--gazetteer", o.tok_gazetteer, "gazetteer CSV for semantic tagging");

  auto* ing = app.add_subcommand("ingest", "index a gazetteer (and fixture descriptions) into a store file");
  ing->add_option("--gazetteer", o.gazetteer, "gazetteer CSV")->required();
  ing->add_option("--fixtures", o.fixtures, "directory of {landmark_id}.txt descriptions");
  ing->add_option("--store", o.store, "store file to write")->required();
  ing->add_flag("--strict", o.strict, "abort on the first malformed row");

  auto* qry = app.add_subcommand("query", "answer a prompt from a store");
  qry->add_option("--store", o.store, "store file")->required();
  qry->add_option("--prompt", o.prompt, "prompt text")->required();
  qry->add_option("--k", o.k, "passages to retrieve");
  qry->add_option("--time", o.time, "query time (epoch seconds or ISO-8601 UTC)");
  qry->add_option("--gazetteer", o.query_gazetteer, "gazetteer CSV (default: the store's sidecar)");
  qry->add_flag("--json", o.json, "print the JSON response body");

  auto* cmp = app.add_subcommand("compute", "distance computations over GeoJSON files");
  cmp->add_option("--op", o.op, "operation")
      ->required()
      ->check(CLI::IsMember({"distance-matrix", "nearest-join", "within-radius", "travel-time"}));
  cmp->add_option("--a", o.a, "GeoJSON FeatureCollection A")->required();
  cmp->add_option("--b", o.b, "GeoJSON FeatureCollection B");
  cmp->add_option("--center", o.center, "\"lat,lon\" for within-radius");
  cmp->add_option("--radius-m", o.radius, "radius in meters for within-radius");
  cmp->add_option("--speed-mps", o.speed, "speed in m/s for travel-time");
  cmp->add_option("--out", o.out, "result JSON path (default: stdout)");

  auto* ev = app.add_subcommand("eval", "run an evaluation dataset against a store");
  ev->add_option("--store", o.store, "store file")->required();
  ev->add_option("--dataset", o.dataset, "JSON-lines dataset")->required();
  ev->add_option("--k", o.k, "cutoff for precision@k");
  ev->add_option("--radius-m", o.eval_radius, "count a hit when a top-k record lies within this radius of the truth point");
  ev->add_option("--out", o.out, "report JSON path; the text table goes next to it as .txt");
  ev->add_flag("--strict", o.strict, "an empty dataset is an error");

  auto* srv = app.add_subcommand("serve", "HTTP query service");
  srv->add_option("--store", o.store, "store file")->required();
  srv->add_option("--bind", o.bind, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    EngineConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    cfg.validate();
    if (tok->parsed()) return cmd_tokenize(o, out);
    if (ing->parsed()) return cmd_ingest(o, cfg, out, err);
    if (qry->parsed()) return cmd_query(o, cfg, out);
    if (cmp->parsed()) return cmd_compute(o, cfg, out);
    if (ev->parsed()) return cmd_eval(o, cfg, out);
    if (srv->parsed()) return cmd_serve(o, cfg, err);
  } catch (const Error& e) {
    err << fmt::format("error_code={} {}\n", error_code_name(e.code()), e.what());
    return e.code() == ErrorCode::invalid_argument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << fmt::format("error_code=io_error {}\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace geoctx
