#include "geoctx/ragctx.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kComputeTriggers = {"distance", "distances", "nearest", "within",
                                                   "radius",   "travel time", "compute"};

// lowercase alnum words joined by single spaces, padded on both ends
std::string word_line(std::string_view text) {
  std::string out = " ";
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      out.push_back(static_cast<char>(std::tolower(c)));
      in_word = true;
    } else if (in_word) {
      out.push_back(' ');
      in_word = false;
    }
  }
  if (in_word) out.push_back(' ');
  return out;
}

std::optional<TimeWindow> find_date(std::string_view text) {
  static const std::regex re(R"((^|[^0-9])(\d{4}-\d{2}-\d{2})([^0-9]|$))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, re)) return std::nullopt;
  try {
    const auto start = parse_utc_instant(m[2].str());
    return TimeWindow::make(start, start + 86399);
  } catch (const Error&) {
    return std::nullopt;  // looks like a date but isn't one, e.g. month 13
  }
}

bool is_place(TokenKind k) { return k == TokenKind::city || k == TokenKind::street || k == TokenKind::landmark; }

}  // namespace

std::string_view intent_name(Intent intent) {
  return intent == Intent::computational ? "computational" : "retrieval";
}

std::vector<std::string> PromptAnalysis::terms() const {
  std::vector<std::string> out;
  for (const auto& t : query_tokens) {
    if (t.kind == TokenKind::coordinate) continue;
    for (auto& w : str::embedding_terms(t.text)) out.push_back(std::move(w));
  }
  return out;
}

bool is_computational(std::string_view text) {
  const auto line = word_line(text);
  return std::any_of(kComputeTriggers.begin(), kComputeTriggers.end(),
                     [&](const std::string& kw) { return line.find(" " + kw + " ") != std::string::npos; });
}

PromptAnalysis analyze_prompt(std::string_view text, const Gazetteer& g) {
  const auto trimmed = str::trim(text);
  if (trimmed.empty()) throw Error(ErrorCode::empty_prompt, "prompt is empty");
  PromptAnalysis a;
  a.prompt = std::string(trimmed);
  a.intent = is_computational(trimmed) ? Intent::computational : Intent::retrieval;
  a.time_hint = find_date(trimmed);

  // offsets stay relative to the caller's text
  const auto tagged = semantic_tag(text, g);
  const auto coords = find_coordinates(text);
  for (const auto& c : coords) a.coords.push_back(c.point);

  // coordinate spans replace whatever tokens they overlap
  std::size_t ci = 0;
  for (const auto& t : tagged) {
    while (ci < coords.size() && coords[ci].end <= t.start) {
      a.query_tokens.push_back(
          {std::string(text.substr(coords[ci].start, coords[ci].end - coords[ci].start)), TokenKind::coordinate,
           coords[ci].start, coords[ci].end});
      ++ci;
    }
    if (ci < coords.size() && t.start >= coords[ci].start && t.end <= coords[ci].end) continue;
    a.query_tokens.push_back(t);
  }
  for (; ci < coords.size(); ++ci) {
    a.query_tokens.push_back({std::string(text.substr(coords[ci].start, coords[ci].end - coords[ci].start)),
                              TokenKind::coordinate, coords[ci].start, coords[ci].end});
  }

  for (const auto& t : a.query_tokens) {
    if (!is_place(t.kind)) continue;
    const auto* entry = g.find(t.text);
    if (!entry) continue;
    a.places.push_back({t, entry->id, entry->point});
  }
  return a;
}

std::optional<GeoPoint> query_anchor(const PromptAnalysis& a, AnchorMode mode) {
  std::vector<GeoPoint> pts;
  for (const auto& p : a.places) {
    if (p.point) pts.push_back(*p.point);
  }
  if (!pts.empty()) {
    if (mode == AnchorMode::first_place || pts.size() == 1) return pts.front();
    double lat = 0, lon = 0;
    for (const auto& p : pts) {
      lat += p.lat();
      lon += p.lon();
    }
    return normalize_point(lat / static_cast<double>(pts.size()), lon / static_cast<double>(pts.size()));
  }
  if (!a.coords.empty()) return a.coords.front();
  return std::nullopt;
}

ContextPackage retrieve_context(const PromptAnalysis& a, const VectorStore& store, std::size_t k,
                                const EngineConfig& cfg, std::optional<std::int64_t> time) {
  return retrieve_context(a, store, k, SpatialEncoder(cfg), time);
}

ContextPackage retrieve_context(const PromptAnalysis& a, const VectorStore& store, std::size_t k,
                                const SpatialEncoder& encoder, std::optional<std::int64_t> time) {
  if (k == 0) throw Error(ErrorCode::invalid_n, "k must be at least 1");
  if (store.size() == 0) throw Error(ErrorCode::empty_store, "vector store has no records");
  const auto& cfg = encoder.config();

  QuerySpec q;
  q.point = query_anchor(a, cfg.anchor);
  q.time = time ? time : (a.time_hint ? std::optional<std::int64_t>(a.time_hint->start()) : std::nullopt);
  q.text_vector = encoder.query_vector(a.terms(), q.point, q.time.has_value());
  q.weights = {cfg.w_text, cfg.w_spatial, cfg.w_temporal};
  // over-fetch so the filter below still leaves k hits when it can
  q.k = std::min(store.size(), std::max(k, 4 * k));

  auto hits = store.hybrid_search(q);
  hits = store.relevance_filter(hits, cfg.min_credibility, cfg.dedup_cosine);
  if (hits.size() > k) hits.resize(k);

  ContextPackage ctx;
  for (const auto& h : hits) {
    const auto rec = store.get(h.doc_id);
    if (!rec) continue;
    ctx.passages.push_back({h.doc_id, rec->text, rec->source, h.combined});
    ctx.citations.push_back({h.doc_id, rec->source});
  }
  return ctx;
}

std::string assemble_prompt(std::string_view user_prompt, const ContextPackage& ctx, std::size_t max_chars) {
  const std::string head = "Context:\n";
  const std::string tail = fmt::format("\nQuestion: {}", user_prompt);
  std::string body;
  std::size_t used = head.size() + tail.size();
  for (std::size_t i = 0; i < ctx.passages.size(); ++i) {
    const auto& p = ctx.passages[i];
    std::string text = p.text;
    std::replace_if(text.begin(), text.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
    auto line = fmt::format("[{}] {} [source: {}; doc: {}]\n", i + 1, text, p.source, p.doc_id);
    if (used + line.size() > max_chars) break;
    used += line.size();
    body += line;
  }
  return head + body + tail;
}

std::string first_sentence(std::string_view text) {
  text = str::trim(text);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || str::is_space(text[i + 1]))) {
      return std::string(text.substr(0, i + 1));
    }
  }
  return std::string(text);
}

std::string OfflineResponder::complete(const std::string& augmented_prompt) const {
  struct Parsed {
    std::string text, source, doc;
  };
  std::vector<Parsed> passages;
  static const std::regex head(R"(^\[\d+\] )");
  for (auto line : str::split(augmented_prompt, '\n')) {
    if (line.starts_with("Question: ")) break;
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(line.begin(), line.end(), m, head)) continue;
    const auto marker = line.rfind(" [source: ");
    if (marker == std::string_view::npos || !line.ends_with("]")) continue;
    const auto meta = line.substr(marker + 10, line.size() - marker - 11);
    const auto sep = meta.rfind("; doc: ");
    if (sep == std::string_view::npos) continue;
    const auto text_start = static_cast<std::size_t>(m.length(0));
    passages.push_back({std::string(line.substr(text_start, marker - text_start)), std::string(meta.substr(0, sep)),
                        std::string(meta.substr(sep + 7))});
  }
  if (passages.empty()) return std::string(kNoContext);
  std::string out = fmt::format("Based on {} sources: {}\nSources:", passages.size(), first_sentence(passages[0].text));
  for (std::size_t i = 0; i < passages.size(); ++i) {
    out += fmt::format("\n[{}] {} ({})", i + 1, passages[i].doc, passages[i].source);
  }
  return out;
}

HttpLLMClient::HttpLLMClient(HttpClientOptions options) : options_(std::move(options)) {
  static const std::regex url(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.endpoint, m, url)) {
    throw Error(ErrorCode::client_error,
                fmt::format("LLM endpoint '{}' must look like http://host[:port]/path", options_.endpoint));
  }
  host_ = m[1].str();
  if (m[2].matched) port_ = std::stoi(m[2].str());
  path_ = m[3].matched ? m[3].str() : "/";
  if (options_.timeout.count() <= 0) throw Error(ErrorCode::client_error, "LLM timeout must be positive");
}

std::string HttpLLMClient::complete(const std::string& augmented_prompt) const {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(options_.timeout);
  cli.set_read_timeout(options_.timeout);
  httplib::Headers headers;
  if (const char* token = std::getenv(options_.token_env.c_str()); token && *token) {
    headers.emplace("Authorization", fmt::format("Bearer {}", token));
  }
  const auto res = cli.Post(path_, headers, json{{"prompt", augmented_prompt}}.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::client_error,
                fmt::format("LLM request to {} failed: {}", options_.endpoint, httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::client_error, fmt::format("LLM endpoint answered HTTP {}", res->status));
  }
  const auto body = json::parse(res->body, nullptr, false);
  if (!body.is_object() || !body.contains("response") || !body["response"].is_string()) {
    throw Error(ErrorCode::client_error, "LLM reply is not a JSON object with a string \"response\"");
  }
  return body["response"].get<std::string>();
}

std::string respond(const std::string& augmented, const LLMClient& client) {
  try {
    return client.complete(augmented);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::client_error) throw;
    throw Error(ErrorCode::client_error, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::client_error, e.what());
  }
}

std::string query_result_json(const QueryResult& r) {
  json cites = json::array();
  for (const auto& c : r.context.citations) cites.push_back({{"doc_id", c.doc_id}, {"source", c.source}});
  json out = {{"response", r.response}, {"citations", cites}, {"intent", std::string(intent_name(r.analysis.intent))}};
  return out.dump();
}

Engine::Engine(EngineConfig cfg, VectorStore store, Gazetteer gazetteer, std::shared_ptr<const LLMClient> client)
    : cfg_(cfg),
      store_(std::move(store)),
      gazetteer_(std::move(gazetteer)),
      encoder_(cfg_),
      client_(client ? std::move(client) : std::make_shared<OfflineResponder>()) {}

QueryResult Engine::query(std::string_view prompt, std::optional<std::size_t> k,
                          std::optional<std::int64_t> time) const {
  QueryResult r;
  r.analysis = analyze_prompt(prompt, gazetteer_);
  if (r.analysis.intent == Intent::computational) {
    r.response = std::string(kComputeHint);
    return r;
  }
  r.context = retrieve_context(r.analysis, store_, k.value_or(cfg_.default_k), encoder_, time);
  r.augmented = assemble_prompt(r.analysis.prompt, r.context, cfg_.max_context_chars);
  r.response = respond(r.augmented, *client_);
  return r;
}

}  // namespace geoctx
