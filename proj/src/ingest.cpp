#include "geoctx/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/georelate.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

const std::vector<std::string> kColumns = {"id",     "name",        "lat",       "lon",       "category",
                                           "description", "source", "credibility", "admin_path"};
const std::vector<std::string> kEventColumns = {"event_text", "window_start", "window_end"};

std::string read_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open {} '{}'", what, path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string iso_date(std::int64_t epoch) {
  using namespace std::chrono;
  const auto days = floor<std::chrono::days>(sys_seconds{seconds{epoch}});
  const year_month_day ymd{days};
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

LandmarkRecord parse_row(const CsvRow& row, bool with_events) {
  const auto& f = row.fields;
  const std::size_t expected = kColumns.size() + (with_events ? kEventColumns.size() : 0);
  if (f.size() != expected) throw Error(ErrorCode::row_error, fmt::format("expected {} fields, got {}", expected, f.size()));
  LandmarkRecord r;
  r.id = std::string(str::trim(f[0]));
  r.name = std::string(str::trim(f[1]));
  double lat = 0, lon = 0;
  if (!str::parse_double(f[2], lat) || !str::parse_double(f[3], lon)) {
    throw Error(ErrorCode::row_error, fmt::format("lat/lon '{}', '{}' are not numbers", f[2], f[3]));
  }
  r.point = normalize_point(lat, lon);
  r.category = std::string(str::trim(f[4]));
  r.description = std::string(str::trim(f[5]));
  r.source = std::string(str::trim(f[6]));
  if (str::trim(f[7]).empty()) {
    r.credibility = 1.0;
  } else if (!str::parse_double(f[7], r.credibility)) {
    throw Error(ErrorCode::row_error, fmt::format("credibility '{}' is not a number", f[7]));
  }
  if (!str::trim(f[8]).empty()) {
    for (auto part : str::split(f[8], '|')) {
      auto id = str::trim(part);
      if (!id.empty()) r.admin_path.emplace_back(id);
    }
  }
  if (with_events) {
    const auto event = str::trim(f[9]);
    const auto ws = str::trim(f[10]);
    const auto we = str::trim(f[11]);
    if (!ws.empty() || !we.empty()) {
      if (ws.empty() || we.empty()) throw Error(ErrorCode::row_error, "window needs both start and end");
      r.window = TimeWindow::make(parse_utc_instant(std::string(ws)), parse_utc_instant(std::string(we)));
    }
    if (!event.empty()) r.event_text = std::string(event);
  }
  r.validate();
  return r;
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < text.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool row_done = false;
    while (!row_done) {
      field.clear();
      if (i < text.size() && text[i] == '"') {
        const std::size_t quote_line = line;
        ++i;
        while (true) {
          if (i >= text.size()) {
            throw Error(ErrorCode::parse_error, fmt::format("unterminated quoted field starting on line {}", quote_line),
                        i, quote_line);
          }
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field.push_back(text[i++]);
        }
        // Anything between the closing quote and the separator is kept verbatim.
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') field.push_back(text[i++]);
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') field.push_back(text[i++]);
      }
      row.fields.push_back(field);
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') {
        ++i;
        ++line;
      }
      row_done = true;
    }
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

GazetteerLoad parse_gazetteer(std::string_view text, bool strict) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorCode::missing_header, "gazetteer file is empty (header row required)");
  std::vector<std::string> header;
  for (const auto& h : rows[0].fields) header.emplace_back(str::trim(h));
  std::vector<std::string> with_events = kColumns;
  with_events.insert(with_events.end(), kEventColumns.begin(), kEventColumns.end());
  const bool events = header == with_events;
  if (header != kColumns && !events) {
    throw Error(ErrorCode::missing_header,
                fmt::format("first row must be the header '{}'", fmt::join(kColumns, ",")), std::nullopt, 1);
  }
  GazetteerLoad out;
  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    LandmarkRecord rec;
    try {
      rec = parse_row(row, events);
    } catch (const Error& e) {
      if (strict) {
        throw Error(ErrorCode::row_error, fmt::format("gazetteer line {}: {}", row.line, e.what()), std::nullopt,
                    row.line);
      }
      out.diagnostics.push_back({row.line, e.what()});
      continue;
    }
    if (!ids.insert(rec.id).second) {
      throw Error(ErrorCode::duplicate_id, fmt::format("duplicate landmark id '{}' on line {}", rec.id, row.line),
                  std::nullopt, row.line);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

GazetteerLoad load_gazetteer(const std::string& path, bool strict) {
  return parse_gazetteer(read_file(path, "gazetteer"), strict);
}

std::string gazetteer_to_csv(const std::vector<LandmarkRecord>& records) {
  std::string out = fmt::format("{},{}\n", fmt::join(kColumns, ","), fmt::join(kEventColumns, ","));
  for (const auto& r : records) {
    std::vector<std::string> f;
    f.push_back(csv_escape(r.id));
    f.push_back(csv_escape(r.name));
    f.push_back(r.point ? fmt::format("{}", r.point->lat()) : "");
    f.push_back(r.point ? fmt::format("{}", r.point->lon()) : "");
    f.push_back(csv_escape(r.category));
    f.push_back(csv_escape(r.description));
    f.push_back(csv_escape(r.source));
    f.push_back(fmt::format("{}", r.credibility));
    f.push_back(csv_escape(fmt::format("{}", fmt::join(r.admin_path, "|"))));
    f.push_back(csv_escape(r.event_text.value_or("")));
    f.push_back(r.window ? fmt::format("{}", r.window->start()) : "");
    f.push_back(r.window ? fmt::format("{}", r.window->end()) : "");
    out += fmt::format("{}\n", fmt::join(f, ","));
  }
  return out;
}

std::vector<LandmarkRecord> query_by_location(const std::vector<LandmarkRecord>& records, const GeoPoint& p,
                                              double radius_m, double earth_radius_m) {
  if (!(radius_m >= 0)) throw Error(ErrorCode::invalid_argument, "radius must be non-negative");
  std::vector<std::pair<double, const LandmarkRecord*>> hits;
  for (const auto& r : records) {
    if (!r.point) continue;
    const double d = haversine(p, *r.point, earth_radius_m);
    if (d <= radius_m) hits.emplace_back(d, &r);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->id < b.second->id;
  });
  std::vector<LandmarkRecord> out;
  for (const auto& [_, r] : hits) out.push_back(*r);
  return out;
}

std::vector<DescriptionCandidate> FixtureFetcher::fetch(const LandmarkRecord& landmark) const {
  const auto path = std::filesystem::path(dir_) / (landmark.id + ".txt");
  if (!std::filesystem::exists(path)) return {};
  const auto text = read_file(path.string(), "description fixture");
  auto lines = str::split(text, '\n');
  auto first = str::trim(lines.front());
  if (!first.starts_with("source:")) {
    throw Error(ErrorCode::parse_error, fmt::format("fixture '{}' must start with 'source: <label>'", path.string()),
                std::nullopt, 1);
  }
  DescriptionCandidate c;
  c.landmark_id = landmark.id;
  c.source = std::string(str::trim(first.substr(7)));
  c.credibility = landmark.credibility;
  std::size_t body_start = 1;
  if (lines.size() > 1) {
    auto second = str::trim(lines[1]);
    if (second.starts_with("credibility:")) {
      if (!str::parse_double(second.substr(12), c.credibility) || c.credibility < 0 || c.credibility > 1) {
        throw Error(ErrorCode::parse_error, fmt::format("fixture '{}' has a bad credibility line", path.string()),
                    std::nullopt, 2);
      }
      body_start = 2;
    }
  }
  std::string body;
  for (std::size_t i = body_start; i < lines.size(); ++i) {
    if (!body.empty()) body.push_back('\n');
    body.append(lines[i]);
  }
  c.text = std::string(str::trim(body));
  return {c};
}

double score_relevance(std::string_view description, const std::vector<std::string>& query_terms,
                       const EngineConfig& cfg) {
  std::vector<std::string> q;
  for (const auto& t : query_terms) {
    for (auto& w : str::embedding_terms(t)) q.push_back(std::move(w));
  }
  const auto a = embed_text(str::embedding_terms(description), cfg.d_st, cfg.hash_seed);
  const auto b = embed_text(q, cfg.d_st, cfg.hash_seed);
  return std::clamp(cosine(a.values, b.values), 0.0, 1.0);
}

double printable_ratio(std::string_view text) {
  if (text.empty()) return 1.0;
  std::size_t total = 0, printable = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = str::utf8_len(lead);
    std::uint32_t cp = lead;
    bool valid = true;
    if (len == 1 && lead >= 0x80) {
      valid = false;
    } else if (len > 1) {
      if (i + len > text.size()) {
        valid = false;
        len = 1;
      } else {
        cp = lead & (0xFF >> (len + 1));
        for (std::size_t k = 1; k < len; ++k) {
          const auto cont = static_cast<unsigned char>(text[i + k]);
          if ((cont & 0xC0) != 0x80) {
            valid = false;
            len = 1;
            break;
          }
          cp = (cp << 6) | (cont & 0x3F);
        }
      }
    }
    ++total;
    if (valid) {
      const bool ws = cp == '\t' || cp == '\n' || cp == '\r';
      const bool control = cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp < 0xA0) || cp == 0xFFFD;
      if (ws || !control) ++printable;
    }
    i += len;
  }
  return static_cast<double>(printable) / static_cast<double>(total);
}

std::pair<std::vector<DescriptionCandidate>, QualityReport> quality_filter(
    const std::vector<DescriptionCandidate>& candidates, const EngineConfig& cfg) {
  QualityReport report;
  report.total = candidates.size();
  std::vector<DescriptionCandidate> kept;
  std::vector<std::vector<double>> kept_vectors;
  for (const auto& c : candidates) {
    if (c.credibility < cfg.min_credibility) {
      ++report.dropped_low_credibility;
      continue;
    }
    std::size_t code_points = 0;
    for (unsigned char ch : c.text) code_points += (ch & 0xC0) != 0x80;
    if (code_points < cfg.min_description_chars || printable_ratio(c.text) < cfg.min_printable_ratio) {
      ++report.dropped_language;
      continue;
    }
    auto v = embed_text(str::embedding_terms(c.text), cfg.d_st, cfg.hash_seed).values;
    const bool redundant = std::any_of(kept_vectors.begin(), kept_vectors.end(),
                                       [&](const std::vector<double>& k) { return cosine(v, k) >= cfg.dedup_cosine; });
    if (redundant) {
      ++report.dropped_redundant;
      continue;
    }
    kept.push_back(c);
    kept_vectors.push_back(std::move(v));
  }
  report.kept = kept.size();
  return {std::move(kept), report};
}

std::string landmark_passage(const LandmarkRecord& r) {
  std::string out;
  if (r.event_text && r.window) {
    out = fmt::format("{} at {} ({} to {}). ", *r.event_text, r.name, iso_date(r.window->start()),
                      iso_date(r.window->end()));
  }
  out += fmt::format("{} ({}): {}", r.name, r.category, r.description);
  return out;
}

namespace {

VectorRecord to_vector_record(const LandmarkRecord& r, std::string doc_id, const SpatialEncoder& encoder) {
  const auto composite = encoder.make_composite(r, r.event_text);
  VectorRecord v;
  v.doc_id = std::move(doc_id);
  v.vector.assign(composite.standardized.begin(), composite.standardized.end());
  v.point = r.point;
  v.window = r.window;
  v.credibility = r.credibility;
  v.source = r.source;
  v.text = landmark_passage(r);
  return v;
}

}  // namespace

std::size_t index_gazetteer(const std::vector<LandmarkRecord>& records, VectorStore& store,
                            const SpatialEncoder& encoder) {
  std::size_t n = 0;
  for (const auto& r : records) {
    store.upsert(to_vector_record(r, r.id, encoder));
    ++n;
  }
  return n;
}

std::size_t index_descriptions(const std::vector<DescriptionCandidate>& kept,
                               const std::vector<LandmarkRecord>& records, VectorStore& store,
                               const SpatialEncoder& encoder) {
  std::size_t n = 0;
  for (const auto& c : kept) {
    auto it = std::find_if(records.begin(), records.end(), [&](const LandmarkRecord& r) { return r.id == c.landmark_id; });
    if (it == records.end()) continue;
    LandmarkRecord r = *it;
    r.description = c.text;
    r.source = c.source;
    r.credibility = c.credibility;
    r.event_text.reset();
    store.upsert(to_vector_record(r, fmt::format("{}#{}", c.landmark_id, c.source), encoder));
    ++n;
  }
  return n;
}

}  // namespace geoctx
