#include "geoctx/vectorstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/georelate.hpp"

namespace geoctx {

namespace {

constexpr std::string_view kMagic = "GCEV";

bool hit_before(const ScoredHit& a, const ScoredHit& b) {
  if (a.combined != b.combined) return a.combined > b.combined;
  return a.doc_id < b.doc_id;
}

std::vector<ScoredHit> top_k(std::vector<ScoredHit> hits, std::size_t k) {
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), hit_before);
  hits.resize(n);
  return hits;
}

double vector_norm(std::span<const float> v) {
  double sq = 0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sq);
}

double dot(std::span<const float> a, std::span<const double> b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

// -- little-endian writer/reader ---------------------------------------------

class Writer {
 public:
  template <typename T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
  }
  void put_f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_string(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<U>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string get_string() {
    const auto len = get<std::uint32_t>();
    need(len);
    std::string s(in_.substr(pos_, len));
    pos_ += len;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw Error(ErrorCode::corrupt_file, fmt::format("store file truncated at byte {}", pos_), pos_);
    }
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

Weights effective_weights(const QuerySpec& q) {
  Weights w = q.weights;
  if (q.point) return w;
  const double rest = w.text + w.temporal;
  if (rest > 0) {
    const double share = w.spatial;
    w.text += share * (w.text / rest);
    w.temporal += share * (q.weights.temporal / rest);
  } else {
    w.text = 1.0;
  }
  w.spatial = 0.0;
  return w;
}

void validate_weights(const Weights& w) {
  if (!(w.text >= 0 && w.spatial >= 0 && w.temporal >= 0) ||
      std::abs(w.text + w.spatial + w.temporal - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_weights,
                fmt::format("weights ({}, {}, {}) must be non-negative and sum to 1", w.text, w.spatial, w.temporal));
  }
}

std::string hits_to_json(std::span<const ScoredHit> hits) {
  auto arr = nlohmann::json::array();
  for (const auto& h : hits) {
    arr.push_back({{"doc_id", h.doc_id},
                   {"combined", h.combined},
                   {"text_sim", h.text_sim},
                   {"spatial_prox", h.spatial_prox},
                   {"temporal_rel", h.temporal_rel}});
  }
  return arr.dump();
}

StoreOptions StoreOptions::from_config(const EngineConfig& cfg) {
  return {cfg.d_text, cfg.lambda_m, cfg.geohash_precision, cfg.earth_radius_m};
}

VectorStore::VectorStore(StoreOptions options)
    : options_(options), mutex_(std::make_unique<std::shared_mutex>()) {
  if (options_.dim == 0) throw Error(ErrorCode::invalid_argument, "store dimension must be >= 1");
}

VectorStore::VectorStore(VectorStore&&) noexcept = default;
VectorStore& VectorStore::operator=(VectorStore&&) noexcept = default;
VectorStore::~VectorStore() = default;

bool VectorStore::upsert(VectorRecord record) {
  if (record.vector.size() != options_.dim) {
    throw Error(ErrorCode::invalid_vector_dim,
                fmt::format("record '{}' has {} components, store expects {}", record.doc_id, record.vector.size(),
                            options_.dim));
  }
  if (record.doc_id.empty()) throw Error(ErrorCode::invalid_record, "record doc_id is empty");
  const double norm = vector_norm(record.vector);
  if (norm != 0.0 && std::abs(norm - 1.0) > 1e-4) {
    throw Error(ErrorCode::invalid_record, fmt::format("record '{}' vector is neither zero nor unit length (norm {})",
                                                       record.doc_id, norm));
  }
  if (!(record.credibility >= 0.0 && record.credibility <= 1.0)) {
    throw Error(ErrorCode::invalid_record, fmt::format("record '{}' credibility outside [0, 1]", record.doc_id));
  }
  record.cell = record.point ? geohash_encode(*record.point, options_.geohash_precision) : std::string();

  std::unique_lock lock(*mutex_);
  auto drop_from_cell = [&](const std::string& cell, std::size_t idx) {
    if (cell.empty()) return;
    auto it = cells_.find(cell);
    if (it == cells_.end()) return;
    std::erase(it->second, idx);
    if (it->second.empty()) cells_.erase(it);
  };
  auto found = by_id_.find(record.doc_id);
  if (found != by_id_.end()) {
    const std::size_t idx = found->second;
    drop_from_cell(entries_[idx].record.cell, idx);
    if (!record.cell.empty()) cells_[record.cell].push_back(idx);
    entries_[idx] = Entry{std::move(record), norm};
    return true;
  }
  const std::size_t idx = entries_.size();
  by_id_.emplace(record.doc_id, idx);
  if (!record.cell.empty()) cells_[record.cell].push_back(idx);
  entries_.push_back(Entry{std::move(record), norm});
  return false;
}

std::size_t VectorStore::size() const {
  std::shared_lock lock(*mutex_);
  return entries_.size();
}

std::optional<VectorRecord> VectorStore::get(const std::string& doc_id) const {
  std::shared_lock lock(*mutex_);
  auto it = by_id_.find(doc_id);
  if (it == by_id_.end()) return std::nullopt;
  return entries_[it->second].record;
}

std::vector<std::string> VectorStore::ids() const {
  std::shared_lock lock(*mutex_);
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.record.doc_id);
  return out;
}

std::vector<ScoredHit> VectorStore::knn(std::span<const double> query, std::size_t k) const {
  if (query.size() != options_.dim) {
    throw Error(ErrorCode::invalid_vector_dim,
                fmt::format("query has {} components, store expects {}", query.size(), options_.dim));
  }
  if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
  double qn = 0;
  for (double x : query) qn += x * x;
  qn = std::sqrt(qn);
  std::shared_lock lock(*mutex_);
  std::vector<ScoredHit> hits;
  hits.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double sim = (qn == 0 || e.norm == 0) ? 0.0 : dot(e.record.vector, query) / (qn * e.norm);
    hits.push_back({e.record.doc_id, sim, sim, 0.0, 0.0});
  }
  return top_k(std::move(hits), k);
}

ScoredHit VectorStore::score(const Entry& e, const QuerySpec& q, const Weights& w, double query_norm) const {
  ScoredHit h;
  h.doc_id = e.record.doc_id;
  h.text_sim = (query_norm == 0 || e.norm == 0) ? 0.0 : dot(e.record.vector, q.text_vector) / (query_norm * e.norm);
  if (q.point && e.record.point) {
    h.spatial_prox = std::exp(-haversine(*q.point, *e.record.point, options_.earth_radius_m) / options_.lambda_m);
  }
  if (q.time && e.record.window && e.record.window->contains(*q.time)) h.temporal_rel = 1.0;
  h.combined = w.text * h.text_sim + w.spatial * h.spatial_prox + w.temporal * h.temporal_rel;
  return h;
}

std::vector<ScoredHit> VectorStore::search(const QuerySpec& q, bool use_cells) const {
  if (q.text_vector.size() != options_.dim) {
    throw Error(ErrorCode::invalid_vector_dim,
                fmt::format("query has {} components, store expects {}", q.text_vector.size(), options_.dim));
  }
  validate_weights(q.weights);
  if (q.k == 0) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
  const Weights w = effective_weights(q);
  double qn = 0;
  for (double x : q.text_vector) qn += x * x;
  qn = std::sqrt(qn);

  const bool radius_active = q.radius_m && q.point;
  std::shared_lock lock(*mutex_);
  std::vector<ScoredHit> hits;
  auto consider = [&](const Entry& e) {
    if (e.record.credibility < q.min_credibility) return;
    if (radius_active) {
      if (!e.record.point) return;
      if (haversine(*q.point, *e.record.point, options_.earth_radius_m) > *q.radius_m) return;
    }
    hits.push_back(score(e, q, w, qn));
  };

  std::optional<std::vector<std::string>> cover;
  if (radius_active && use_cells) {
    cover = geohash_cover(*q.point, *q.radius_m, options_.geohash_precision, options_.earth_radius_m);
  }
  if (cover) {
    std::vector<std::size_t> candidates;
    for (const auto& prefix : *cover) {
      for (auto it = cells_.lower_bound(prefix); it != cells_.end() && it->first.starts_with(prefix); ++it) {
        candidates.insert(candidates.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (auto idx : candidates) consider(entries_[idx]);
  } else {
    for (const auto& e : entries_) consider(e);
  }
  return top_k(std::move(hits), q.k);
}

std::vector<ScoredHit> VectorStore::hybrid_search(const QuerySpec& q) const { return search(q, true); }

std::vector<ScoredHit> VectorStore::hybrid_search_full_scan(const QuerySpec& q) const { return search(q, false); }

std::vector<ScoredHit> VectorStore::relevance_filter(std::span<const ScoredHit> hits, double min_credibility,
                                                     double dedup_cosine) const {
  if (!(dedup_cosine > 0.0 && dedup_cosine <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("dedup_cosine {} outside (0, 1]", dedup_cosine));
  }
  std::shared_lock lock(*mutex_);
  std::vector<ScoredHit> kept;
  std::vector<const Entry*> kept_entries;
  for (const auto& h : hits) {
    auto it = by_id_.find(h.doc_id);
    if (it == by_id_.end()) continue;
    const Entry& e = entries_[it->second];
    if (e.record.credibility < min_credibility) continue;
    bool redundant = false;
    for (const Entry* k : kept_entries) {
      const double c =
          (e.norm == 0 || k->norm == 0) ? 0.0 : dot(e.record.vector, k->record.vector) / (e.norm * k->norm);
      if (c >= dedup_cosine) {
        redundant = true;
        break;
      }
    }
    if (redundant) continue;
    kept.push_back(h);
    kept_entries.push_back(&e);
  }
  return kept;
}

std::string VectorStore::serialize() const {
  std::shared_lock lock(*mutex_);
  Writer w;
  w.raw(kMagic);
  w.put(kFormatVersion);
  w.put(static_cast<std::uint64_t>(entries_.size()));
  for (const auto& e : entries_) {
    const auto& r = e.record;
    w.put_string(r.doc_id);
    w.put(static_cast<std::uint32_t>(r.vector.size()));
    for (float x : r.vector) w.put_f32(x);
    std::uint8_t flags = 0;
    if (r.point) flags |= 1U;
    if (r.window) flags |= 2U;
    w.put(flags);
    if (r.point) {
      w.put_f64(r.point->lat());
      w.put_f64(r.point->lon());
    }
    if (r.window) {
      w.put(r.window->start());
      w.put(r.window->end());
    }
    w.put_f64(r.credibility);
    w.put_string(r.source);
    w.put_string(r.text);
  }
  return w.take();
}

void VectorStore::save(const std::string& path) const {
  const auto bytes = serialize();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, fmt::format("cannot write store file '{}'", tmp));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, fmt::format("short write to '{}'", tmp));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::io_error, fmt::format("cannot move '{}' into place", tmp));
  }
}

VectorStore VectorStore::deserialize(std::string_view bytes, StoreOptions options) {
  Reader r(bytes);
  if (bytes.size() < kMagic.size() || r.raw(kMagic.size()) != kMagic) {
    throw Error(ErrorCode::corrupt_file, "store file has a bad magic number", 0);
  }
  const std::size_t version_at = r.pos();
  const auto version = r.get<std::uint16_t>();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::version_mismatch, fmt::format("store format version {} is not supported", version),
                version_at);
  }
  const auto count = r.get<std::uint64_t>();
  VectorStore store(options);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t record_at = r.pos();
    VectorRecord rec;
    rec.doc_id = r.get_string();
    const auto dim = r.get<std::uint32_t>();
    if (dim != options.dim) {
      throw Error(ErrorCode::invalid_vector_dim,
                  fmt::format("record at byte {} has {} components, expected {}", record_at, dim, options.dim),
                  record_at);
    }
    rec.vector.resize(dim);
    for (auto& x : rec.vector) x = r.get_f32();
    const std::size_t flags_at = r.pos();
    const auto flags = r.get<std::uint8_t>();
    if (flags & ~3U) throw Error(ErrorCode::corrupt_file, fmt::format("bad record flags at byte {}", flags_at), flags_at);
    try {
      if (flags & 1U) {
        const double lat = r.get_f64();
        const double lon = r.get_f64();
        rec.point = normalize_point(lat, lon);
      }
      if (flags & 2U) {
        const auto s = r.get<std::int64_t>();
        const auto e = r.get<std::int64_t>();
        rec.window = TimeWindow::make(s, e);
      }
      rec.credibility = r.get_f64();
      rec.source = r.get_string();
      rec.text = r.get_string();
      store.upsert(std::move(rec));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::corrupt_file) throw;
      throw Error(ErrorCode::corrupt_file, fmt::format("invalid record at byte {}: {}", record_at, e.what()), record_at);
    }
  }
  if (!r.at_end()) {
    throw Error(ErrorCode::corrupt_file, fmt::format("trailing bytes after last record at byte {}", r.pos()), r.pos());
  }
  return store;
}

VectorStore VectorStore::load(const std::string& path, StoreOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open store file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str(), options);
}

}  // namespace geoctx
