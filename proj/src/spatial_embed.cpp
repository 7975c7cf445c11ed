#include "geoctx/spatial_embed.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void normalize_in_place(std::vector<double>& v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  if (sq == 0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

}  // namespace

double TextVector::norm() const {
  double sq = 0;
  for (double x : values) sq += x * x;
  return std::sqrt(sq);
}

std::uint64_t feature_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ splitmix64(seed);
  for (unsigned char c : token) {
    h ^= c;
    h *= kFnvPrime;
  }
  return splitmix64(h);
}

TextVector embed_text(std::span<const std::string> terms, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::invalid_argument, "embedding dimension must be >= 1");
  TextVector v{std::vector<double>(dim, 0.0)};
  for (const auto& t : terms) {
    const std::uint64_t h = feature_hash(t, seed);
    v.values[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  normalize_in_place(v.values);
  return v;
}

TextVector embed_text(std::span<const Token> tokens, std::size_t dim, std::uint64_t seed) {
  std::vector<std::string> terms;
  terms.reserve(tokens.size());
  for (const auto& t : tokens) terms.push_back(str::fold(t.text));
  return embed_text(terms, dim, seed);
}

LocationVector encode_location(const GeoPoint& p, std::size_t scales) {
  LocationVector v;
  v.values.reserve(scales * 4);
  for (std::size_t k = 0; k < scales; ++k) {
    const double scale = std::ldexp(1.0, static_cast<int>(k));
    const double a = std::numbers::pi * p.lat() / scale;
    const double b = std::numbers::pi * p.lon() / scale;
    v.values.push_back(std::sin(a));
    v.values.push_back(std::cos(a));
    v.values.push_back(std::sin(b));
    v.values.push_back(std::cos(b));
  }
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "cosine of vectors with different lengths");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> HashingEmbedder::embed(std::span<const std::string> terms, std::size_t dim) const {
  return embed_text(terms, dim, seed_).values;
}

Standardizer::Standardizer(std::size_t d_in, std::size_t d_out, std::uint64_t seed)
    : d_in_(d_in), d_out_(d_out), matrix_(d_in * d_out) {
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_out));
  for (double& m : matrix_) m = (rng() >> 63) ? -scale : scale;
}

std::vector<double> Standardizer::project(std::span<const double> input) const {
  if (input.size() != d_in_) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("standardize expects {} components, got {}", d_in_, input.size()));
  }
  std::vector<double> out(d_out_, 0.0);
  for (std::size_t r = 0; r < d_out_; ++r) {
    const double* row = matrix_.data() + r * d_in_;
    double acc = 0;
    for (std::size_t c = 0; c < d_in_; ++c) acc += row[c] * input[c];
    out[r] = acc;
  }
  return out;
}

std::vector<double> Standardizer::standardize(std::span<const double> input) const {
  auto out = project(input);
  normalize_in_place(out);
  return out;
}

SpatialEncoder::SpatialEncoder(const EngineConfig& cfg, std::shared_ptr<const Embedder> embedder)
    : cfg_(cfg),
      embedder_(embedder ? std::move(embedder) : std::make_shared<HashingEmbedder>(cfg.hash_seed)),
      standardizer_(cfg.d_loc + cfg.d_st + cfg.d_dyn, cfg.d_text, cfg.projection_seed) {
  cfg_.validate();
}

std::vector<double> SpatialEncoder::embed(std::span<const std::string> terms, std::size_t dim) const {
  auto v = embedder_->embed(terms, dim);
  if (v.size() != dim) {
    throw Error(ErrorCode::dimension_mismatch, fmt::format("embedder returned {} components, expected {}", v.size(), dim));
  }
  return v;
}

std::vector<std::string> landmark_terms(const LandmarkRecord& landmark) {
  auto terms = str::embedding_terms(landmark.name);
  for (auto& t : str::embedding_terms(landmark.category)) terms.push_back(std::move(t));
  for (auto& t : str::embedding_terms(landmark.description)) terms.push_back(std::move(t));
  return terms;
}

CompositeSpatialVector SpatialEncoder::make_composite(const LandmarkRecord& landmark,
                                                      const std::optional<std::string>& event_text) const {
  if (!landmark.point) {
    throw Error(ErrorCode::missing_point, fmt::format("landmark '{}' has no point", landmark.id));
  }
  if (event_text && !landmark.window) {
    throw Error(ErrorCode::missing_window, fmt::format("event text for '{}' needs a time window", landmark.id));
  }
  CompositeSpatialVector c;
  c.location = encode_location(*landmark.point, cfg_.d_loc / 4);
  c.spatial_text.values = embed(landmark_terms(landmark), cfg_.d_st);
  if (event_text) {
    c.dynamic = DynamicVector{embed(str::embedding_terms(*event_text), cfg_.d_dyn), *landmark.window};
  }
  c.standardized = standardize(concat(c));
  return c;
}

std::vector<double> SpatialEncoder::concat(const CompositeSpatialVector& c) const {
  std::vector<double> out;
  out.reserve(standardizer_.input_dim());
  const double loc_scale = 1.0 / std::sqrt(static_cast<double>(cfg_.d_loc) / 2.0);
  for (double x : c.location.values) out.push_back(x * loc_scale);
  out.insert(out.end(), c.spatial_text.values.begin(), c.spatial_text.values.end());
  if (c.dynamic) {
    out.insert(out.end(), c.dynamic->values.begin(), c.dynamic->values.end());
  } else {
    out.resize(out.size() + cfg_.d_dyn, 0.0);
  }
  return out;
}

std::vector<double> SpatialEncoder::concat(const std::optional<GeoPoint>& point, std::span<const double> spatial_text,
                                           std::span<const double> dynamic) const {
  CompositeSpatialVector c;
  c.location.values = point ? encode_location(*point, cfg_.d_loc / 4).values : std::vector<double>(cfg_.d_loc, 0.0);
  c.spatial_text.values.assign(spatial_text.begin(), spatial_text.end());
  if (!dynamic.empty()) c.dynamic = DynamicVector{{dynamic.begin(), dynamic.end()}, TimeWindow::make(0, 0)};
  return concat(c);
}

std::vector<double> SpatialEncoder::standardize(std::span<const double> concatenated) const {
  return standardizer_.standardize(concatenated);
}

bool SpatialEncoder::verify(const CompositeSpatialVector& c) const {
  return c.standardized == standardize(concat(c));
}

std::vector<double> SpatialEncoder::query_vector(std::span<const std::string> terms,
                                                 const std::optional<GeoPoint>& point, bool has_time) const {
  auto text = embed(terms, cfg_.d_st);
  std::vector<double> dynamic;
  if (has_time) dynamic = embed(terms, cfg_.d_dyn);
  return standardize(concat(point, text, dynamic));
}

}  // namespace geoctx
