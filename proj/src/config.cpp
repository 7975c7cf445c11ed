#include "geoctx/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

template <typename T>
T parse_unsigned(std::string_view key, std::string_view v) {
  T out{};
  int base = 10;
  if (v.starts_with("0x") || v.starts_with("0X")) {
    v.remove_prefix(2);
    base = 16;
  }
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error(ErrorCode::config_error, fmt::format("config key '{}': expected an unsigned integer, got '{}'", key, v));
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0;
  if (!str::parse_double(v, out)) {
    throw Error(ErrorCode::config_error, fmt::format("config key '{}': expected a number, got '{}'", key, v));
  }
  return out;
}

using Setter = std::function<void(EngineConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto size_field = [&](const char* name, std::size_t EngineConfig::*field) {
      t[name] = [field](EngineConfig& c, std::string_view k, std::string_view v) {
        c.*field = parse_unsigned<std::size_t>(k, v);
      };
    };
    auto real_field = [&](const char* name, double EngineConfig::*field) {
      t[name] = [field](EngineConfig& c, std::string_view k, std::string_view v) { c.*field = parse_real(k, v); };
    };
    size_field("d_text", &EngineConfig::d_text);
    size_field("d_loc", &EngineConfig::d_loc);
    size_field("d_st", &EngineConfig::d_st);
    size_field("d_dyn", &EngineConfig::d_dyn);
    size_field("min_description_chars", &EngineConfig::min_description_chars);
    size_field("default_k", &EngineConfig::default_k);
    size_field("max_context_chars", &EngineConfig::max_context_chars);
    t["hash_seed"] = [](EngineConfig& c, std::string_view k, std::string_view v) {
      c.hash_seed = parse_unsigned<std::uint64_t>(k, v);
    };
    t["projection_seed"] = [](EngineConfig& c, std::string_view k, std::string_view v) {
      c.projection_seed = parse_unsigned<std::uint64_t>(k, v);
    };
    real_field("w_text", &EngineConfig::w_text);
    real_field("w_spatial", &EngineConfig::w_spatial);
    real_field("w_temporal", &EngineConfig::w_temporal);
    real_field("lambda_m", &EngineConfig::lambda_m);
    real_field("adjacent_m", &EngineConfig::adjacent_m);
    real_field("close_m", &EngineConfig::close_m);
    real_field("radius_m", &EngineConfig::radius_m);
    real_field("min_credibility", &EngineConfig::min_credibility);
    real_field("dedup_cosine", &EngineConfig::dedup_cosine);
    real_field("min_printable_ratio", &EngineConfig::min_printable_ratio);
    real_field("earth_radius_m", &EngineConfig::earth_radius_m);
    t["geohash_precision"] = [](EngineConfig& c, std::string_view k, std::string_view v) {
      c.geohash_precision = static_cast<int>(parse_unsigned<unsigned>(k, v));
    };
    t["cardinal_ways"] = [](EngineConfig& c, std::string_view k, std::string_view v) {
      c.cardinal_ways = static_cast<int>(parse_unsigned<unsigned>(k, v));
    };
    t["anchor"] = [](EngineConfig& c, std::string_view k, std::string_view v) {
      if (v == "first_place") {
        c.anchor = AnchorMode::first_place;
      } else if (v == "centroid") {
        c.anchor = AnchorMode::centroid;
      } else {
        throw Error(ErrorCode::config_error, fmt::format("config key '{}': expected first_place or centroid", k));
      }
    };
    return t;
  }();
  return table;
}

}  // namespace

void EngineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, msg); };
  if (d_text == 0 || d_loc == 0 || d_st == 0 || d_dyn == 0) fail("all dimensions must be >= 1");
  if (d_loc % 4 != 0) fail("d_loc must be a multiple of 4 (sin/cos of lat and lon per scale)");
  if (w_text < 0 || w_spatial < 0 || w_temporal < 0) fail("weights must be non-negative");
  if (std::abs(w_text + w_spatial + w_temporal - 1.0) > 1e-9) fail("weights must sum to 1");
  if (!(lambda_m > 0)) fail("lambda_m must be positive");
  if (geohash_precision < 1 || geohash_precision > 12) fail("geohash_precision must be in [1, 12]");
  if (!(adjacent_m >= 0 && close_m >= adjacent_m)) fail("need 0 <= adjacent_m <= close_m");
  if (!(radius_m >= 0)) fail("radius_m must be non-negative");
  if (cardinal_ways != 8 && cardinal_ways != 16) fail("cardinal_ways must be 8 or 16");
  if (!(min_credibility >= 0 && min_credibility <= 1)) fail("min_credibility must be in [0, 1]");
  if (!(dedup_cosine > 0 && dedup_cosine <= 1)) fail("dedup_cosine must be in (0, 1]");
  if (!(min_printable_ratio >= 0 && min_printable_ratio <= 1)) fail("min_printable_ratio must be in [0, 1]");
  if (default_k == 0) fail("default_k must be >= 1");
  if (!(earth_radius_m > 0)) fail("earth_radius_m must be positive");
}

EngineConfig parse_config(const std::string& text) {
  EngineConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = str::trim(body);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::config_error, fmt::format("config line {}: expected 'key = value'", lineno),
                  std::nullopt, lineno);
    }
    auto key = str::trim(body.substr(0, eq));
    auto value = str::trim(body.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(ErrorCode::config_error, fmt::format("config line {}: unknown key '{}'", lineno, key),
                  std::nullopt, lineno);
    }
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

EngineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const EngineConfig& c) {
  std::string out;
  auto line = [&](std::string_view k, const auto& v) { out += fmt::format("{} = {}\n", k, v); };
  line("d_text", c.d_text);
  line("d_loc", c.d_loc);
  line("d_st", c.d_st);
  line("d_dyn", c.d_dyn);
  line("hash_seed", c.hash_seed);
  line("projection_seed", c.projection_seed);
  line("w_text", c.w_text);
  line("w_spatial", c.w_spatial);
  line("w_temporal", c.w_temporal);
  line("lambda_m", c.lambda_m);
  line("geohash_precision", c.geohash_precision);
  line("adjacent_m", c.adjacent_m);
  line("close_m", c.close_m);
  line("radius_m", c.radius_m);
  line("cardinal_ways", c.cardinal_ways);
  line("min_credibility", c.min_credibility);
  line("dedup_cosine", c.dedup_cosine);
  line("min_description_chars", c.min_description_chars);
  line("min_printable_ratio", c.min_printable_ratio);
  line("default_k", c.default_k);
  line("max_context_chars", c.max_context_chars);
  line("anchor", c.anchor == AnchorMode::first_place ? "first_place" : "centroid");
  line("earth_radius_m", c.earth_radius_m);
  return out;
}

}  // namespace geoctx
