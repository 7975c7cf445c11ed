#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/geotext.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

std::string rule_key(std::string_view word) {
  std::string key = str::fold(word);
  while (!key.empty() && key.back() == '.') key.pop_back();
  return key;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

AbbreviationTable AbbreviationTable::defaults() {
  AbbreviationTable t;
  t.add("St.", "Street");
  t.add("Ave.", "Avenue");
  t.add("Rd.", "Road");
  t.add("Blvd.", "Boulevard");
  return t;
}

void AbbreviationTable::add(std::string_view abbrev, std::string expansion) {
  auto key = rule_key(abbrev);
  if (key.empty()) throw Error(ErrorCode::parse_error, "abbreviation rule with an empty key");
  rules_[key] = std::move(expansion);
}

std::optional<std::string> AbbreviationTable::expand(std::string_view word) const {
  auto it = rules_.find(rule_key(word));
  if (it == rules_.end()) return std::nullopt;
  return it->second;
}

AbbreviationTable AbbreviationTable::parse(std::string_view text) {
  AbbreviationTable t;
  std::size_t lineno = 0;
  for (auto line : str::split(text, '\n')) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto body = str::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto tab = body.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::parse_error, fmt::format("abbreviation table line {}: expected abbrev<TAB>expansion", lineno),
                  std::nullopt, lineno);
    }
    auto abbrev = str::trim(body.substr(0, tab));
    auto expansion = str::trim(body.substr(tab + 1));
    if (abbrev.empty() || expansion.empty()) {
      throw Error(ErrorCode::parse_error, fmt::format("abbreviation table line {}: empty field", lineno), std::nullopt,
                  lineno);
    }
    t.add(abbrev, std::string(expansion));
  }
  return t;
}

AbbreviationTable AbbreviationTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open abbreviation table '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

AddressFields parse_address(std::string_view s, const AbbreviationTable& table) {
  AddressFields f;
  f.raw = std::string(s);
  std::vector<std::string_view> segments;
  for (auto seg : str::split(s, ',')) {
    seg = str::trim(seg);
    if (!seg.empty()) segments.push_back(seg);
  }
  if (segments.empty()) throw Error(ErrorCode::unparseable_address, fmt::format("cannot parse address '{}'", s));

  auto words = str::split_ws(segments.front());
  std::size_t first = 0;
  if (!words.empty() && all_digits(words.front())) {
    f.street_number = std::string(words.front());
    first = 1;
  }
  std::vector<std::string> street;
  for (std::size_t i = first; i < words.size(); ++i) {
    auto expanded = table.expand(words[i]);
    street.push_back(expanded ? *expanded : std::string(words[i]));
  }
  if (!street.empty()) f.street_name = join(street);

  if (segments.size() >= 2) {
    auto city_words = str::split_ws(segments.back());
    std::vector<std::string> city(city_words.begin(), city_words.end());
    if (city.size() >= 2 && str::fold(city.back()) == "city") city.pop_back();
    f.city = join(city);
  }
  if (!f.street_number && !f.street_name && !f.city) {
    throw Error(ErrorCode::unparseable_address, fmt::format("cannot parse address '{}'", s));
  }
  return f;
}

}  // namespace geoctx
