#include <algorithm>

#include <fmt/format.h>

#include "geoctx/error.hpp"
#include "geoctx/geotext.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::plain: return "plain";
    case TokenKind::city: return "city";
    case TokenKind::street: return "street";
    case TokenKind::landmark: return "landmark";
    case TokenKind::coordinate: return "coordinate";
    case TokenKind::number: return "number";
    case TokenKind::unknown: return "unknown";
  }
  return "plain";
}

namespace {

struct WordSpan {
  std::size_t start, end;
};

std::vector<WordSpan> whitespace_words(std::string_view text) {
  std::vector<WordSpan> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && str::is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !str::is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back({start, i});
  }
  return words;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::vector<Token> ngram_tokenize(std::string_view text, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_n, "n-gram size must be at least 1");
  const auto words = whitespace_words(text);
  std::vector<Token> out;
  if (words.size() < n) return out;
  out.reserve(words.size() - n + 1);
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    Token t;
    for (std::size_t j = i; j < i + n; ++j) {
      if (j > i) t.text.push_back(' ');
      t.text.append(text.substr(words[j].start, words[j].end - words[j].start));
    }
    t.start = words[i].start;
    t.end = words[i + n - 1].end;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Token> segment_words(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (str::is_space(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (str::is_word_byte(c)) {
      while (i < text.size() && str::is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++i;
    }
    Token t{std::string(text.substr(start, i - start)), TokenKind::plain, start, i};
    if (all_digits(t.text)) t.kind = TokenKind::number;
    out.push_back(std::move(t));
  }
  return out;
}

TokenKind kind_for_category(std::string_view category) {
  const auto c = str::fold(category);
  if (c == "city") return TokenKind::city;
  if (c == "street" || c == "road") return TokenKind::street;
  return TokenKind::landmark;
}

std::string Gazetteer::key_of(std::string_view name) {
  std::string key;
  for (const auto& seg : segment_words(name)) {
    if (!key.empty()) key.push_back(' ');
    key += str::fold(seg.text);
  }
  return key;
}

void Gazetteer::add(GazetteerEntry entry) {
  auto key = key_of(entry.name);
  if (key.empty()) return;
  const auto words = static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
  max_words_ = std::max(max_words_, words);
  entries_.try_emplace(std::move(key), std::move(entry));
}

Gazetteer Gazetteer::from_landmarks(const std::vector<LandmarkRecord>& records) {
  Gazetteer g;
  for (const auto& r : records) g.add({r.id, r.name, r.category, r.point});
  return g;
}

const GazetteerEntry* Gazetteer::find(std::string_view name) const {
  auto it = entries_.find(key_of(name));
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Token> semantic_tag(std::string_view text, const Gazetteer& g) {
  const auto segs = segment_words(text);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < segs.size()) {
    const std::size_t longest = std::min(g.max_words(), segs.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      std::string key;
      for (std::size_t j = i; j < i + len; ++j) {
        if (j > i) key.push_back(' ');
        key += str::fold(segs[j].text);
      }
      if (const auto* e = g.find(key)) {
        const std::size_t start = segs[i].start;
        const std::size_t end = segs[i + len - 1].end;
        out.push_back({std::string(text.substr(start, end - start)), kind_for_category(e->category), start, end});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(segs[i++]);
  }
  return out;
}

}  // namespace geoctx
