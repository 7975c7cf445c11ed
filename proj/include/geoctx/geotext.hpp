#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geoctx/geomodel.hpp"

namespace geoctx {

enum class TokenKind { plain, city, street, landmark, coordinate, number, unknown };

std::string_view token_kind_name(TokenKind kind);

struct Token {
  std::string text;
  TokenKind kind = TokenKind::plain;
  std::size_t start = 0;  // byte offsets into the source, [start, end)
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Overlapping windows of `n` whitespace-separated words joined by a single
/// space. W words yield max(0, W - n + 1) tokens. Throws Error{invalid_n}.
std::vector<Token> ngram_tokenize(std::string_view text, std::size_t n);

// ---------------------------------------------------------------------------
// Byte-pair subword model

/// Symbols are UTF-8 code points. Merges never cross whitespace; whitespace
/// characters seen during training are ordinary single-symbol vocabulary.
class SubwordModel {
 public:
  static constexpr std::string_view kUnk = "<unk>";

  SubwordModel() = default;
  SubwordModel(std::vector<std::string> vocab, std::vector<std::pair<std::string, std::string>> merges);

  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  const std::vector<std::pair<std::string, std::string>>& merges() const noexcept { return merges_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  bool contains(std::string_view symbol) const;

  /// JSON: {"vocab": [...], "merges": [[left, right], ...]}
  std::string to_json() const;
  static SubwordModel from_json(std::string_view json);

 private:
  std::vector<std::string> vocab_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Starts from the character alphabet and repeatedly merges the most frequent
/// adjacent pair (ties: lexicographically smallest pair) until the vocabulary
/// reaches `vocab_size` or no pair occurs at least twice.
/// Throws Error{vocab_too_small} / Error{empty_input}.
SubwordModel subword_train(const std::vector<std::string>& corpus, std::size_t vocab_size);

/// Applies the merges in recorded order. Characters outside the vocabulary
/// become TokenKind::unknown tokens with text "<unk>" and the span of the
/// original bytes.
std::vector<Token> subword_encode(const SubwordModel& model, std::string_view text);

// ---------------------------------------------------------------------------
// Gazetteer and semantic tagging

struct GazetteerEntry {
  std::string id;
  std::string name;  // as written
  std::string category;
  std::optional<GeoPoint> point;
};

/// Case-insensitive name directory. Names are normalized by casefolding and
/// word segmentation (see `segment_words`); the first entry registered under
/// a normalized name wins.
class Gazetteer {
 public:
  void add(GazetteerEntry entry);
  static Gazetteer from_landmarks(const std::vector<LandmarkRecord>& records);

  const GazetteerEntry* find(std::string_view name) const;
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t max_words() const noexcept { return max_words_; }
  /// Normalized key used internally, exposed for tests.
  static std::string key_of(std::string_view name);

 private:
  std::unordered_map<std::string, GazetteerEntry> entries_;
  std::size_t max_words_ = 0;
};

/// Splits text into maximal runs of word bytes (letters, digits, UTF-8) and
/// single punctuation characters; whitespace is dropped. Spans are byte offsets.
std::vector<Token> segment_words(std::string_view text);

/// Longest-match-first gazetteer tagging. Matched spans become city/street/
/// landmark tokens (by entry category); other segments stay plain, or number
/// when all digits. The result covers every non-whitespace byte.
std::vector<Token> semantic_tag(std::string_view text, const Gazetteer& g);

TokenKind kind_for_category(std::string_view category);

// ---------------------------------------------------------------------------
// Coordinates

/// Substitutes "[Latitude]" and "[Longitude]" with 4-decimal fixed-point
/// values. Throws Error{bad_template} when either placeholder is missing.
std::string coord_to_text(const GeoPoint& p, std::string_view tmpl);

/// Accepts "D° H, D° H" (N/S first, E/W second; the degree sign is optional)
/// or "signed decimal, signed decimal". Throws Error{parse_error} with the
/// offset of the first unconsumed character.
GeoPoint text_to_coord(std::string_view s);

struct CoordinateMatch {
  GeoPoint point;
  std::size_t start;
  std::size_t end;
};

/// Finds coordinate-shaped substrings in free text. The hemisphere form is
/// always accepted; the bare decimal form needs a decimal point in both
/// numbers so prose like "between 2, 3" is not read as a coordinate.
std::vector<CoordinateMatch> find_coordinates(std::string_view text);

// ---------------------------------------------------------------------------
// Addresses

/// Case-insensitive abbreviation -> expansion rules. A word matches a key
/// with or without the key's trailing period.
class AbbreviationTable {
 public:
  static AbbreviationTable defaults();
  /// "abbrev<TAB>expansion" lines, '#' comments, blank lines ignored.
  static AbbreviationTable parse(std::string_view text);
  static AbbreviationTable load(const std::string& path);

  void add(std::string_view abbrev, std::string expansion);
  std::optional<std::string> expand(std::string_view word) const;
  std::size_t size() const noexcept { return rules_.size(); }

 private:
  std::map<std::string, std::string> rules_;
};

struct AddressFields {
  std::optional<std::string> street_number;
  std::optional<std::string> street_name;
  std::optional<std::string> city;
  std::string raw;
};

/// Rule-based parse: a leading integer is the street number, words up to the
/// first comma the street name (abbreviations expanded), and the final comma
/// segment the city (with a trailing "City" word removed).
/// Throws Error{unparseable_address}.
AddressFields parse_address(std::string_view s, const AbbreviationTable& table = AbbreviationTable::defaults());

}  // namespace geoctx
