#include <doctest.h>

#include <random>
#include <set>

#include "geoctx/error.hpp"
#include "geoctx/geotext.hpp"
#include "geoctx/strutil.hpp"

using namespace geoctx;

namespace {

std::vector<std::string> texts(const std::vector<Token>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.text);
  return out;
}

GazetteerEntry entry(std::string id, std::string name, std::string cat) { return {id, name, cat, std::nullopt}; }

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// longest entry (by word count) whose words equal the text words from position i
std::vector<std::string> brute_force_matches(const std::vector<std::string>& words,
                                             const std::vector<std::string>& names) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t best = 0;
    std::string best_name;
    for (const auto& n : names) {
      std::vector<std::string> nw;
      for (auto w : str::split_ws(n)) nw.push_back(lower(std::string(w)));
      if (nw.size() <= best || i + nw.size() > words.size()) continue;
      bool eq = true;
      for (std::size_t k = 0; k < nw.size(); ++k) eq = eq && lower(words[i + k]) == nw[k];
      if (eq) {
        best = nw.size();
        best_name = n;
      }
    }
    if (best) {
      std::string joined = words[i];
      for (std::size_t k = 1; k < best; ++k) joined += " " + words[i + k];
      out.push_back(joined);
      i += best;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("ngram tokenization") {
  CHECK(texts(ngram_tokenize("New York City", 2)) == std::vector<std::string>{"New York", "York City"});
  CHECK(texts(ngram_tokenize("New York City", 1)) == std::vector<std::string>{"New", "York", "City"});
  CHECK(ngram_tokenize("", 2).empty());
  CHECK(ngram_tokenize("one", 2).empty());
  CHECK(texts(ngram_tokenize("  a   b\tc ", 3)) == std::vector<std::string>{"a b c"});
  const auto spans = ngram_tokenize("New York City", 2);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 8);
  CHECK(spans[1].start == 4);
  CHECK(spans[1].end == 13);
  CHECK_THROWS_AS(ngram_tokenize("x", 0), Error);
}

TEST_CASE("subword training") {
  const auto m = subword_train({"ab"}, 2);
  CHECK(std::set<std::string>(m.vocab().begin(), m.vocab().end()) == std::set<std::string>{"a", "b"});
  CHECK(m.merges().empty());

  const auto m2 = subword_train({"aaab", "aaab"}, 3);
  REQUIRE(m2.merges().size() == 1);
  CHECK(m2.merges()[0] == std::pair<std::string, std::string>{"a", "a"});
  CHECK(texts(subword_encode(m2, "aaab")) == std::vector<std::string>{"aa", "a", "b"});

  try {
    subword_train({"x"}, 0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::vocab_too_small);
  }
}

TEST_CASE("subword encoding fallbacks") {
  const auto m = subword_train({"ab"}, 2);
  CHECK(texts(subword_encode(m, "ab")) == std::vector<std::string>{"a", "b"});
  const auto toks = subword_encode(m, "a\xC3\xA9" "b");
  REQUIRE(toks.size() == 3);
  CHECK(toks[1].kind == TokenKind::unknown);
  CHECK(toks[1].text == SubwordModel::kUnk);
  CHECK(toks[1].start == 1);
  CHECK(toks[1].end == 3);
}

TEST_CASE("subword merges never cross whitespace and the model round-trips") {
  const auto m = subword_train({"ab ab ab", "ab ba"}, 10);
  for (const auto& [l, r] : m.merges()) {
    CHECK(l.find(' ') == std::string::npos);
    CHECK(r.find(' ') == std::string::npos);
  }
  const auto back = SubwordModel::from_json(m.to_json());
  CHECK(back.vocab() == m.vocab());
  CHECK(back.merges() == m.merges());
  std::string joined;
  for (const auto& t : subword_encode(back, "ab ba ab")) joined += t.text;
  CHECK(joined == "ab ba ab");
}

TEST_CASE("semantic tagging") {
  Gazetteer g;
  g.add(entry("mbs", "Marina Bay Sands", "landmark"));
  auto toks = semantic_tag("Coldplay event at Marina Bay Sands", g);
  REQUIRE(!toks.empty());
  CHECK(toks.back().text == "Marina Bay Sands");
  CHECK(toks.back().kind == TokenKind::landmark);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) CHECK(toks[i].kind == TokenKind::plain);

  const auto plain = semantic_tag("hello world", Gazetteer{});
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].kind == TokenKind::plain);

  Gazetteer streets;
  streets.add(entry("ec", "East Coast", "street"));
  streets.add(entry("ecr", "East Coast Road", "street"));
  const auto s = semantic_tag("east coast road", streets);
  REQUIRE(s.size() == 1);
  CHECK(s[0].text == "east coast road");
  CHECK(s[0].kind == TokenKind::street);

  const auto digits = semantic_tag("Gate 42", Gazetteer{});
  CHECK(digits[1].kind == TokenKind::number);
}

TEST_CASE("semantic tagging agrees with a brute-force longest match") {
  const std::vector<std::string> names = {"Bay",           "Marina Bay",    "Marina Bay Sands", "East Coast",
                                          "East Coast Road", "Coast",       "Sands Expo",       "Road"};
  Gazetteer g;
  for (std::size_t i = 0; i < names.size(); ++i) g.add(entry("e" + std::to_string(i), names[i], "landmark"));
  const std::vector<std::string> vocab = {"marina", "bay", "sands", "expo", "east", "coast", "road", "the", "at"};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> words;
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      auto w = vocab[rng() % vocab.size()];
      if (rng() % 2) w[0] = static_cast<char>(std::toupper(w[0]));
      words.push_back(w);
      text += (i ? " " : "") + w;
    }
    std::vector<std::string> got;
    for (const auto& t : semantic_tag(text, g)) {
      if (t.kind == TokenKind::landmark) got.push_back(t.text);
    }
    CHECK(got == brute_force_matches(words, names));
  }
}

TEST_CASE("coordinate text") {
  const auto p = normalize_point(1.3008, 103.9122);
  CHECK(coord_to_text(p, "[Latitude], [Longitude]") == "1.3008, 103.9122");
  CHECK(coord_to_text(normalize_point(0, 0), "[Latitude], [Longitude]") == "0.0000, 0.0000");
  CHECK_THROWS_AS(coord_to_text(p, "lat=[Latitude]"), Error);

  CHECK(text_to_coord("1.3008° N, 103.9122° E") == p);
  CHECK(text_to_coord("0, 0") == normalize_point(0, 0));
  CHECK(text_to_coord("33.9° S, 18.4° W") == normalize_point(-33.9, -18.4));
  CHECK(text_to_coord("-33.9, 18.4") == normalize_point(-33.9, 18.4));
  try {
    text_to_coord("1.3008° N");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(e.offset().has_value());
  }
  CHECK_THROWS_AS(text_to_coord("95, 10"), Error);

  const auto found = find_coordinates("meet at 1.3008° N, 103.9122° E or 1.29, 103.85 tonight");
  REQUIRE(found.size() == 2);
  CHECK(found[0].point == p);
  CHECK(found[1].point == normalize_point(1.29, 103.85));
  CHECK(find_coordinates("gate 1, 2").empty());
}

TEST_CASE("address parsing") {
  const auto a = parse_address("123 East Coast, Singapore City");
  CHECK(a.street_number == "123");
  CHECK(a.street_name == "East Coast");
  CHECK(a.city == "Singapore");

  const auto b = parse_address("1 Main St., Springfield");
  CHECK(b.street_number == "1");
  CHECK(b.street_name == "Main Street");
  CHECK(b.city == "Springfield");

  // one segment means no city field at all
  const auto lone = parse_address("Kansas City");
  CHECK(lone.street_name == "Kansas City");
  CHECK_FALSE(lone.city.has_value());
  try {
    parse_address("");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unparseable_address);
  }

  const auto table = AbbreviationTable::load(GCE_REPO_DATA "/abbreviations.tsv");
  CHECK(table.expand("Hwy.") == "Highway");
  CHECK(parse_address("9 Pan Island Expy, Singapore", table).street_name == "Pan Island Expressway");
}
