#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/geotext.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

namespace {

using Pair = std::pair<std::string, std::string>;

struct Piece {
  std::string_view text;
  std::size_t offset;
  bool whitespace;
};

// Code points of `s`, each paired with its byte offset.
std::vector<std::pair<std::string_view, std::size_t>> code_points(std::string_view s) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = std::min(str::utf8_len(static_cast<unsigned char>(s[i])), s.size() - i);
    out.emplace_back(s.substr(i, len), i);
    i += len;
  }
  return out;
}

// Whitespace code points are their own pieces; everything else groups into words.
std::vector<Piece> pieces(std::string_view s) {
  std::vector<Piece> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (str::is_space(static_cast<unsigned char>(s[i]))) {
      out.push_back({s.substr(i, 1), i, true});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < s.size() && !str::is_space(static_cast<unsigned char>(s[i]))) ++i;
    out.push_back({s.substr(start, i - start), start, false});
  }
  return out;
}

void apply_merge(std::vector<std::string>& symbols, const Pair& merge) {
  if (symbols.size() < 2) return;
  std::vector<std::string> merged;
  merged.reserve(symbols.size());
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (i + 1 < symbols.size() && symbols[i] == merge.first && symbols[i + 1] == merge.second) {
      merged.push_back(symbols[i] + symbols[i + 1]);
      i += 2;
    } else {
      merged.push_back(std::move(symbols[i]));
      ++i;
    }
  }
  symbols = std::move(merged);
}

}  // namespace

SubwordModel::SubwordModel(std::vector<std::string> vocab, std::vector<std::pair<std::string, std::string>> merges)
    : vocab_(std::move(vocab)), merges_(std::move(merges)) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
}

bool SubwordModel::contains(std::string_view symbol) const { return index_.contains(std::string(symbol)); }

std::string SubwordModel::to_json() const {
  nlohmann::json j;
  j["vocab"] = vocab_;
  auto merges = nlohmann::json::array();
  for (const auto& [l, r] : merges_) merges.push_back({l, r});
  j["merges"] = merges;
  return j.dump();
}

SubwordModel SubwordModel::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    std::vector<std::string> vocab = j.at("vocab").get<std::vector<std::string>>();
    std::vector<Pair> merges;
    for (const auto& m : j.at("merges")) merges.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());
    return SubwordModel(std::move(vocab), std::move(merges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, fmt::format("bad subword model: {}", e.what()));
  }
}

SubwordModel subword_train(const std::vector<std::string>& corpus, std::size_t vocab_size) {
  if (corpus.empty()) throw Error(ErrorCode::empty_input, "subword training corpus is empty");

  std::set<std::string> alphabet;
  std::map<std::string, std::size_t> word_counts;
  for (const auto& line : corpus) {
    for (const auto& [cp, _] : code_points(line)) alphabet.emplace(cp);
    for (const auto& piece : pieces(line)) {
      if (!piece.whitespace) ++word_counts[std::string(piece.text)];
    }
  }
  if (vocab_size < alphabet.size()) {
    throw Error(ErrorCode::vocab_too_small,
                fmt::format("vocab_size {} is below the alphabet size {}", vocab_size, alphabet.size()));
  }

  std::vector<std::string> vocab(alphabet.begin(), alphabet.end());
  std::set<std::string> known(alphabet.begin(), alphabet.end());

  std::vector<std::pair<std::vector<std::string>, std::size_t>> words;
  words.reserve(word_counts.size());
  for (const auto& [w, count] : word_counts) {
    std::vector<std::string> symbols;
    for (const auto& [cp, _] : code_points(w)) symbols.emplace_back(cp);
    words.emplace_back(std::move(symbols), count);
  }

  std::vector<Pair> merges;
  while (vocab.size() < vocab_size) {
    std::map<Pair, std::size_t> pair_counts;
    for (const auto& [symbols, count] : words) {
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) pair_counts[{symbols[i], symbols[i + 1]}] += count;
    }
    // std::map iterates pairs in lexicographic order; strict '>' keeps the
    // smallest pair among equal counts.
    const Pair* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr || best_count < 2) break;
    Pair merge = *best;
    for (auto& [symbols, _] : words) apply_merge(symbols, merge);
    std::string joined = merge.first + merge.second;
    if (known.insert(joined).second) vocab.push_back(std::move(joined));
    merges.push_back(std::move(merge));
  }
  return SubwordModel(std::move(vocab), std::move(merges));
}

std::vector<Token> subword_encode(const SubwordModel& model, std::string_view text) {
  std::vector<Token> out;
  for (const auto& piece : pieces(text)) {
    // Split into runs of known code points; unknown code points become UNK.
    std::vector<std::pair<std::string_view, std::size_t>> run;
    auto flush = [&] {
      if (run.empty()) return;
      std::vector<std::string> symbols;
      for (const auto& [cp, _] : run) symbols.emplace_back(cp);
      for (const auto& merge : model.merges()) apply_merge(symbols, merge);
      std::size_t offset = piece.offset + run.front().second;
      for (auto& s : symbols) {
        const std::size_t len = s.size();
        out.push_back({std::move(s), TokenKind::plain, offset, offset + len});
        offset += len;
      }
      run.clear();
    };
    for (const auto& [cp, off] : code_points(piece.text)) {
      if (model.contains(cp)) {
        run.emplace_back(cp, off);
      } else {
        flush();
        const std::size_t start = piece.offset + off;
        out.push_back({std::string(SubwordModel::kUnk), TokenKind::unknown, start, start + cp.size()});
      }
    }
    flush();
  }
  return out;
}

}  // namespace geoctx
