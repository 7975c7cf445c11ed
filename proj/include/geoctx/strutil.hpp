#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geoctx::str {

std::string_view trim(std::string_view s);
/// ASCII case folding; bytes >= 0x80 pass through unchanged.
std::string fold(std::string_view s);
/// Casefold and collapse runs of whitespace to a single space, trimmed.
std::string normalize_name(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);
bool is_space(unsigned char c);
/// Letters, digits and any byte of a multi-byte UTF-8 sequence.
bool is_word_byte(unsigned char c);
/// Length of the UTF-8 sequence starting with `lead` (1 for invalid leads).
std::size_t utf8_len(unsigned char lead);
/// Lowercased alphanumeric words with a short English stopword list removed;
/// the term stream fed to feature hashing.
std::vector<std::string> embedding_terms(std::string_view text);
/// Parses a finite double covering the whole of `s`.
bool parse_double(std::string_view s, double& out);

}  // namespace geoctx::str
