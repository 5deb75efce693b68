#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dagsearch {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

/// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Number of whitespace-separated tokens.
std::size_t count_tokens(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// FNV-1a, used wherever a hash must be stable across platforms and runs
/// (mock passages, config hashes, dedup keys).
std::uint64_t fnv1a(std::string_view s);

std::string fnv1a_hex(std::string_view s);

}  // namespace dagsearch
