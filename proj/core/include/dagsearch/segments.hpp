#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace dagsearch {

// Tag literals of the structured output template, matched byte-for-byte.
inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kSearchOpen = "<search>";
inline constexpr std::string_view kSearchClose = "</search>";
inline constexpr std::string_view kResultOpen = "<result>";
inline constexpr std::string_view kResultClose = "</result>";
inline constexpr std::string_view kAnswerOpen = "<answer>";
inline constexpr std::string_view kAnswerClose = "</answer>";

/// Half-open character range [begin, end) into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  std::size_t size() const { return end - begin; }
};

/// Body spans of the four tagged components. A span covers the content
/// between the open and close tag, not the tags themselves. result/answer
/// are absent before injection/completion; think/search may be absent in
/// degenerate outputs.
struct Segments {
  std::optional<Span> think;
  std::optional<Span> search;
  std::optional<Span> result;
  std::optional<Span> answer;
  /// Non-whitespace text found outside all blocks. Does not affect
  /// format compliance; surfaced so callers can warn.
  bool stray_text = false;

  bool operator==(const Segments&) const = default;
  bool all_present() const { return think && search && result && answer; }
};

inline std::string_view span_body(std::string_view text, const Span& span) {
  return text.substr(span.begin, span.end - span.begin);
}

/// Splits a structured output into its tagged components.
///
/// Absent tag pairs are fine (their span stays empty). Structural
/// violations throw Error: DuplicateTag on a repeated open or close,
/// UnclosedTag on an open without a close, MissingTag on a close without
/// an open, OutOfOrder when present blocks are not in the canonical
/// think < search < result < answer order (overlap and nesting included).
Segments segment_output(std::string_view text);

/// 1 iff the text carries all four blocks exactly once in canonical order;
/// 0 otherwise. Never throws.
int check_format(std::string_view text);

/// Continues a generation paused at `</search>`: returns
/// prefix + "\n<result>" + result_block + "</result>\n".
/// Throws Error(PrefixNotPaused) unless the prefix ends with `</search>`
/// (trailing whitespace allowed).
std::string inject_result(std::string_view prefix, std::string_view result_block);

}  // namespace dagsearch
