#include "dagsearch/segments.hpp"

#include <array>

#include "dagsearch/errors.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

struct TagSpec {
  std::string_view name;
  std::string_view open;
  std::string_view close;
};

constexpr std::array<TagSpec, 4> kTags = {{
    {"think", kThinkOpen, kThinkClose},
    {"search", kSearchOpen, kSearchClose},
    {"result", kResultOpen, kResultClose},
    {"answer", kAnswerOpen, kAnswerClose},
}};

// Position of the single occurrence of `token`, npos when absent.
// Throws DuplicateTag when it occurs more than once.
std::size_t find_once(std::string_view text, std::string_view token, std::string_view tag_name) {
  auto first = text.find(token);
  if (first == std::string_view::npos) return first;
  if (text.find(token, first + token.size()) != std::string_view::npos) {
    throw Error(ErrorKind::DuplicateTag, std::string(tag_name) + " appears more than once");
  }
  return first;
}

bool all_whitespace(std::string_view s) {
  for (char c : s) {
    if (!is_space(c)) return false;
  }
  return true;
}

}  // namespace

Segments segment_output(std::string_view text) {
  struct Block {
    std::size_t outer_begin;  // offset of the open tag
    std::size_t outer_end;    // one past the close tag
    Span body;
    int tag_index;
  };
  std::array<std::optional<Block>, 4> blocks;

  for (int i = 0; i < 4; ++i) {
    const TagSpec& tag = kTags[static_cast<std::size_t>(i)];
    auto open = find_once(text, tag.open, tag.name);
    auto close = find_once(text, tag.close, tag.name);
    if (open == std::string_view::npos && close == std::string_view::npos) continue;
    if (open == std::string_view::npos) {
      throw Error(ErrorKind::MissingTag, std::string(tag.close) + " without " + std::string(tag.open));
    }
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::UnclosedTag, std::string(tag.open) + " is never closed");
    }
    if (close < open) {
      throw Error(ErrorKind::OutOfOrder, std::string(tag.close) + " precedes " + std::string(tag.open));
    }
    blocks[static_cast<std::size_t>(i)] =
        Block{open, close + tag.close.size(), Span{open + tag.open.size(), close}, i};
  }

  // Present blocks must be disjoint and in canonical order.
  std::size_t cursor = 0;
  int previous = -1;
  for (int i = 0; i < 4; ++i) {
    const auto& block = blocks[static_cast<std::size_t>(i)];
    if (!block) continue;
    if (block->outer_begin < cursor) {
      throw Error(ErrorKind::OutOfOrder,
                  std::string(kTags[static_cast<std::size_t>(i)].name) + " block out of order" +
                      (previous >= 0 ? " with " + std::string(kTags[static_cast<std::size_t>(previous)].name)
                                     : std::string()));
    }
    cursor = block->outer_end;
    previous = i;
  }

  Segments out;
  out.think = blocks[0] ? std::optional(blocks[0]->body) : std::nullopt;
  out.search = blocks[1] ? std::optional(blocks[1]->body) : std::nullopt;
  out.result = blocks[2] ? std::optional(blocks[2]->body) : std::nullopt;
  out.answer = blocks[3] ? std::optional(blocks[3]->body) : std::nullopt;

  std::size_t scan = 0;
  for (const auto& block : blocks) {
    if (!block) continue;
    if (!all_whitespace(text.substr(scan, block->outer_begin - scan))) out.stray_text = true;
    scan = block->outer_end;
  }
  if (!all_whitespace(text.substr(scan))) out.stray_text = true;

  return out;
}

int check_format(std::string_view text) {
  try {
    return segment_output(text).all_present() ? 1 : 0;
  } catch (const Error&) {
    return 0;
  }
}

std::string inject_result(std::string_view prefix, std::string_view result_block) {
  std::size_t end = prefix.size();
  while (end > 0 && is_space(prefix[end - 1])) --end;
  std::string_view trimmed = prefix.substr(0, end);
  if (!trimmed.ends_with(kSearchClose)) {
    throw Error(ErrorKind::PrefixNotPaused, "prefix does not end at </search>");
  }
  std::string out;
  out.reserve(prefix.size() + result_block.size() + kResultOpen.size() + kResultClose.size() + 2);
  out += prefix;
  out += '\n';
  out += kResultOpen;
  out += result_block;
  out += kResultClose;
  out += '\n';
  return out;
}

}  // namespace dagsearch
