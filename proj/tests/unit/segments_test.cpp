#include <doctest.h>

#include <algorithm>
#include <array>

#include "dagsearch/errors.hpp"
#include "dagsearch/plan.hpp"
#include "dagsearch/segments.hpp"
#include "support/fixtures.hpp"

using namespace dagsearch;

namespace {

std::string well_formed(const std::string& r = "r", const std::string& g = "G",
                        const std::string& res = "R", const std::string& a = "a") {
  return "<think>" + r + "</think><search>" + g + "</search><result>" + res + "</result><answer>" +
         a + "</answer>";
}

ErrorKind segment_error_kind(const std::string& text) {
  try {
    segment_output(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a segmentation error for: " << text);
  return ErrorKind::MissingTag;
}

}  // namespace

TEST_CASE("segment_output: minimal four-block text") {
  std::string text = well_formed();
  Segments s = segment_output(text);
  REQUIRE(s.all_present());
  CHECK(span_body(text, *s.think) == "r");
  CHECK(span_body(text, *s.search) == "G");
  CHECK(span_body(text, *s.result) == "R");
  CHECK(span_body(text, *s.answer) == "a");
  CHECK(!s.stray_text);
}

TEST_CASE("segment_output: a full trajectory around the market plan") {
  std::string text = fixtures::market_phase1_completion() + "\n<result>Node A (news) Search results:\n\nResult 1:\n\nTitle: t</result>\n" +
                     fixtures::market_phase2_completion();
  Segments s = segment_output(text);
  REQUIRE(s.all_present());
  SearchPlan plan = parse_plan(std::string(span_body(text, *s.search)));
  CHECK(plan.nodes.size() == 3);
  CHECK(std::string(span_body(text, *s.result)).starts_with("Node A (news) Search results:"));
}

TEST_CASE("segment_output: absent blocks are fine, whitespace between blocks tolerated") {
  std::string text = "<think>r</think>\n  <search>G</search>\n";
  Segments s = segment_output(text);
  CHECK(s.think);
  CHECK(s.search);
  CHECK(!s.result);
  CHECK(!s.answer);
  CHECK(!s.stray_text);
}

TEST_CASE("segment_output: stray non-whitespace text is flagged but not fatal") {
  Segments s = segment_output("noise <think>r</think><search>G</search>");
  CHECK(s.stray_text);
  CHECK(check_format("<think>r</think>x<search>G</search><result>R</result><answer>a</answer>") == 1);
}

TEST_CASE("segment_output: error taxonomy") {
  CHECK(segment_error_kind("<search>G</search><think>r</think>") == ErrorKind::OutOfOrder);
  CHECK(segment_error_kind("<think>r<search>G</search></think>") == ErrorKind::OutOfOrder);
  CHECK(segment_error_kind("<think>r</think><think>x</think>") == ErrorKind::DuplicateTag);
  CHECK(segment_error_kind("<think>r") == ErrorKind::UnclosedTag);
  CHECK(segment_error_kind("r</think>") == ErrorKind::MissingTag);
  CHECK(segment_error_kind("</answer><answer>a") == ErrorKind::OutOfOrder);
}

TEST_CASE("check_format: canonical order scores 1, everything else 0") {
  CHECK(check_format(well_formed()) == 1);
  CHECK(check_format("<think>r</think><search>G</search><answer>a</answer>") == 0);
  CHECK(check_format(well_formed() + "<answer>again</answer>") == 0);
  CHECK(check_format("") == 0);
}

TEST_CASE("check_format: exhaustive permutations, deletions, duplications") {
  const std::array<std::string, 4> blocks = {
      "<think>r</think>", "<search>G</search>", "<result>R</result>", "<answer>a</answer>"};

  std::array<int, 4> order = {0, 1, 2, 3};
  int ones = 0;
  int cases = 0;
  do {
    std::string text;
    for (int i : order) text += blocks[static_cast<std::size_t>(i)];
    ++cases;
    ones += check_format(text);
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(cases == 24);
  CHECK(ones == 1);  // the canonical order only

  for (int skip = 0; skip < 4; ++skip) {
    std::string text;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) text += blocks[static_cast<std::size_t>(i)];
    }
    CHECK(check_format(text) == 0);
  }

  for (int dup = 0; dup < 4; ++dup) {
    std::string text;
    for (int i = 0; i < 4; ++i) {
      text += blocks[static_cast<std::size_t>(i)];
      if (i == dup) text += blocks[static_cast<std::size_t>(i)];
    }
    CHECK(check_format(text) == 0);
  }
}

TEST_CASE("check_format success implies segmentation succeeds with all spans") {
  std::string text = "  <think>r</think> <search>G</search>\n<result>R</result>\t<answer>a</answer> ";
  REQUIRE(check_format(text) == 1);
  Segments s = segment_output(text);
  CHECK(s.all_present());
  CHECK(s.think->end <= s.search->begin);
  CHECK(s.search->end <= s.result->begin);
  CHECK(s.result->end <= s.answer->begin);
}

TEST_CASE("inject_result: appends a result block ready for resumption") {
  std::string prefix = "<think>r</think><search>G</search>";
  std::string text = inject_result(prefix, "Node A (news) Search results: ...");
  Segments s = segment_output(text);
  REQUIRE(s.result);
  CHECK(span_body(text, *s.result) == "Node A (news) Search results: ...");
  CHECK(s.think);
  CHECK(s.search);
}

TEST_CASE("inject_result: trailing whitespace allowed, empty block allowed") {
  std::string text = inject_result("<think>r</think><search>G</search>\n", "");
  Segments s = segment_output(text);
  REQUIRE(s.result);
  CHECK(span_body(text, *s.result).empty());
}

TEST_CASE("inject_result: refuses prefixes not paused at </search>") {
  CHECK_THROWS_AS(inject_result("<answer>a</answer>", "x"), Error);
  try {
    inject_result("text without a pause", "x");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PrefixNotPaused);
  }
}
