#include "dagsearch/reward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dagsearch/errors.hpp"
#include "dagsearch/segments.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

constexpr double kWeightTolerance = 1e-9;

bool is_word_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

std::set<std::string> standalone_capitals(std::string_view body) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c < 'A' || c > 'F') continue;
    bool left_ok = i == 0 || !is_word_char(body[i - 1]);
    bool right_ok = i + 1 >= body.size() || !is_word_char(body[i + 1]);
    if (left_ok && right_ok) out.insert(std::string(1, c));
  }
  return out;
}

std::set<std::string> normalize_labels(const std::set<std::string>& labels) {
  std::set<std::string> out;
  for (const auto& label : labels) {
    std::string t = trim(label);
    for (char& c : t) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    if (!t.empty()) out.insert(t);
  }
  return out;
}

// First real number in the text, or nullopt.
std::optional<double> first_number(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool digit = c >= '0' && c <= '9';
    bool sign_start = (c == '-' || c == '+') && i + 1 < s.size() &&
                      (s[i + 1] >= '0' && s[i + 1] <= '9');
    bool dot_start = c == '.' && i + 1 < s.size() && (s[i + 1] >= '0' && s[i + 1] <= '9');
    if (!digit && !sign_start && !dot_start) continue;
    try {
      std::size_t used = 0;
      double value = std::stod(std::string(s.substr(i)), &used);
      if (used > 0) return value;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace

GoldAnswer GoldAnswer::freeform(std::string text) {
  GoldAnswer g;
  g.kind = GoldKind::free_text;
  g.text = std::move(text);
  return g;
}

GoldAnswer GoldAnswer::choices(std::set<std::string> options) {
  GoldAnswer g;
  g.kind = GoldKind::choice_set;
  g.options = std::move(options);
  return g;
}

int score_format(std::string_view text) { return check_format(text); }

int score_dag(std::string_view search_body, const std::set<ToolKind>& tools, std::size_t max_nodes) {
  try {
    SearchPlan plan = parse_plan(search_body);
    return validate_plan(plan, tools, max_nodes).reward_valid ? 1 : 0;
  } catch (const Error&) {
    return 0;
  }
}

double score_answer_mcq(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
  auto g = normalize_labels(gold);
  if (g.empty()) throw std::invalid_argument("gold option set must be nonempty");
  auto p = normalize_labels(predicted);
  if (p.empty()) return 0.0;

  std::size_t hits = 0;
  for (const auto& label : p) {
    if (g.contains(label)) ++hits;
  }
  if (hits == 0) return 0.0;
  double precision = static_cast<double>(hits) / static_cast<double>(p.size());
  double recall = static_cast<double>(hits) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::set<std::string> extract_choice_labels(std::string_view answer_body) {
  std::string lower = to_lower(answer_body);
  auto anchor = lower.rfind("answer is");
  std::string_view region = answer_body;
  if (anchor != std::string::npos) {
    region = answer_body.substr(anchor + std::string_view("answer is").size());
  }
  auto labels = standalone_capitals(region);
  if (labels.empty() && anchor != std::string::npos) {
    labels = standalone_capitals(answer_body);
  }
  return labels;
}

std::string judge_rubric_prompt(std::string_view answer_body, std::string_view gold_text) {
  std::string prompt;
  prompt += "You are grading how well a candidate answer matches a reference answer.\n";
  prompt += "Judge semantic alignment only; wording differences do not matter.\n\n";
  prompt += "Reference answer:\n";
  prompt += gold_text;
  prompt += "\n\nCandidate answer:\n";
  prompt += answer_body;
  prompt += "\n\nReply with a single number between 0 and 1, where 1 means the candidate "
            "conveys the same answer as the reference and 0 means it is entirely wrong. "
            "Reply with the number only.";
  return prompt;
}

double score_answer_judge(std::string_view answer_body, const GoldAnswer& gold, ChatClient& judge) {
  if (gold.kind != GoldKind::free_text) {
    throw std::invalid_argument("judge scoring applies to free-text gold");
  }
  std::string prompt = judge_rubric_prompt(answer_body, gold.text);
  ChatOptions options;
  options.temperature = 0.0;
  options.max_tokens = 16;

  for (int attempt = 0; attempt < 2; ++attempt) {
    ChatResult reply;
    try {
      reply = judge.complete(prompt, options);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnparsableVerdict) throw;
      throw Error(ErrorKind::JudgeUnavailable, std::string("judge call failed: ") + e.what());
    }
    if (auto value = first_number(reply.content)) {
      return std::clamp(*value, 0.0, 1.0);
    }
  }
  throw Error(ErrorKind::UnparsableVerdict, "judge reply carried no number");
}

double composite_reward(int format_score, int dag_score, double answer_score,
                        const RewardWeights& weights) {
  double sum = weights.format + weights.dag + weights.answer;
  bool in_range = weights.format >= 0.0 && weights.format <= 1.0 && weights.dag >= 0.0 &&
                  weights.dag <= 1.0 && weights.answer >= 0.0 && weights.answer <= 1.0;
  if (!in_range || std::abs(sum - 1.0) > kWeightTolerance) {
    throw Error(ErrorKind::WeightSumInvalid, "reward weights must lie in [0,1] and sum to 1");
  }
  return weights.format * format_score + weights.dag * dag_score + weights.answer * answer_score;
}

double JudgeAnswerScorer::score(std::string_view answer_body, const GoldAnswer& gold) {
  if (gold.kind == GoldKind::choice_set) {
    return score_answer_mcq(extract_choice_labels(answer_body), gold.options);
  }
  return score_answer_judge(answer_body, gold, judge_);
}

double LocalAnswerScorer::score(std::string_view answer_body, const GoldAnswer& gold) {
  if (gold.kind == GoldKind::choice_set) {
    return score_answer_mcq(extract_choice_labels(answer_body), gold.options);
  }
  std::string a = to_lower(collapse_whitespace(answer_body));
  std::string g = to_lower(collapse_whitespace(gold.text));
  if (a == g) return 1.0;

  // Token-overlap F1, multiset-free: a crude but deterministic stand-in
  // used only when no judge endpoint is available.
  auto tokens = [](const std::string& s) {
    std::set<std::string> t;
    for (auto& tok : split(s, ' ')) {
      if (!tok.empty()) t.insert(tok);
    }
    return t;
  };
  auto ta = tokens(a);
  auto tg = tokens(g);
  if (ta.empty() || tg.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : ta) {
    if (tg.contains(t)) ++hits;
  }
  if (hits == 0) return 0.0;
  double precision = static_cast<double>(hits) / static_cast<double>(ta.size());
  double recall = static_cast<double>(hits) / static_cast<double>(tg.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace dagsearch
