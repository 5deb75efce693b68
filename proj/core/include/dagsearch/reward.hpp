#pragma once

#include <set>
#include <string>
#include <string_view>

#include "dagsearch/llm_client.hpp"
#include "dagsearch/plan.hpp"

namespace dagsearch {

/// Weights of the composite reward. Must sum to 1 (tolerance 1e-9).
/// Defaults balance structural compliance against answer quality.
struct RewardWeights {
  double format = 0.25;
  double dag = 0.25;
  double answer = 0.5;

  bool operator==(const RewardWeights&) const = default;
};

struct RewardBreakdown {
  int format = 0;        // {0,1}
  int dag = 0;           // {0,1}
  double answer = 0.0;   // [0,1]
  double composite = 0.0;

  bool operator==(const RewardBreakdown&) const = default;
};

enum class GoldKind { free_text, choice_set };

struct GoldAnswer {
  GoldKind kind = GoldKind::free_text;
  std::string text;                // free_text gold
  std::set<std::string> options;   // choice_set gold, nonempty

  static GoldAnswer freeform(std::string text);
  static GoldAnswer choices(std::set<std::string> options);

  bool operator==(const GoldAnswer&) const = default;
};

/// Format compliance: all four blocks exactly once, canonical order.
int score_format(std::string_view text);

/// Structural validity of a `<search>` body: 1 iff it parses and every
/// validation criterion holds; any parse failure scores 0.
int score_dag(std::string_view search_body, const std::set<ToolKind>& tools = all_tools(),
              std::size_t max_nodes = kDefaultMaxNodes);

/// Option-set F1 between predicted and gold labels, compared
/// case-insensitively after trimming. Empty prediction scores 0.
double score_answer_mcq(const std::set<std::string>& predicted, const std::set<std::string>& gold);

/// Predicted option labels from an answer body: standalone capitals A-F
/// after the last "answer is" when present, otherwise anywhere in the body.
std::set<std::string> extract_choice_labels(std::string_view answer_body);

/// The grading instruction sent to the judge; answer and gold are embedded.
std::string judge_rubric_prompt(std::string_view answer_body, std::string_view gold_text);

/// Continuous [0,1] similarity via the judge endpoint: sends the rubric,
/// parses the first real number in the reply, clamps to [0,1]. Two
/// unparsable replies raise Error(UnparsableVerdict); transport failures
/// raise Error(JudgeUnavailable). No score is ever invented.
double score_answer_judge(std::string_view answer_body, const GoldAnswer& gold, ChatClient& judge);

/// Weighted sum of the three components. Throws Error(WeightSumInvalid)
/// when the weights are out of range or do not sum to 1.
double composite_reward(int format_score, int dag_score, double answer_score,
                        const RewardWeights& weights);

/// Strategy for scoring the `<answer>` body against gold. Choice-set gold
/// is always scored locally (extraction + F1); implementations differ in
/// how free-text gold is handled.
class AnswerScorer {
 public:
  virtual ~AnswerScorer() = default;
  virtual double score(std::string_view answer_body, const GoldAnswer& gold) = 0;
};

/// Free-text gold goes to the judge endpoint.
class JudgeAnswerScorer final : public AnswerScorer {
 public:
  explicit JudgeAnswerScorer(ChatClient& judge) : judge_(judge) {}
  double score(std::string_view answer_body, const GoldAnswer& gold) override;

 private:
  ChatClient& judge_;
};

/// Deterministic offline scorer for mock mode: normalized equality scores
/// 1, otherwise token-overlap F1. Never used when a judge is configured.
class LocalAnswerScorer final : public AnswerScorer {
 public:
  double score(std::string_view answer_body, const GoldAnswer& gold) override;
};

}  // namespace dagsearch
