#include "dagsearch/wiring.hpp"

#include "dagsearch/errors.hpp"

namespace dagsearch {

namespace {

class ConfiguredAnswerScorer final : public AnswerScorer {
 public:
  ConfiguredAnswerScorer(std::unique_ptr<ChatClient> judge, bool local_fallback)
      : judge_(std::move(judge)), local_fallback_(local_fallback) {}

  double score(std::string_view answer_body, const GoldAnswer& gold) override {
    if (gold.kind == GoldKind::choice_set) {
      return score_answer_mcq(extract_choice_labels(answer_body), gold.options);
    }
    if (judge_) return score_answer_judge(answer_body, gold, *judge_);
    if (local_fallback_) return local_.score(answer_body, gold);
    throw Error(ErrorKind::JudgeUnavailable, "no judge endpoint configured for free-text gold");
  }

 private:
  std::unique_ptr<ChatClient> judge_;
  bool local_fallback_;
  LocalAnswerScorer local_;
};

}  // namespace

std::unique_ptr<AnswerScorer> make_answer_scorer(const EngineConfig& config) {
  std::unique_ptr<ChatClient> judge;
  if (!config.judge.base_url.empty()) {
    judge = std::make_unique<HttpChatClient>(config.judge.base_url, config.judge.api_key);
  }
  return std::make_unique<ConfiguredAnswerScorer>(std::move(judge), config.mock);
}

std::unique_ptr<PolicyClient> make_policy_client(const EngineConfig& config) {
  if (!config.policy.script_path.empty()) {
    return std::make_unique<ScriptedPolicyClient>(
        ScriptedPolicyClient::from_file(config.policy.script_path));
  }
  if (!config.policy.base_url.empty()) {
    return std::make_unique<HttpPolicyClient>(config.policy.base_url, config.policy.api_key,
                                              config.policy.model);
  }
  throw Error(ErrorKind::ConfigInvalid,
              "no policy endpoint: set policy.script_path or policy.base_url (LLM_API_BASE)");
}

RolloutOptions make_rollout_options(const EngineConfig& config) {
  RolloutOptions options;
  options.weights = config.weights;
  options.max_nodes = config.max_nodes;
  options.passages_per_query = config.passages_per_query;
  options.max_tokens_per_phase = config.policy.max_tokens;
  options.temperature = config.policy.temperature;
  return options;
}

}  // namespace dagsearch
