#pragma once

#include <memory>

#include "dagsearch/config.hpp"
#include "dagsearch/reward.hpp"
#include "dagsearch/rollout.hpp"

namespace dagsearch {

/// Scorer wired from configuration: choice-set gold is always scored
/// locally; free-text gold goes to the judge endpoint when one is
/// configured, to the deterministic local heuristic in mock mode, and
/// otherwise raises Error(JudgeUnavailable).
std::unique_ptr<AnswerScorer> make_answer_scorer(const EngineConfig& config);

/// Scripted client when policy.script_path is set, HTTP client when
/// policy.base_url is set; otherwise Error(ConfigInvalid).
std::unique_ptr<PolicyClient> make_policy_client(const EngineConfig& config);

RolloutOptions make_rollout_options(const EngineConfig& config);

}  // namespace dagsearch
