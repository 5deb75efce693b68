#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dagsearch/exec.hpp"
#include "dagsearch/llm_client.hpp"
#include "dagsearch/plan.hpp"
#include "dagsearch/reward.hpp"
#include "dagsearch/segments.hpp"

namespace dagsearch {

/// Policy endpoint driven in two phases: phase 1 stops at `</search>`,
/// phase 2 at `</answer>`. Replies include the matched stop sequence.
class PolicyClient {
 public:
  struct Request {
    std::string prompt;  // full generation context
    std::string query;   // the user query (scripted clients key on this)
    int phase = 1;       // 1 or 2
    std::vector<std::string> stop;
    int max_tokens = 2048;
    double temperature = 0.7;
  };
  struct Reply {
    std::string text;
    bool stopped = false;
    bool truncated = false;
    int prompt_tokens = 0;
    int completion_tokens = 0;
  };

  virtual ~PolicyClient() = default;
  virtual Reply generate(const Request& request) = 0;
};

/// Speaks to a chat-completions endpoint; appends the phase's stop
/// sequence when the server reports a stop-terminated generation.
class HttpPolicyClient final : public PolicyClient {
 public:
  HttpPolicyClient(std::string base_url, std::string api_key, std::string model,
                   double timeout_seconds = 120.0);
  Reply generate(const Request& request) override;

 private:
  HttpChatClient client_;
  std::string model_;
};

/// Replays canned completions from a fixture keyed by (query, phase).
/// Fixture format: {"completions": [{"query": "...", "phase": 1, "text": "..."}]}.
class ScriptedPolicyClient final : public PolicyClient {
 public:
  static ScriptedPolicyClient from_file(const std::string& path);
  static ScriptedPolicyClient from_json_string(const std::string& json_text);

  void add(const std::string& query, int phase, std::string text);
  Reply generate(const Request& request) override;

 private:
  std::map<std::pair<std::string, int>, std::string> completions_;
};

struct PhaseUsage {
  double seconds = 0.0;
  int prompt_tokens = 0;
  int completion_tokens = 0;

  bool operator==(const PhaseUsage&) const = default;
};

/// One fully scored trajectory.
struct RolloutRecord {
  std::string query;
  GoldAnswer gold;
  std::string output_text;  // model-side text: both phases plus the injected block
  Segments segments;
  std::optional<SearchPlan> plan;
  std::optional<std::string> plan_error;  // parse failure reason when plan is absent
  std::optional<ValidationReport> validation;
  std::optional<ExecutionTrace> trace;
  RewardBreakdown reward;
  bool generation_limit_hit = false;
  PhaseUsage phase1;
  PhaseUsage phase2;

  bool operator==(const RolloutRecord&) const = default;
};

struct GroupRecord {
  std::string query;
  std::vector<RolloutRecord> rollouts;
  std::vector<double> advantages;
};

struct RolloutOptions {
  RewardWeights weights;
  std::set<ToolKind> tools = all_tools();
  std::size_t max_nodes = kDefaultMaxNodes;
  int passages_per_query = 2;
  int max_tokens_per_phase = 2048;
  double temperature = 0.7;
};

/// Injected in place of search results when the plan cannot be executed,
/// so phase 2 always runs on a complete context.
inline constexpr std::string_view kInvalidPlanNotice = "[plan invalid]";

/// Drives the pause/resume generation protocol and scores the outcome.
class RolloutDriver {
 public:
  RolloutDriver(PolicyClient& policy, AnswerScorer& scorer, const BackendRegistry& registry,
                RolloutOptions options);

  /// Runs one trajectory: generate to `</search>`, parse/validate/execute
  /// the plan, inject the result block, resume to `</answer>`, score.
  /// Intermediate failures lower component scores; they never abort.
  /// Throws Error(PolicyUnreachable) only when the endpoint cannot be
  /// reached at all.
  RolloutRecord run_rollout(const std::string& query, const GoldAnswer& gold);

  /// M independent rollouts sharing the query, run concurrently, plus
  /// group-relative advantages. Throws only when every rollout fails.
  GroupRecord run_group(const std::string& query, const GoldAnswer& gold, int group_size);

  /// Phase-1 generation context for a query.
  static std::string build_prompt(const std::string& query, const std::set<ToolKind>& tools);

 private:
  PolicyClient& policy_;
  AnswerScorer& scorer_;
  const BackendRegistry& registry_;
  RolloutOptions options_;
};

}  // namespace dagsearch
