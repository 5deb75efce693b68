#pragma once

#include <string>

#include "dagsearch/backends.hpp"
#include "dagsearch/grpo.hpp"
#include "dagsearch/reward.hpp"

namespace dagsearch {

struct PolicyEndpointConfig {
  std::string base_url;     // env LLM_API_BASE
  std::string api_key;      // env LLM_API_KEY
  std::string model;
  std::string script_path;  // scripted completions fixture; used instead of HTTP when set
  double temperature = 0.7;
  int max_tokens = 2048;
};

struct JudgeEndpointConfig {
  std::string base_url;  // env JUDGE_API_BASE
  std::string api_key;   // env JUDGE_API_KEY
  std::string model;
};

/// Whole-engine configuration: one declarative JSON document with nested
/// sections. Env vars override the endpoint/secret values only.
struct EngineConfig {
  bool mock = true;  // mock backends + local scoring, no network
  unsigned seed = 0;
  std::size_t max_nodes = kDefaultMaxNodes;
  int passages_per_query = 2;
  int group_size = 4;
  RewardWeights weights;
  BetaSchedule beta{0.1, 0.01, 1000};
  SearchSettings search;
  SearchEndpoints endpoints;
  PolicyEndpointConfig policy;
  JudgeEndpointConfig judge;
  std::string log_path;

  static EngineConfig from_file(const std::string& path);
  static EngineConfig from_json_string(const std::string& text);

  /// GNEWS_API_KEY, SERPER_API_KEY, LLM_API_BASE, LLM_API_KEY,
  /// JUDGE_API_BASE, JUDGE_API_KEY.
  void apply_env_overrides();

  /// Throws Error(ConfigInvalid) on out-of-range values.
  void validate() const;

  /// JSON rendering with every secret redacted. Safe to log.
  std::string to_json_string() const;

  /// Stable hash of the redacted rendering; identical whether or not
  /// secrets are present.
  std::string hash() const;

  BackendRegistry make_registry() const;
};

}  // namespace dagsearch
