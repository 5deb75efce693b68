#include "dagsearch/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

using nlohmann::json;

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value && *value ? std::string(value) : fallback;
}

}  // namespace

EngineConfig EngineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

EngineConfig EngineConfig::from_json_string(const std::string& text) {
  EngineConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    cfg.mock = j.value("mock", cfg.mock);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.max_nodes = j.value("max_nodes", cfg.max_nodes);
    cfg.passages_per_query = j.value("passages_per_query", cfg.passages_per_query);
    cfg.group_size = j.value("group_size", cfg.group_size);
    cfg.log_path = j.value("log_path", cfg.log_path);

    if (j.contains("reward_weights")) {
      const auto& w = j["reward_weights"];
      cfg.weights.format = w.value("format", cfg.weights.format);
      cfg.weights.dag = w.value("dag", cfg.weights.dag);
      cfg.weights.answer = w.value("answer", cfg.weights.answer);
    }
    if (j.contains("beta")) {
      const auto& b = j["beta"];
      cfg.beta.beta_start = b.value("start", cfg.beta.beta_start);
      cfg.beta.beta_end = b.value("end", cfg.beta.beta_end);
      cfg.beta.total_steps = b.value("total_steps", cfg.beta.total_steps);
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      cfg.search.timeout_seconds = s.value("timeout_seconds", cfg.search.timeout_seconds);
      cfg.search.retries = s.value("retries", cfg.search.retries);
      cfg.search.parallelism = s.value("parallelism", cfg.search.parallelism);
      cfg.search.snippet_max_chars = s.value("snippet_max_chars", cfg.search.snippet_max_chars);
      cfg.endpoints.arxiv_base = s.value("arxiv_base", cfg.endpoints.arxiv_base);
      cfg.endpoints.gnews_base = s.value("gnews_base", cfg.endpoints.gnews_base);
      cfg.endpoints.serper_base = s.value("serper_base", cfg.endpoints.serper_base);
      cfg.endpoints.gnews_api_key = s.value("gnews_api_key", cfg.endpoints.gnews_api_key);
      cfg.endpoints.serper_api_key = s.value("serper_api_key", cfg.endpoints.serper_api_key);
    }
    if (j.contains("policy")) {
      const auto& p = j["policy"];
      cfg.policy.base_url = p.value("base_url", cfg.policy.base_url);
      cfg.policy.api_key = p.value("api_key", cfg.policy.api_key);
      cfg.policy.model = p.value("model", cfg.policy.model);
      cfg.policy.script_path = p.value("script_path", cfg.policy.script_path);
      cfg.policy.temperature = p.value("temperature", cfg.policy.temperature);
      cfg.policy.max_tokens = p.value("max_tokens", cfg.policy.max_tokens);
    }
    if (j.contains("judge")) {
      const auto& q = j["judge"];
      cfg.judge.base_url = q.value("base_url", cfg.judge.base_url);
      cfg.judge.api_key = q.value("api_key", cfg.judge.api_key);
      cfg.judge.model = q.value("model", cfg.judge.model);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("config field has wrong type: ") + e.what());
  }
  return cfg;
}

void EngineConfig::apply_env_overrides() {
  endpoints.gnews_api_key = env_or("GNEWS_API_KEY", endpoints.gnews_api_key);
  endpoints.serper_api_key = env_or("SERPER_API_KEY", endpoints.serper_api_key);
  policy.base_url = env_or("LLM_API_BASE", policy.base_url);
  policy.api_key = env_or("LLM_API_KEY", policy.api_key);
  judge.base_url = env_or("JUDGE_API_BASE", judge.base_url);
  judge.api_key = env_or("JUDGE_API_KEY", judge.api_key);
}

void EngineConfig::validate() const {
  double sum = weights.format + weights.dag + weights.answer;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::ConfigInvalid, "reward weights must sum to 1");
  }
  if (passages_per_query < 1) throw Error(ErrorKind::ConfigInvalid, "passages_per_query must be >= 1");
  if (group_size < 1) throw Error(ErrorKind::ConfigInvalid, "group_size must be >= 1");
  if (search.parallelism < 1) throw Error(ErrorKind::ConfigInvalid, "parallelism must be >= 1");
  if (max_nodes < 1) throw Error(ErrorKind::ConfigInvalid, "max_nodes must be >= 1");
  if (beta.total_steps < 1 || beta.beta_end < 0 || beta.beta_start < beta.beta_end) {
    throw Error(ErrorKind::ConfigInvalid, "beta schedule requires start >= end >= 0, total >= 1");
  }
}

std::string EngineConfig::to_json_string() const {
  auto redact = [](const std::string& secret) {
    return secret.empty() ? std::string() : std::string("<redacted>");
  };
  json j = {
      {"mock", mock},
      {"seed", seed},
      {"max_nodes", max_nodes},
      {"passages_per_query", passages_per_query},
      {"group_size", group_size},
      {"reward_weights",
       {{"format", weights.format}, {"dag", weights.dag}, {"answer", weights.answer}}},
      {"beta",
       {{"start", beta.beta_start}, {"end", beta.beta_end}, {"total_steps", beta.total_steps}}},
      {"search",
       {{"timeout_seconds", search.timeout_seconds},
        {"retries", search.retries},
        {"parallelism", search.parallelism},
        {"snippet_max_chars", search.snippet_max_chars},
        {"arxiv_base", endpoints.arxiv_base},
        {"gnews_base", endpoints.gnews_base},
        {"serper_base", endpoints.serper_base},
        {"gnews_api_key", redact(endpoints.gnews_api_key)},
        {"serper_api_key", redact(endpoints.serper_api_key)}}},
      {"policy",
       {{"base_url", policy.base_url},
        {"api_key", redact(policy.api_key)},
        {"model", policy.model},
        {"script_path", policy.script_path},
        {"temperature", policy.temperature},
        {"max_tokens", policy.max_tokens}}},
      {"judge",
       {{"base_url", judge.base_url}, {"api_key", redact(judge.api_key)}, {"model", judge.model}}},
      {"log_path", log_path},
  };
  return j.dump(2);
}

std::string EngineConfig::hash() const {
  // Secrets are redacted to a presence marker, so the hash does not leak
  // them and does not change with their values.
  return fnv1a_hex(to_json_string());
}

BackendRegistry EngineConfig::make_registry() const {
  if (mock) return BackendRegistry::mock(search);
  return BackendRegistry::live(endpoints, search);
}

}  // namespace dagsearch
