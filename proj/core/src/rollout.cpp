#include "dagsearch/rollout.hpp"

#include <chrono>
#include <fstream>
#include <future>

#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/grpo.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int estimate_tokens(std::string_view text) { return static_cast<int>(count_tokens(text)); }

}  // namespace

HttpPolicyClient::HttpPolicyClient(std::string base_url, std::string api_key, std::string model,
                                   double timeout_seconds)
    : client_(std::move(base_url), std::move(api_key), timeout_seconds), model_(std::move(model)) {}

PolicyClient::Reply HttpPolicyClient::generate(const Request& request) {
  ChatOptions options;
  options.model = model_;
  options.temperature = request.temperature;
  options.max_tokens = request.max_tokens;
  options.stop = request.stop;

  ChatResult result = client_.complete(request.prompt, options);

  Reply reply;
  reply.text = result.content;
  reply.stopped = result.stopped;
  reply.truncated = result.truncated;
  reply.prompt_tokens = result.prompt_tokens;
  reply.completion_tokens = result.completion_tokens;
  // Chat endpoints strip the matched stop sequence; the protocol needs it.
  if (result.stopped && !request.stop.empty() && !reply.text.ends_with(request.stop.front())) {
    reply.text += request.stop.front();
  }
  return reply;
}

ScriptedPolicyClient ScriptedPolicyClient::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoFailure, "cannot open policy script: " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

ScriptedPolicyClient ScriptedPolicyClient::from_json_string(const std::string& json_text) {
  ScriptedPolicyClient client;
  try {
    auto j = nlohmann::json::parse(json_text);
    for (const auto& entry : j.at("completions")) {
      client.add(entry.at("query").get<std::string>(), entry.at("phase").get<int>(),
                 entry.at("text").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed policy script: ") + e.what());
  }
  return client;
}

void ScriptedPolicyClient::add(const std::string& query, int phase, std::string text) {
  completions_[{query, phase}] = std::move(text);
}

PolicyClient::Reply ScriptedPolicyClient::generate(const Request& request) {
  auto it = completions_.find({request.query, request.phase});
  if (it == completions_.end()) {
    throw Error(ErrorKind::PolicyUnreachable,
                "no scripted completion for query '" + request.query + "' phase " +
                    std::to_string(request.phase));
  }
  Reply reply;
  reply.text = it->second;
  reply.stopped = true;
  reply.prompt_tokens = estimate_tokens(request.prompt);
  reply.completion_tokens = estimate_tokens(it->second);
  return reply;
}

RolloutDriver::RolloutDriver(PolicyClient& policy, AnswerScorer& scorer,
                             const BackendRegistry& registry, RolloutOptions options)
    : policy_(policy), scorer_(scorer), registry_(registry), options_(std::move(options)) {}

std::string RolloutDriver::build_prompt(const std::string& query, const std::set<ToolKind>& tools) {
  std::string tool_list;
  for (ToolKind tool : tools) {
    if (!tool_list.empty()) tool_list += ", ";
    tool_list += tool_display_label(tool);
  }
  std::string prompt;
  prompt += "Answer the question by searching external sources.\n";
  prompt += "Write your reasoning inside <think>...</think>, then a search plan inside "
            "<search>...</search> as lines of the form `ID: sub-query (Tool)` with an optional "
            "`Edges: A -> B; ...` dependency line. Available tools: " + tool_list + ".\n";
  prompt += "Search results will be provided inside <result>...</result>; then give the final "
            "answer inside <answer>...</answer>.\n\nQuestion: " + query + "\n";
  return prompt;
}

RolloutRecord RolloutDriver::run_rollout(const std::string& query, const GoldAnswer& gold) {
  RolloutRecord record;
  record.query = query;
  record.gold = gold;

  const std::string prompt = build_prompt(query, options_.tools);

  PolicyClient::Request phase1;
  phase1.prompt = prompt;
  phase1.query = query;
  phase1.phase = 1;
  phase1.stop = {std::string(kSearchClose)};
  phase1.max_tokens = options_.max_tokens_per_phase;
  phase1.temperature = options_.temperature;

  auto t1 = Clock::now();
  PolicyClient::Reply reply1 = policy_.generate(phase1);
  record.phase1 = {seconds_since(t1), reply1.prompt_tokens, reply1.completion_tokens};
  record.generation_limit_hit = reply1.truncated;

  std::string phase1_text = reply1.text;
  bool has_answer = phase1_text.find(kAnswerClose) != std::string::npos;
  bool paused_at_search = !has_answer && trim(phase1_text).ends_with(kSearchClose);

  if (paused_at_search) {
    // Parse and execute the plan; any failure turns into an explicit
    // notice so phase 2 still sees a complete context.
    std::string result_block{kInvalidPlanNotice};
    try {
      Segments partial = segment_output(phase1_text);
      std::string search_body =
          partial.search ? std::string(span_body(phase1_text, *partial.search)) : std::string();
      SearchPlan plan = parse_plan(search_body);
      record.plan = plan;
      record.validation = validate_plan(plan, options_.tools, options_.max_nodes);
      if (record.validation->acyclic) {
        record.trace = execute_plan(plan, *record.validation, registry_, options_.passages_per_query);
        result_block = record.trace->result_block;
      }
    } catch (const Error& e) {
      record.plan_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }

    std::string phase2_context = inject_result(phase1_text, result_block);

    PolicyClient::Request phase2;
    phase2.prompt = prompt + phase2_context;
    phase2.query = query;
    phase2.phase = 2;
    phase2.stop = {std::string(kAnswerClose)};
    phase2.max_tokens = options_.max_tokens_per_phase;
    phase2.temperature = options_.temperature;

    auto t2 = Clock::now();
    PolicyClient::Reply reply2 = policy_.generate(phase2);
    record.phase2 = {seconds_since(t2), reply2.prompt_tokens, reply2.completion_tokens};
    record.generation_limit_hit = record.generation_limit_hit || reply2.truncated;

    record.output_text = phase2_context + reply2.text;
  } else {
    record.output_text = phase1_text;
  }

  // Scoring: failures become zeros, never faults.
  record.reward.format = check_format(record.output_text);
  try {
    record.segments = segment_output(record.output_text);
  } catch (const Error&) {
    record.segments = Segments{};
  }
  std::string search_body =
      record.segments.search ? std::string(span_body(record.output_text, *record.segments.search))
                             : std::string();
  record.reward.dag = score_dag(search_body, options_.tools, options_.max_nodes);
  std::string answer_body =
      record.segments.answer ? std::string(span_body(record.output_text, *record.segments.answer))
                             : std::string();
  record.reward.answer = record.segments.answer ? scorer_.score(answer_body, gold) : 0.0;
  record.reward.composite = composite_reward(record.reward.format, record.reward.dag,
                                             record.reward.answer, options_.weights);
  return record;
}

GroupRecord RolloutDriver::run_group(const std::string& query, const GoldAnswer& gold,
                                     int group_size) {
  if (group_size < 1) throw std::invalid_argument("group size must be >= 1");

  std::vector<std::future<RolloutRecord>> futures;
  futures.reserve(static_cast<std::size_t>(group_size));
  for (int i = 0; i < group_size; ++i) {
    futures.push_back(
        std::async(std::launch::async, [this, &query, &gold] { return run_rollout(query, gold); }));
  }

  GroupRecord group;
  group.query = query;
  std::optional<Error> last_error;
  for (auto& f : futures) {
    try {
      group.rollouts.push_back(f.get());
    } catch (const Error& e) {
      last_error = e;
    }
  }
  if (group.rollouts.empty()) {
    throw last_error.value_or(
        Error(ErrorKind::PolicyUnreachable, "every rollout in the group failed"));
  }

  std::vector<double> rewards;
  rewards.reserve(group.rollouts.size());
  for (const auto& r : group.rollouts) rewards.push_back(r.reward.composite);
  group.advantages = group_advantages(rewards);
  return group;
}

}  // namespace dagsearch
