#include "dagsearch/json_io.hpp"

#include <json.hpp>

#include "dagsearch/errors.hpp"

namespace dagsearch {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string(what) + ": " + e.what());
  }
}

template <typename Fn>
auto decode(const std::string& text, const char* what, Fn fn) {
  json j = parse_or_throw(text, what);
  try {
    return fn(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string(what) + ": " + e.what());
  }
}

json plan_json(const SearchPlan& plan) {
  json nodes = json::array();
  for (const auto& n : plan.nodes) {
    nodes.push_back({{"id", n.id},
                     {"query", n.query},
                     {"tool", n.tool ? std::string(tool_name(*n.tool)) : n.tool_label}});
  }
  json edges = json::array();
  for (const auto& e : plan.edges) edges.push_back({{"from", e.from}, {"to", e.to}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

SearchPlan plan_from(const json& j) {
  SearchPlan plan;
  for (const auto& n : j.at("nodes")) {
    PlanNode node;
    node.id = n.at("id").get<std::string>();
    node.query = n.at("query").get<std::string>();
    node.tool_label = n.at("tool").get<std::string>();
    node.tool = parse_tool_label(node.tool_label);
    plan.nodes.push_back(std::move(node));
  }
  for (const auto& e : j.at("edges")) {
    plan.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>()});
  }
  return plan;
}

json report_json(const ValidationReport& r) {
  return {{"acyclic", r.acyclic},
          {"node_format_ok", r.node_format_ok},
          {"tools_ok", r.tools_ok},
          {"node_count_ok", r.node_count_ok},
          {"edge_refs_ok", r.edge_refs_ok},
          {"excluded_nodes", r.excluded_nodes},
          {"reward_valid", r.reward_valid}};
}

ValidationReport report_from(const json& j) {
  ValidationReport r;
  r.acyclic = j.at("acyclic").get<bool>();
  r.node_format_ok = j.at("node_format_ok").get<bool>();
  r.tools_ok = j.at("tools_ok").get<bool>();
  r.node_count_ok = j.at("node_count_ok").get<bool>();
  r.edge_refs_ok = j.at("edge_refs_ok").get<bool>();
  r.excluded_nodes = j.at("excluded_nodes").get<std::vector<std::string>>();
  r.reward_valid = j.at("reward_valid").get<bool>();
  return r;
}

json passage_json(const Passage& p) {
  return {{"title", p.title},
          {"snippet", p.snippet},
          {"url", p.url},
          {"tool", std::string(tool_name(p.source_tool))},
          {"rank", p.rank}};
}

Passage passage_from(const json& j) {
  Passage p;
  p.title = j.at("title").get<std::string>();
  p.snippet = j.at("snippet").get<std::string>();
  p.url = j.at("url").get<std::string>();
  p.source_tool = parse_tool_label(j.at("tool").get<std::string>()).value_or(ToolKind::web);
  p.rank = j.at("rank").get<int>();
  return p;
}

json node_result_json(const NodeResult& r) {
  json passages = json::array();
  for (const auto& p : r.passages) passages.push_back(passage_json(p));
  json j = {{"node_id", r.node_id},
            {"tool", r.tool_label},
            {"query", r.query},
            {"status", std::string(node_status_name(r.status))},
            {"passages", std::move(passages)}};
  if (r.status == NodeStatus::failed) j["reason"] = r.failure_reason;
  return j;
}

NodeResult node_result_from(const json& j) {
  NodeResult r;
  r.node_id = j.at("node_id").get<std::string>();
  r.tool_label = j.at("tool").get<std::string>();
  r.query = j.at("query").get<std::string>();
  std::string status = j.at("status").get<std::string>();
  if (status == "ok") {
    r.status = NodeStatus::ok;
  } else if (status == "empty") {
    r.status = NodeStatus::empty;
  } else if (status == "failed") {
    r.status = NodeStatus::failed;
  } else if (status == "excluded") {
    r.status = NodeStatus::excluded;
  } else {
    throw Error(ErrorKind::MalformedRecord, "unknown node status '" + status + "'");
  }
  for (const auto& p : j.at("passages")) r.passages.push_back(passage_from(p));
  r.failure_reason = j.value("reason", "");
  return r;
}

json trace_json(const ExecutionTrace& t) {
  json results = json::array();
  for (const auto& r : t.node_results) results.push_back(node_result_json(r));
  return {{"levels", t.levels},
          {"node_results", std::move(results)},
          {"wall_time_seconds", t.wall_time_seconds},
          {"result_block", t.result_block}};
}

ExecutionTrace trace_from(const json& j) {
  ExecutionTrace t;
  t.levels = j.at("levels").get<std::vector<std::vector<std::string>>>();
  for (const auto& r : j.at("node_results")) t.node_results.push_back(node_result_from(r));
  t.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  t.result_block = j.at("result_block").get<std::string>();
  return t;
}

json span_json(const std::optional<Span>& span) {
  if (!span) return nullptr;
  return {{"begin", span->begin}, {"end", span->end}};
}

std::optional<Span> span_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Span{j.at("begin").get<std::size_t>(), j.at("end").get<std::size_t>()};
}

json segments_json(const Segments& s) {
  return {{"think", span_json(s.think)},
          {"search", span_json(s.search)},
          {"result", span_json(s.result)},
          {"answer", span_json(s.answer)},
          {"stray_text", s.stray_text}};
}

Segments segments_from(const json& j) {
  Segments s;
  s.think = span_from(j.at("think"));
  s.search = span_from(j.at("search"));
  s.result = span_from(j.at("result"));
  s.answer = span_from(j.at("answer"));
  s.stray_text = j.at("stray_text").get<bool>();
  return s;
}

json reward_json(const RewardBreakdown& r) {
  return {{"format", r.format}, {"dag", r.dag}, {"answer", r.answer}, {"composite", r.composite}};
}

RewardBreakdown reward_from(const json& j) {
  RewardBreakdown r;
  r.format = j.at("format").get<int>();
  r.dag = j.at("dag").get<int>();
  r.answer = j.at("answer").get<double>();
  r.composite = j.at("composite").get<double>();
  return r;
}

json gold_json(const GoldAnswer& g) {
  if (g.kind == GoldKind::free_text) {
    return {{"kind", "free_text"}, {"text", g.text}};
  }
  return {{"kind", "choice_set"}, {"options", g.options}};
}

GoldAnswer gold_from(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "free_text") return GoldAnswer::freeform(j.at("text").get<std::string>());
  if (kind == "choice_set") {
    auto options = j.at("options").get<std::set<std::string>>();
    return GoldAnswer::choices(std::move(options));
  }
  throw Error(ErrorKind::MalformedRecord, "unknown gold kind '" + kind + "'");
}

json usage_json(const PhaseUsage& u) {
  return {{"seconds", u.seconds},
          {"prompt_tokens", u.prompt_tokens},
          {"completion_tokens", u.completion_tokens}};
}

PhaseUsage usage_from(const json& j) {
  PhaseUsage u;
  u.seconds = j.at("seconds").get<double>();
  u.prompt_tokens = j.at("prompt_tokens").get<int>();
  u.completion_tokens = j.at("completion_tokens").get<int>();
  return u;
}

json rollout_json(const RolloutRecord& r) {
  json j = {{"query", r.query},
            {"gold", gold_json(r.gold)},
            {"output_text", r.output_text},
            {"segments", segments_json(r.segments)},
            {"plan", r.plan ? plan_json(*r.plan) : json(nullptr)},
            {"plan_error", r.plan_error ? json(*r.plan_error) : json(nullptr)},
            {"validation", r.validation ? report_json(*r.validation) : json(nullptr)},
            {"trace", r.trace ? trace_json(*r.trace) : json(nullptr)},
            {"reward", reward_json(r.reward)},
            {"generation_limit_hit", r.generation_limit_hit},
            {"phase1", usage_json(r.phase1)},
            {"phase2", usage_json(r.phase2)}};
  return j;
}

RolloutRecord rollout_from(const json& j) {
  RolloutRecord r;
  r.query = j.at("query").get<std::string>();
  r.gold = gold_from(j.at("gold"));
  r.output_text = j.at("output_text").get<std::string>();
  r.segments = segments_from(j.at("segments"));
  if (!j.at("plan").is_null()) r.plan = plan_from(j.at("plan"));
  if (!j.at("plan_error").is_null()) r.plan_error = j.at("plan_error").get<std::string>();
  if (!j.at("validation").is_null()) r.validation = report_from(j.at("validation"));
  if (!j.at("trace").is_null()) r.trace = trace_from(j.at("trace"));
  r.reward = reward_from(j.at("reward"));
  r.generation_limit_hit = j.at("generation_limit_hit").get<bool>();
  r.phase1 = usage_from(j.at("phase1"));
  r.phase2 = usage_from(j.at("phase2"));
  return r;
}

json group_json(const GroupRecord& g) {
  json rollouts = json::array();
  for (const auto& r : g.rollouts) rollouts.push_back(rollout_json(r));
  return {{"query", g.query}, {"rollouts", std::move(rollouts)}, {"advantages", g.advantages}};
}

GroupRecord group_from(const json& j) {
  GroupRecord g;
  g.query = j.at("query").get<std::string>();
  for (const auto& r : j.at("rollouts")) g.rollouts.push_back(rollout_from(r));
  g.advantages = j.at("advantages").get<std::vector<double>>();
  return g;
}

json qa_pair_json(const QAPair& p) {
  return {{"question", p.question},
          {"gold", gold_json(p.gold)},
          {"kind", std::string(qa_kind_name(p.kind))},
          {"bundle_id", p.bundle_id},
          {"source_count", p.source_count}};
}

QAPair qa_pair_from(const json& j) {
  QAPair p;
  p.question = j.at("question").get<std::string>();
  p.gold = gold_from(j.at("gold"));
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "factual") {
    p.kind = QAKind::factual;
  } else if (kind == "causal") {
    p.kind = QAKind::causal;
  } else if (kind == "multiple_choice") {
    p.kind = QAKind::multiple_choice;
  } else {
    throw Error(ErrorKind::MalformedRecord, "unknown qa kind '" + kind + "'");
  }
  p.bundle_id = j.at("bundle_id").get<std::string>();
  p.source_count = j.at("source_count").get<int>();
  return p;
}

}  // namespace

std::string plan_to_json(const SearchPlan& plan) { return plan_json(plan).dump(); }
SearchPlan plan_from_json(const std::string& text) {
  return decode(text, "plan", [](const json& j) { return plan_from(j); });
}

std::string report_to_json(const ValidationReport& report) { return report_json(report).dump(); }
ValidationReport report_from_json(const std::string& text) {
  return decode(text, "validation report", [](const json& j) { return report_from(j); });
}

std::string trace_to_json(const ExecutionTrace& trace) { return trace_json(trace).dump(); }
ExecutionTrace trace_from_json(const std::string& text) {
  return decode(text, "execution trace", [](const json& j) { return trace_from(j); });
}

std::string segments_to_json(const Segments& segments) { return segments_json(segments).dump(); }
Segments segments_from_json(const std::string& text) {
  return decode(text, "segments", [](const json& j) { return segments_from(j); });
}

std::string reward_to_json(const RewardBreakdown& reward) { return reward_json(reward).dump(); }
RewardBreakdown reward_from_json(const std::string& text) {
  return decode(text, "reward breakdown", [](const json& j) { return reward_from(j); });
}

std::string gold_to_json(const GoldAnswer& gold) { return gold_json(gold).dump(); }
GoldAnswer gold_from_json(const std::string& text) {
  return decode(text, "gold answer", [](const json& j) { return gold_from(j); });
}

std::string rollout_record_to_json(const RolloutRecord& record) { return rollout_json(record).dump(); }
RolloutRecord rollout_record_from_json(const std::string& text) {
  return decode(text, "rollout record", [](const json& j) { return rollout_from(j); });
}

std::string group_record_to_json(const GroupRecord& record) { return group_json(record).dump(); }
GroupRecord group_record_from_json(const std::string& text) {
  return decode(text, "group record", [](const json& j) { return group_from(j); });
}

std::string qa_pair_to_json(const QAPair& pair) { return qa_pair_json(pair).dump(); }
QAPair qa_pair_from_json(const std::string& text) {
  return decode(text, "qa pair", [](const json& j) { return qa_pair_from(j); });
}

}  // namespace dagsearch
