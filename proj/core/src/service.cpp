#include "dagsearch/service.hpp"

#include <optional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/exec.hpp"
#include "dagsearch/json_io.hpp"
#include "dagsearch/rollout_log.hpp"
#include "dagsearch/wiring.hpp"

namespace dagsearch {

namespace {

using nlohmann::json;

json error_body(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", std::string(error_kind_name(kind))}, {"message", message}}}};
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_request(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("request body is not JSON: ") + e.what());
  }
}

// Plan from either {"text": "..."} or {"plan": {...}}.
SearchPlan plan_from_request(const json& j) {
  if (j.contains("text")) return parse_plan(j.at("text").get<std::string>());
  if (j.contains("plan")) return plan_from_json(j.at("plan").dump());
  throw Error(ErrorKind::MalformedRecord, "request needs 'text' or 'plan'");
}

std::set<ToolKind> tools_from_request(const json& j) {
  if (!j.contains("tools")) return all_tools();
  std::set<ToolKind> tools;
  for (const auto& name : j.at("tools")) {
    auto tool = parse_tool_label(name.get<std::string>());
    if (!tool) {
      throw Error(ErrorKind::MalformedRecord, "unknown tool '" + name.get<std::string>() + "'");
    }
    tools.insert(*tool);
  }
  if (tools.empty()) throw Error(ErrorKind::MalformedRecord, "'tools' must be nonempty");
  return tools;
}

}  // namespace

struct Service::Impl {
  EngineConfig config;
  BackendRegistry registry;
  std::unique_ptr<AnswerScorer> scorer;
  std::unique_ptr<PolicyClient> policy;  // may stay null; rollout reports it
  httplib::Server server;
  std::thread worker;

  explicit Impl(EngineConfig cfg)
      : config(std::move(cfg)), registry(config.make_registry()) {
    config.validate();
    scorer = make_answer_scorer(config);
    try {
      policy = make_policy_client(config);
    } catch (const Error&) {
      policy = nullptr;  // /v1/rollout will answer with the config error
    }
    route();
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    if (server.is_running()) server.stop();
    if (worker.joinable()) worker.join();
  }

  template <typename Handler>
  auto wrap(Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        reply_json(res, 400, error_body(e.kind(), e.what()));
      } catch (const std::exception& e) {
        reply_json(res, 500, error_body(ErrorKind::ConfigInvalid, e.what()));
      }
    };
  }

  void route() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    server.Post("/v1/plan/parse", wrap([](const httplib::Request& req, httplib::Response& res) {
      json j = parse_request(req);
      SearchPlan plan = parse_plan(j.at("text").get<std::string>());
      reply_json(res, 200,
                 {{"plan", json::parse(plan_to_json(plan))}, {"canonical", serialize_plan(plan)}});
    }));

    server.Post("/v1/plan/validate", wrap([this](const httplib::Request& req, httplib::Response& res) {
      json j = parse_request(req);
      SearchPlan plan = plan_from_request(j);
      std::size_t max_nodes = j.value("max_nodes", config.max_nodes);
      ValidationReport report = validate_plan(plan, tools_from_request(j), max_nodes);
      reply_json(res, 200,
                 {{"plan", json::parse(plan_to_json(plan))},
                  {"report", json::parse(report_to_json(report))}});
    }));

    server.Post("/v1/plan/execute", wrap([this](const httplib::Request& req, httplib::Response& res) {
      json j = parse_request(req);
      SearchPlan plan = plan_from_request(j);
      int k = j.value("k", config.passages_per_query);
      ValidationReport report = validate_plan(plan, tools_from_request(j), config.max_nodes);
      ExecutionTrace trace = execute_plan(plan, report, registry, k);
      reply_json(res, 200, {{"trace", json::parse(trace_to_json(trace))}});
    }));

    server.Post("/v1/reward/score", wrap([this](const httplib::Request& req, httplib::Response& res) {
      json j = parse_request(req);
      std::string text = j.at("text").get<std::string>();
      GoldAnswer gold = gold_from_json(j.at("gold").dump());

      RewardBreakdown reward;
      reward.format = score_format(text);
      Segments segments;
      try {
        segments = segment_output(text);
      } catch (const Error&) {
        segments = Segments{};
      }
      std::string search_body =
          segments.search ? std::string(span_body(text, *segments.search)) : std::string();
      reward.dag = score_dag(search_body, all_tools(), config.max_nodes);
      std::string answer_body =
          segments.answer ? std::string(span_body(text, *segments.answer)) : std::string();
      reward.answer = segments.answer ? scorer->score(answer_body, gold) : 0.0;
      reward.composite =
          composite_reward(reward.format, reward.dag, reward.answer, config.weights);
      reply_json(res, 200, {{"reward", json::parse(reward_to_json(reward))}});
    }));

    server.Post("/v1/rollout", wrap([this](const httplib::Request& req, httplib::Response& res) {
      if (!policy) {
        throw Error(ErrorKind::ConfigInvalid,
                    "no policy endpoint configured (policy.script_path or LLM_API_BASE)");
      }
      json j = parse_request(req);
      std::string query = j.at("query").get<std::string>();
      GoldAnswer gold = gold_from_json(j.at("gold").dump());

      RolloutDriver driver(*policy, *scorer, registry, make_rollout_options(config));
      if (j.contains("group")) {
        GroupRecord group = driver.run_group(query, gold, j.at("group").get<int>());
        if (!config.log_path.empty()) {
          for (const auto& r : group.rollouts) {
            append_rollout_log(make_log_record(r, config.hash()), config.log_path);
          }
        }
        reply_json(res, 200, {{"group", json::parse(group_record_to_json(group))}});
      } else {
        RolloutRecord record = driver.run_rollout(query, gold);
        if (!config.log_path.empty()) {
          append_rollout_log(make_log_record(record, config.hash()), config.log_path);
        }
        reply_json(res, 200, {{"record", json::parse(rollout_record_to_json(record))}});
      }
    }));
  }
};

Service::Service(EngineConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Service::~Service() = default;
Service::Service(Service&&) noexcept = default;
Service& Service::operator=(Service&&) noexcept = default;

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorKind::BindFailure, "cannot bind to " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw Error(ErrorKind::BindFailure, "cannot bind to " + host + ":" + std::to_string(port));
    }
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorKind::BindFailure, "cannot bind to " + host + ":" + std::to_string(port));
  }
  impl_->server.listen_after_bind();
}

void Service::stop() { impl_->shutdown(); }

}  // namespace dagsearch
