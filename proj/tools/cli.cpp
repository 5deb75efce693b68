#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dagsearch/corpus.hpp"
#include "dagsearch/errors.hpp"
#include "dagsearch/exec.hpp"
#include "dagsearch/json_io.hpp"
#include "dagsearch/rollout_log.hpp"
#include "dagsearch/service.hpp"
#include "dagsearch/strings.hpp"
#include "dagsearch/wiring.hpp"

namespace dagsearch::cli {

namespace {

std::string read_input(const std::string& file, std::istream& in) {
  if (!file.empty()) {
    std::ifstream f(file);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot read " + file);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GoldAnswer gold_from_flags(const std::string& gold_text, const std::string& gold_options) {
  if (!gold_options.empty()) {
    std::set<std::string> options;
    for (const auto& o : split(gold_options, ',')) {
      std::string t = trim(o);
      if (!t.empty()) options.insert(t);
    }
    if (options.empty()) throw Error(ErrorKind::ConfigInvalid, "--gold-options is empty");
    return GoldAnswer::choices(std::move(options));
  }
  if (!gold_text.empty()) return GoldAnswer::freeform(gold_text);
  throw Error(ErrorKind::ConfigInvalid, "one of --gold-text / --gold-options is required");
}

std::set<ToolKind> tools_from_flag(const std::string& csv) {
  if (csv.empty()) return all_tools();
  std::set<ToolKind> tools;
  for (const auto& name : split(csv, ',')) {
    auto tool = parse_tool_label(name);
    if (!tool) throw Error(ErrorKind::ConfigInvalid, "unknown tool '" + trim(name) + "'");
    tools.insert(*tool);
  }
  return tools;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  out << "acyclic: " << flag(report.acyclic) << '\n'
      << "node_format_ok: " << flag(report.node_format_ok) << '\n'
      << "tools_ok: " << flag(report.tools_ok) << '\n'
      << "node_count_ok: " << flag(report.node_count_ok) << '\n'
      << "edge_refs_ok: " << flag(report.edge_refs_ok) << '\n';
  out << "excluded_nodes:";
  for (const auto& id : report.excluded_nodes) out << ' ' << id;
  out << '\n' << "reward_valid: " << flag(report.reward_valid) << '\n';
}

struct SequentialChatClient final : public ChatClient {
  std::vector<std::string> replies;
  std::size_t next = 0;

  ChatResult complete(const std::string&, const ChatOptions&) override {
    if (replies.empty()) throw Error(ErrorKind::GeneratorUnavailable, "script has no replies");
    ChatResult r;
    r.content = replies[std::min(next, replies.size() - 1)];
    if (next + 1 < replies.size()) ++next;
    r.stopped = true;
    return r;
  }
};

struct DatasetStats {
  std::size_t documents = 0;
  std::size_t after_dedup = 0;
  std::size_t bundles = 0;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
};

}  // namespace

int dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"search-plan execution engine and rollout environment"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "engine config file (JSON)");

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "parse plan text into its canonical form");
  std::string parse_file;
  bool parse_json = false;
  cmd_parse->add_option("-f,--file", parse_file, "plan text file (default: stdin)");
  cmd_parse->add_flag("--json", parse_json, "machine-readable output");

  // validate
  auto* cmd_validate = app.add_subcommand("validate", "parse and validate plan text");
  std::string validate_file, validate_tools;
  std::size_t validate_max_nodes = 0;
  bool validate_json = false;
  cmd_validate->add_option("-f,--file", validate_file, "plan text file (default: stdin)");
  cmd_validate->add_option("--max-nodes", validate_max_nodes, "node budget (default from config)");
  cmd_validate->add_option("--tools", validate_tools, "available tools, comma separated");
  cmd_validate->add_flag("--json", validate_json, "machine-readable output");

  // exec
  auto* cmd_exec = app.add_subcommand("exec", "execute plan text and print the result block");
  std::string exec_file;
  bool exec_json = false, exec_mock = false;
  int exec_k = 0, exec_parallelism = 0;
  cmd_exec->add_option("-f,--file", exec_file, "plan text file (default: stdin)");
  cmd_exec->add_flag("--mock", exec_mock, "force deterministic mock backends");
  cmd_exec->add_option("-k", exec_k, "passages per query (default from config)");
  cmd_exec->add_option("--parallelism", exec_parallelism, "concurrent fetches per level");
  cmd_exec->add_flag("--json", exec_json, "machine-readable output");

  // score
  auto* cmd_score = app.add_subcommand("score", "score a full structured output against gold");
  std::string score_file, score_gold_text, score_gold_options;
  bool score_json = false;
  cmd_score->add_option("-f,--file", score_file, "output text file (default: stdin)");
  cmd_score->add_option("--gold-text", score_gold_text, "free-text gold answer");
  cmd_score->add_option("--gold-options", score_gold_options, "gold option labels, comma separated");
  cmd_score->add_flag("--json", score_json, "machine-readable output");

  // rollout
  auto* cmd_rollout = app.add_subcommand("rollout", "run the pause/resume protocol for a query");
  std::string rollout_query, rollout_gold_text, rollout_gold_options, rollout_script, rollout_log;
  int rollout_group = 0;
  bool rollout_json = false, rollout_mock = false;
  cmd_rollout->add_option("--query", rollout_query, "user query")->required();
  cmd_rollout->add_option("--gold-text", rollout_gold_text, "free-text gold answer");
  cmd_rollout->add_option("--gold-options", rollout_gold_options, "gold option labels");
  cmd_rollout->add_option("--group", rollout_group, "run M rollouts and report advantages");
  cmd_rollout->add_option("--script", rollout_script, "scripted policy completions file");
  cmd_rollout->add_option("--log", rollout_log, "append records to this file");
  cmd_rollout->add_flag("--mock", rollout_mock, "force mock backends and local scoring");
  cmd_rollout->add_flag("--json", rollout_json, "machine-readable output");

  // dataset build
  auto* cmd_dataset = app.add_subcommand("dataset", "dataset construction");
  auto* cmd_build = cmd_dataset->add_subcommand("build", "build a multi-hop QA dataset");
  std::string build_corpus, build_embeddings, build_out, build_script;
  int build_reduce = 0;
  double build_threshold = 0.0;
  unsigned build_seed = 0;
  bool build_seed_set = false, build_json = false;
  cmd_build->add_option("--corpus", build_corpus, "corpus directory")->required();
  cmd_build->add_option("--embeddings", build_embeddings, "embeddings sidecar (JSONL)")->required();
  cmd_build->add_option("--out", build_out, "output dataset file (JSONL)")->required();
  cmd_build->add_option("--reduce", build_reduce, "PCA-reduce embeddings to this dimension first");
  cmd_build->add_option("--threshold", build_threshold, "agglomerative distance threshold");
  cmd_build->add_option("--seed", build_seed, "clustering seed")->each([&](const std::string&) {
    build_seed_set = true;
  });
  cmd_build->add_option("--script", build_script,
                        "scripted generator/checker replies file (offline runs)");
  cmd_build->add_flag("--json", build_json, "machine-readable output");

  // serve
  auto* cmd_serve = app.add_subcommand("serve", "run the HTTP service");
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  cmd_serve->add_option("--host", serve_host, "bind host");
  cmd_serve->add_option("--port", serve_port, "bind port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    EngineConfig config;
    if (!config_path.empty()) config = EngineConfig::from_file(config_path);
    config.apply_env_overrides();

    if (*cmd_parse) {
      SearchPlan plan = parse_plan(read_input(parse_file, in));
      if (parse_json) {
        nlohmann::json j = {{"plan", nlohmann::json::parse(plan_to_json(plan))},
                            {"canonical", serialize_plan(plan)}};
        out << j.dump() << '\n';
      } else {
        out << serialize_plan(plan) << '\n';
      }
      return 0;
    }

    if (*cmd_validate) {
      SearchPlan plan = parse_plan(read_input(validate_file, in));
      std::size_t max_nodes = validate_max_nodes > 0 ? validate_max_nodes : config.max_nodes;
      ValidationReport report = validate_plan(plan, tools_from_flag(validate_tools), max_nodes);
      if (validate_json) {
        out << report_to_json(report) << '\n';
      } else {
        print_report(report, out);
      }
      return 0;  // validation problems are data, not failures
    }

    if (*cmd_exec) {
      SearchPlan plan = parse_plan(read_input(exec_file, in));
      if (exec_mock) config.mock = true;
      if (exec_parallelism > 0) config.search.parallelism = exec_parallelism;
      int k = exec_k > 0 ? exec_k : config.passages_per_query;
      ValidationReport report = validate_plan(plan, all_tools(), config.max_nodes);
      BackendRegistry registry = config.make_registry();
      ExecutionTrace trace = execute_plan(plan, report, registry, k);
      if (exec_json) {
        out << trace_to_json(trace) << '\n';
      } else {
        out << trace.result_block << '\n';
      }
      return 0;
    }

    if (*cmd_score) {
      std::string text = read_input(score_file, in);
      GoldAnswer gold = gold_from_flags(score_gold_text, score_gold_options);
      auto scorer = make_answer_scorer(config);

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
      reward.composite = composite_reward(reward.format, reward.dag, reward.answer, config.weights);

      if (score_json) {
        out << reward_to_json(reward) << '\n';
      } else {
        out << "format: " << reward.format << "\ndag: " << reward.dag
            << "\nanswer: " << reward.answer << "\ncomposite: " << reward.composite << '\n';
      }
      return 0;
    }

    if (*cmd_rollout) {
      if (rollout_mock) config.mock = true;
      if (!rollout_script.empty()) config.policy.script_path = rollout_script;
      GoldAnswer gold = gold_from_flags(rollout_gold_text, rollout_gold_options);
      auto policy = make_policy_client(config);
      auto scorer = make_answer_scorer(config);
      BackendRegistry registry = config.make_registry();
      RolloutDriver driver(*policy, *scorer, registry, make_rollout_options(config));

      if (rollout_group > 0) {
        GroupRecord group = driver.run_group(rollout_query, gold, rollout_group);
        if (!rollout_log.empty()) {
          for (const auto& r : group.rollouts) {
            append_rollout_log(make_log_record(r, config.hash()), rollout_log);
          }
        }
        if (rollout_json) {
          out << group_record_to_json(group) << '\n';
        } else {
          out << "rollouts: " << group.rollouts.size() << "\nadvantages:";
          for (double a : group.advantages) out << ' ' << a;
          out << '\n';
        }
      } else {
        RolloutRecord record = driver.run_rollout(rollout_query, gold);
        if (!rollout_log.empty()) {
          append_rollout_log(make_log_record(record, config.hash()), rollout_log);
        }
        if (rollout_json) {
          out << rollout_record_to_json(record) << '\n';
        } else {
          out << "format: " << record.reward.format << "\ndag: " << record.reward.dag
              << "\nanswer: " << record.reward.answer
              << "\ncomposite: " << record.reward.composite << '\n';
        }
      }
      return 0;
    }

    if (*cmd_build) {
      auto docs = load_corpus(build_corpus);
      DatasetStats stats;
      stats.documents = docs.size();

      docs = dedup(docs);
      stats.after_dedup = docs.size();

      auto embeddings = load_embeddings(build_embeddings);
      if (build_reduce > 0) embeddings = reduce_embeddings(embeddings, build_reduce);
      attach_embeddings(docs, embeddings);

      ClusterParams params;
      if (build_threshold > 0.0) params.distance_threshold = build_threshold;
      params.seed = build_seed_set ? build_seed : config.seed;
      auto bundles = bundle(docs, params);
      stats.bundles = bundles.size();

      std::unique_ptr<ChatClient> generator;
      std::unique_ptr<ChatClient> checker;
      if (!build_script.empty()) {
        std::ifstream f(build_script);
        if (!f) throw Error(ErrorKind::IoFailure, "cannot read " + build_script);
        nlohmann::json script = nlohmann::json::parse(std::string(
            (std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>()));
        auto gen = std::make_unique<SequentialChatClient>();
        gen->replies = script.at("generator").get<std::vector<std::string>>();
        auto chk = std::make_unique<SequentialChatClient>();
        chk->replies = script.at("checker").get<std::vector<std::string>>();
        generator = std::move(gen);
        checker = std::move(chk);
      } else if (!config.judge.base_url.empty()) {
        generator = std::make_unique<HttpChatClient>(config.judge.base_url, config.judge.api_key);
        checker = std::make_unique<HttpChatClient>(config.judge.base_url, config.judge.api_key);
      } else {
        throw Error(ErrorKind::ConfigInvalid,
                    "dataset build needs --script or a judge endpoint (JUDGE_API_BASE)");
      }

      std::vector<QAPair> accepted;
      for (const auto& b : bundles) {
        auto candidates = generate_qa(b, *generator);
        stats.candidates += candidates.size();
        for (const auto& pair : candidates) {
          if (filter_qa(pair, b, *checker).accepted) accepted.push_back(pair);
        }
      }
      stats.accepted = accepted.size();

      accepted = curriculum_sort(std::move(accepted));
      write_dataset(accepted, build_out);

      if (build_json) {
        nlohmann::json j = {{"documents", stats.documents}, {"after_dedup", stats.after_dedup},
                            {"bundles", stats.bundles},     {"candidates", stats.candidates},
                            {"accepted", stats.accepted},   {"out", build_out}};
        out << j.dump() << '\n';
      } else {
        out << "documents: " << stats.documents << " (after dedup: " << stats.after_dedup
            << ")\nbundles: " << stats.bundles << "\ncandidates: " << stats.candidates
            << "\naccepted: " << stats.accepted << "\nwritten: " << build_out << '\n';
      }
      return 0;
    }

    if (*cmd_serve) {
      config.validate();
      Service service(config);
      out << "listening on " << serve_host << ':' << serve_port << '\n';
      service.run(serve_host, serve_port);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: [" << error_kind_name(e.kind()) << "] " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dagsearch::cli
