#include "dagsearch/exec.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "dagsearch/errors.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

std::string_view node_status_name(NodeStatus status) {
  switch (status) {
    case NodeStatus::ok: return "ok";
    case NodeStatus::empty: return "empty";
    case NodeStatus::failed: return "failed";
    case NodeStatus::excluded: return "excluded";
  }
  return "empty";
}

std::vector<Passage> fetch(ToolKind tool, const std::string& query, int k,
                           const BackendRegistry& registry) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (trim(query).empty()) throw std::invalid_argument("query must be nonempty");

  const auto& chain = registry.chain(tool);
  const auto& settings = registry.settings();

  std::optional<Error> last_error;
  std::size_t errored = 0;
  for (const auto& backend : chain) {
    std::vector<Passage> passages;
    bool got = false;
    for (int attempt = 0; attempt <= settings.retries && !got; ++attempt) {
      try {
        passages = backend->search(query, k);
        got = true;
      } catch (const Error& e) {
        last_error = e;
        if (e.kind() == ErrorKind::AuthMissing) break;  // retrying cannot help
      }
    }
    if (!got) {
      ++errored;
      continue;  // hand over to the fallback
    }
    if (passages.empty()) continue;

    if (static_cast<int>(passages.size()) > k) passages.resize(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < passages.size(); ++i) {
      passages[i].rank = static_cast<int>(i) + 1;
      if (passages[i].snippet.size() > settings.snippet_max_chars) {
        passages[i].snippet.resize(settings.snippet_max_chars);
      }
    }
    return passages;
  }

  if (errored == chain.size() && last_error) {
    if (chain.size() > 1) {
      throw Error(ErrorKind::AllBackendsFailed,
                  "every backend failed; last: " + std::string(last_error->what()));
    }
    throw *last_error;
  }
  return {};  // every backend answered, none had results
}

ExecutionTrace execute_plan(const SearchPlan& plan, const ValidationReport& report,
                            const BackendRegistry& registry, int k) {
  auto start = std::chrono::steady_clock::now();

  ExecutionTrace trace;
  trace.levels = topo_levels(plan);  // throws CycleDetected on a cycle

  std::unordered_set<std::string> excluded(report.excluded_nodes.begin(),
                                           report.excluded_nodes.end());
  std::unordered_map<std::string, const PlanNode*> by_id;
  for (const auto& node : plan.nodes) by_id.emplace(node.id, &node);

  const int parallelism = std::max(1, registry.settings().parallelism);

  for (const auto& level : trace.levels) {
    std::vector<NodeResult> level_results(level.size());
    std::atomic<std::size_t> next{0};

    auto work = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= level.size()) return;
        const PlanNode& node = *by_id.at(level[i]);
        NodeResult result;
        result.node_id = node.id;
        result.query = node.query;
        result.tool_label =
            node.tool ? std::string(tool_name(*node.tool)) : to_lower(node.tool_label);
        if (excluded.contains(node.id)) {
          result.status = NodeStatus::excluded;
        } else {
          try {
            result.passages = fetch(*node.tool, node.query, k, registry);
            result.status = result.passages.empty() ? NodeStatus::empty : NodeStatus::ok;
          } catch (const Error& e) {
            result.status = NodeStatus::failed;
            result.failure_reason = std::string(error_kind_name(e.kind())) + ": " + e.what();
          }
        }
        level_results[i] = std::move(result);
      }
    };

    std::size_t worker_count =
        std::min<std::size_t>(static_cast<std::size_t>(parallelism), level.size());
    if (worker_count <= 1) {
      work();
    } else {
      std::vector<std::thread> workers;
      workers.reserve(worker_count);
      for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(work);
      for (auto& t : workers) t.join();
    }
    for (auto& r : level_results) trace.node_results.push_back(std::move(r));
  }

  trace.result_block = assemble_results(plan, trace.node_results);
  trace.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::string assemble_results(const SearchPlan&, const std::vector<NodeResult>& node_results) {
  std::vector<std::string> parts;
  for (const auto& result : node_results) {
    parts.push_back("Node " + result.node_id + " (" + result.tool_label + ") Search results:");
    switch (result.status) {
      case NodeStatus::ok:
        for (const auto& passage : result.passages) {
          parts.push_back("Result " + std::to_string(passage.rank) + ":");
          parts.push_back("Title: " + passage.title);
          parts.push_back("Abstract: " + passage.snippet);
        }
        break;
      case NodeStatus::empty:
        parts.push_back("[no results]");
        break;
      case NodeStatus::failed:
        parts.push_back("[search failed: " + result.failure_reason + "]");
        break;
      case NodeStatus::excluded:
        parts.push_back("[excluded from execution: unknown or unavailable tool]");
        break;
    }
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += parts[i];
  }
  return out;
}

}  // namespace dagsearch
