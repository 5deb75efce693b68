#pragma once

#include <string>
#include <vector>

#include "dagsearch/backends.hpp"
#include "dagsearch/plan.hpp"

namespace dagsearch {

enum class NodeStatus { ok, empty, failed, excluded };

std::string_view node_status_name(NodeStatus status);

/// Fetch outcome for one plan node.
struct NodeResult {
  std::string node_id;
  std::string tool_label;  // lowercase canonical, or the raw label for excluded nodes
  std::string query;
  std::vector<Passage> passages;
  NodeStatus status = NodeStatus::empty;
  std::string failure_reason;  // set when status == failed

  bool operator==(const NodeResult&) const = default;
};

/// Full record of one plan execution.
struct ExecutionTrace {
  std::vector<std::vector<std::string>> levels;
  std::vector<NodeResult> node_results;  // concatenation order of levels
  double wall_time_seconds = 0.0;
  std::string result_block;

  bool operator==(const ExecutionTrace&) const = default;
};

/// Retrieves up to k passages for one query. Walks the tool's backend
/// chain: each backend gets 1 + retries attempts; a backend that errors or
/// returns nothing hands over to the next one. Snippets are truncated to
/// the registry's per-passage cap and ranks are renumbered 1..n.
///
/// All backends erroring raises Error(AllBackendsFailed) for a multi-entry
/// chain, or the sole backend's error unchanged. All backends returning
/// nothing is an empty result, not an error.
std::vector<Passage> fetch(ToolKind tool, const std::string& query, int k,
                           const BackendRegistry& registry);

/// Executes a validated plan level by level. Nodes within a level are
/// dispatched concurrently (bounded by settings().parallelism); levels run
/// sequentially. Nodes listed in report.excluded_nodes are never fetched
/// and appear with status=excluded; a failing fetch marks only its own
/// node as failed. Levels are computed over all declared nodes, so
/// excluded nodes keep their slot in the ordering.
///
/// Throws Error(CycleDetected) when the dependency graph is cyclic.
ExecutionTrace execute_plan(const SearchPlan& plan, const ValidationReport& report,
                            const BackendRegistry& registry, int k);

/// Concatenates per-node blocks in execution order:
///   Node <id> (<tool>) Search results:
/// followed by `Result <rank>: / Title: / Abstract:` lines per passage, all
/// blank-line separated. Nodes without passages carry one bracketed status
/// line instead.
std::string assemble_results(const SearchPlan& plan, const std::vector<NodeResult>& node_results);

}  // namespace dagsearch
