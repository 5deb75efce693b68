#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dagsearch {

/// The three search tools a plan node may dispatch to. Tool labels parse
/// case-insensitively; the canonical form is lowercase.
enum class ToolKind { news, academic, web };

std::string_view tool_name(ToolKind tool);            // "news" / "academic" / "web"
std::string_view tool_display_label(ToolKind tool);   // "News" / "Academic" / "Web"

/// Case-insensitive tool lookup. Returns nullopt for labels outside the set.
std::optional<ToolKind> parse_tool_label(std::string_view label);

/// All three tools, the default availability set.
const std::set<ToolKind>& all_tools();

inline constexpr std::size_t kDefaultMaxNodes = 8;

/// One node of a search plan: `ID: sub-query (Tool)`.
///
/// `tool` is empty when the declared label is not one of the known tools;
/// the raw label is kept in `tool_label` so validation can report it and
/// serialization can round-trip it.
struct PlanNode {
  std::string id;
  std::string query;
  std::optional<ToolKind> tool;
  std::string tool_label;

  bool operator==(const PlanNode&) const = default;
};

struct PlanEdge {
  std::string from;
  std::string to;

  bool operator==(const PlanEdge&) const = default;
};

/// A search plan: named query/tool nodes plus dependency edges.
struct SearchPlan {
  std::vector<PlanNode> nodes;
  std::vector<PlanEdge> edges;

  bool operator==(const SearchPlan&) const = default;
  const PlanNode* find_node(std::string_view id) const;
};

/// Per-criterion validation outcome. Failures are data, not faults.
struct ValidationReport {
  bool acyclic = false;
  bool node_format_ok = false;
  bool tools_ok = false;
  bool node_count_ok = false;
  bool edge_refs_ok = false;
  std::vector<std::string> excluded_nodes;  // unknown/unavailable tool, declaration order
  bool reward_valid = false;                // conjunction of all criteria, excluded empty

  bool operator==(const ValidationReport&) const = default;
};

/// True iff `id` matches the node-id pattern: a capital letter followed by
/// up to two capitals/digits.
bool is_valid_node_id(std::string_view id);

/// Parses the body of a `<search>` block.
///
/// Grammar: an optional leading `Nodes:` header; node lines of the form
/// `ID: query (Tool)` where the tool is the LAST parenthesized token on the
/// line (earlier parentheses belong to the query); any line starting with
/// `Edges:` lists `from -> to` entries separated by `;` (both `->` and the
/// arrow glyph are accepted). Blank lines are skipped. Duplicate edges are
/// dropped silently; a self-loop is malformed.
///
/// Throws Error with kind MalformedNodeLine, DuplicateNodeId, MalformedEdge
/// or EmptyPlan.
SearchPlan parse_plan(std::string_view text);

/// Canonical text form: `Nodes:` header, one node per line in declared order
/// with the capitalized tool label, then a single `Edges: a -> b; c -> d`
/// line (omitted when there are no edges). LF line endings, UTF-8.
/// parse_plan(serialize_plan(p)) == p up to tool-label case.
std::string serialize_plan(const SearchPlan& plan);

/// Pretty-printed key/value JSON rendering of the same plan. This is the
/// explicit structured-object equivalent used for wire payloads and for
/// token-cost comparisons against the canonical text form.
std::string structured_plan_json(const SearchPlan& plan);

/// Checks every validity criterion and fills the report. Acyclicity is
/// decided on the declared-node-induced digraph (edges with undeclared
/// endpoints are the business of edge_refs_ok, not the cycle check).
ValidationReport validate_plan(const SearchPlan& plan,
                               const std::set<ToolKind>& tools = all_tools(),
                               std::size_t max_nodes = kDefaultMaxNodes);

/// Topological levels: level k holds exactly the nodes whose longest
/// dependency chain has length k, ids sorted lexicographically within a
/// level. Edges with undeclared endpoints are ignored.
/// Throws Error(CycleDetected) when the plan is cyclic.
std::vector<std::vector<std::string>> topo_levels(const SearchPlan& plan);

}  // namespace dagsearch
