#include "dagsearch/plan.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

constexpr std::string_view kNodesHeader = "Nodes:";
constexpr std::string_view kEdgesPrefix = "Edges:";
constexpr std::string_view kAsciiArrow = "->";
constexpr std::string_view kGlyphArrow = "\xE2\x86\x92";  // U+2192

std::size_t find_arrow(std::string_view s, std::size_t& arrow_len) {
  auto ascii = s.find(kAsciiArrow);
  auto glyph = s.find(kGlyphArrow);
  if (ascii == std::string_view::npos && glyph == std::string_view::npos) {
    arrow_len = 0;
    return std::string_view::npos;
  }
  if (glyph < ascii) {
    arrow_len = kGlyphArrow.size();
    return glyph;
  }
  arrow_len = kAsciiArrow.size();
  return ascii;
}

void parse_edge_clause(std::string_view clause, const std::string& line,
                       std::vector<PlanEdge>& edges,
                       std::set<std::pair<std::string, std::string>>& seen) {
  std::size_t pos = 0;
  while (pos <= clause.size()) {
    auto sep = clause.find(';', pos);
    std::string_view entry = clause.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
    pos = sep == std::string_view::npos ? clause.size() + 1 : sep + 1;

    std::string e = trim(entry);
    if (e.empty()) continue;  // tolerate trailing/empty separators

    std::size_t arrow_len = 0;
    auto arrow = find_arrow(e, arrow_len);
    if (arrow == std::string::npos) {
      throw Error(ErrorKind::MalformedEdge, "edge entry without arrow: '" + e + "'");
    }
    std::string from = trim(std::string_view(e).substr(0, arrow));
    std::string to = trim(std::string_view(e).substr(arrow + arrow_len));
    std::size_t extra_len = 0;
    if (find_arrow(to, extra_len) != std::string_view::npos ||
        find_arrow(from, extra_len) != std::string_view::npos) {
      throw Error(ErrorKind::MalformedEdge, "chained arrows are not an edge: '" + e + "'");
    }
    if (from.empty() || to.empty()) {
      throw Error(ErrorKind::MalformedEdge, "edge with empty endpoint in line: '" + line + "'");
    }
    if (from == to) {
      throw Error(ErrorKind::MalformedEdge, "self-loop " + from + " -> " + to);
    }
    if (seen.insert({from, to}).second) {
      edges.push_back({std::move(from), std::move(to)});
    }
  }
}

}  // namespace

std::string_view tool_name(ToolKind tool) {
  switch (tool) {
    case ToolKind::news: return "news";
    case ToolKind::academic: return "academic";
    case ToolKind::web: return "web";
  }
  return "web";
}

std::string_view tool_display_label(ToolKind tool) {
  switch (tool) {
    case ToolKind::news: return "News";
    case ToolKind::academic: return "Academic";
    case ToolKind::web: return "Web";
  }
  return "Web";
}

std::optional<ToolKind> parse_tool_label(std::string_view label) {
  std::string lower = to_lower(trim(label));
  if (lower == "news") return ToolKind::news;
  if (lower == "academic") return ToolKind::academic;
  if (lower == "web") return ToolKind::web;
  return std::nullopt;
}

const std::set<ToolKind>& all_tools() {
  static const std::set<ToolKind> tools = {ToolKind::news, ToolKind::academic, ToolKind::web};
  return tools;
}

const PlanNode* SearchPlan::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

bool is_valid_node_id(std::string_view id) {
  if (id.empty() || id.size() > 3) return false;
  if (id[0] < 'A' || id[0] > 'Z') return false;
  for (char c : id.substr(1)) {
    bool upper = c >= 'A' && c <= 'Z';
    bool digit = c >= '0' && c <= '9';
    if (!upper && !digit) return false;
  }
  return true;
}

SearchPlan parse_plan(std::string_view text) {
  SearchPlan plan;
  std::unordered_set<std::string> ids;
  std::set<std::pair<std::string, std::string>> edge_seen;
  bool before_first_content = true;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    std::string line = trim(raw);
    if (line.empty()) continue;

    if (before_first_content && line == kNodesHeader) {
      before_first_content = false;
      continue;
    }
    before_first_content = false;

    if (line.starts_with(kEdgesPrefix)) {
      parse_edge_clause(std::string_view(line).substr(kEdgesPrefix.size()), line, plan.edges, edge_seen);
      continue;
    }

    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::MalformedNodeLine, "no 'ID:' prefix in line: '" + line + "'");
    }
    std::string id = trim(std::string_view(line).substr(0, colon));
    if (!is_valid_node_id(id)) {
      throw Error(ErrorKind::MalformedNodeLine, "invalid node id '" + id + "' in line: '" + line + "'");
    }
    std::string rest = trim(std::string_view(line).substr(colon + 1));
    if (rest.empty() || rest.back() != ')') {
      throw Error(ErrorKind::MalformedNodeLine, "no trailing (Tool) parenthetical in line: '" + line + "'");
    }
    auto open = rest.rfind('(');
    if (open == std::string::npos) {
      throw Error(ErrorKind::MalformedNodeLine, "unmatched ')' in line: '" + line + "'");
    }
    std::string label = trim(std::string_view(rest).substr(open + 1, rest.size() - open - 2));
    std::string query = trim(std::string_view(rest).substr(0, open));
    if (label.empty()) {
      throw Error(ErrorKind::MalformedNodeLine, "empty tool label in line: '" + line + "'");
    }
    if (query.empty()) {
      throw Error(ErrorKind::MalformedNodeLine, "empty query in line: '" + line + "'");
    }
    if (!ids.insert(id).second) {
      throw Error(ErrorKind::DuplicateNodeId, "duplicate node id '" + id + "'");
    }
    plan.nodes.push_back({std::move(id), std::move(query), parse_tool_label(label), std::move(label)});
  }

  if (plan.nodes.empty()) {
    throw Error(ErrorKind::EmptyPlan, "plan text declares no nodes");
  }
  return plan;
}

std::string serialize_plan(const SearchPlan& plan) {
  std::string out;
  out += kNodesHeader;
  for (const auto& node : plan.nodes) {
    out += '\n';
    out += node.id;
    out += ": ";
    out += node.query;
    out += " (";
    out += node.tool ? std::string(tool_display_label(*node.tool)) : node.tool_label;
    out += ')';
  }
  if (!plan.edges.empty()) {
    out += "\nEdges: ";
    for (std::size_t i = 0; i < plan.edges.size(); ++i) {
      if (i > 0) out += "; ";
      out += plan.edges[i].from;
      out += " -> ";
      out += plan.edges[i].to;
    }
  }
  return out;
}

std::string structured_plan_json(const SearchPlan& plan) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& node : plan.nodes) {
    j["nodes"].push_back({
        {"id", node.id},
        {"query", node.query},
        {"tool", node.tool ? std::string(tool_name(*node.tool)) : node.tool_label},
    });
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& edge : plan.edges) {
    j["edges"].push_back({{"from", edge.from}, {"to", edge.to}});
  }
  return j.dump(2);
}

namespace {

// Longest-chain depth per declared node via Kahn's algorithm; nullopt when
// the declared-node digraph has a cycle (self-loops included).
std::optional<std::unordered_map<std::string, std::size_t>> chain_depths(const SearchPlan& plan) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) index.emplace(plan.nodes[i].id, i);

  const std::size_t n = plan.nodes.size();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : plan.edges) {
    auto f = index.find(e.from);
    auto t = index.find(e.to);
    if (f == index.end() || t == index.end()) continue;
    out[f->second].push_back(t->second);
    ++indegree[t->second];
  }

  std::vector<std::size_t> depth(n, 0);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t processed = 0;
  while (!ready.empty()) {
    std::size_t v = ready.back();
    ready.pop_back();
    ++processed;
    for (std::size_t w : out[v]) {
      depth[w] = std::max(depth[w], depth[v] + 1);
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (processed != n) return std::nullopt;

  std::unordered_map<std::string, std::size_t> result;
  for (std::size_t i = 0; i < n; ++i) result.emplace(plan.nodes[i].id, depth[i]);
  return result;
}

}  // namespace

ValidationReport validate_plan(const SearchPlan& plan, const std::set<ToolKind>& tools,
                               std::size_t max_nodes) {
  ValidationReport report;

  std::unordered_set<std::string> declared;
  bool ids_unique = true;
  for (const auto& node : plan.nodes) {
    if (!declared.insert(node.id).second) ids_unique = false;
  }

  report.node_format_ok = ids_unique;
  for (const auto& node : plan.nodes) {
    if (!is_valid_node_id(node.id) || trim(node.query).empty() ||
        node.query.find('\n') != std::string::npos) {
      report.node_format_ok = false;
    }
  }

  for (const auto& node : plan.nodes) {
    if (!node.tool || tools.find(*node.tool) == tools.end()) {
      report.excluded_nodes.push_back(node.id);
    }
  }
  report.tools_ok = report.excluded_nodes.empty();

  report.node_count_ok = !plan.nodes.empty() && plan.nodes.size() <= max_nodes;

  report.edge_refs_ok = true;
  for (const auto& e : plan.edges) {
    if (!declared.contains(e.from) || !declared.contains(e.to)) report.edge_refs_ok = false;
  }

  bool self_loop = std::any_of(plan.edges.begin(), plan.edges.end(),
                               [](const PlanEdge& e) { return e.from == e.to; });
  report.acyclic = !self_loop && chain_depths(plan).has_value();

  report.reward_valid = report.acyclic && report.node_format_ok && report.tools_ok &&
                        report.node_count_ok && report.edge_refs_ok &&
                        report.excluded_nodes.empty();
  return report;
}

std::vector<std::vector<std::string>> topo_levels(const SearchPlan& plan) {
  bool self_loop = std::any_of(plan.edges.begin(), plan.edges.end(),
                               [](const PlanEdge& e) { return e.from == e.to; });
  auto depths = self_loop ? std::nullopt : chain_depths(plan);
  if (!depths) {
    throw Error(ErrorKind::CycleDetected, "plan dependency graph has a cycle");
  }
  std::size_t max_depth = 0;
  for (const auto& [id, d] : *depths) max_depth = std::max(max_depth, d);

  std::vector<std::vector<std::string>> levels(plan.nodes.empty() ? 0 : max_depth + 1);
  for (const auto& node : plan.nodes) {
    levels[(*depths)[node.id]].push_back(node.id);
  }
  for (auto& level : levels) std::sort(level.begin(), level.end());
  return levels;
}

}  // namespace dagsearch
