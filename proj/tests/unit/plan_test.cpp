#include <doctest.h>

#include <algorithm>
#include <random>

#include "dagsearch/errors.hpp"
#include "dagsearch/plan.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dagsearch;

namespace {

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_plan(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << text);
  return ErrorKind::EmptyPlan;
}

}  // namespace

TEST_CASE("parse: node lines with embedded parentheses keep them in the query") {
  SearchPlan plan = parse_plan(fixtures::kMarketPlanText);
  REQUIRE(plan.nodes.size() == 3);
  CHECK(plan.nodes[0].id == "A");
  CHECK(plan.nodes[0].query ==
        "Price fluctuation of coke (Quasi-first-grade Metallurgical Coke) in early October 2024");
  for (const auto& node : plan.nodes) CHECK(node.tool == ToolKind::news);
  REQUIRE(plan.edges.size() == 2);
  CHECK(plan.edges[0] == PlanEdge{"A", "C"});
  CHECK(plan.edges[1] == PlanEdge{"B", "C"});
}

TEST_CASE("parse: single node line without header or edges") {
  SearchPlan plan = parse_plan("A: EU AI Act final adoption 2024-05-21 (News)");
  REQUIRE(plan.nodes.size() == 1);
  CHECK(plan.nodes[0].id == "A");
  CHECK(plan.nodes[0].query == "EU AI Act final adoption 2024-05-21");
  CHECK(plan.nodes[0].tool == ToolKind::news);
  CHECK(plan.edges.empty());
}

TEST_CASE("parse: tool labels are case-insensitive; unknown labels survive as raw text") {
  SearchPlan plan = parse_plan("A: q (wEb)\nB: r (Twitter)");
  CHECK(plan.nodes[0].tool == ToolKind::web);
  CHECK(!plan.nodes[1].tool.has_value());
  CHECK(plan.nodes[1].tool_label == "Twitter");
}

TEST_CASE("parse: arrow glyph and ascii arrow are interchangeable") {
  SearchPlan ascii = parse_plan("A: x (Web)\nB: y (Web)\nEdges: A -> B");
  SearchPlan glyph = parse_plan("A: x (Web)\nB: y (Web)\nEdges: A \xE2\x86\x92 B");
  CHECK(ascii.edges == glyph.edges);
}

TEST_CASE("parse: duplicate edges collapse, blank lines are skipped") {
  SearchPlan plan = parse_plan("A: x (Web)\n\n\nB: y (Web)\n\nEdges: A -> B; A -> B;");
  CHECK(plan.edges.size() == 1);
}

TEST_CASE("parse: error taxonomy") {
  CHECK(parse_error_kind("A: q (Web)\nA: r (Web)") == ErrorKind::DuplicateNodeId);
  CHECK(parse_error_kind("") == ErrorKind::EmptyPlan);
  CHECK(parse_error_kind("Nodes:\n") == ErrorKind::EmptyPlan);
  CHECK(parse_error_kind("no colon here (Web)") == ErrorKind::MalformedNodeLine);
  CHECK(parse_error_kind("A: query with no tool") == ErrorKind::MalformedNodeLine);
  CHECK(parse_error_kind("A: (Web)") == ErrorKind::MalformedNodeLine);
  CHECK(parse_error_kind("lower: q (Web)") == ErrorKind::MalformedNodeLine);
  CHECK(parse_error_kind("TOOLONG: q (Web)") == ErrorKind::MalformedNodeLine);
  CHECK(parse_error_kind("A: q (Web)\nEdges: A -") == ErrorKind::MalformedEdge);
  CHECK(parse_error_kind("A: q (Web)\nEdges: -> A") == ErrorKind::MalformedEdge);
  CHECK(parse_error_kind("A: q (Web)\nEdges: A -> A") == ErrorKind::MalformedEdge);
  CHECK(parse_error_kind("A: q (Web)\nB: r (Web)\nC: s (Web)\nEdges: A -> B -> C") ==
        ErrorKind::MalformedEdge);
}

TEST_CASE("serialize: canonical form") {
  SearchPlan single;
  single.nodes.push_back({"A", "x", ToolKind::web, "web"});
  CHECK(serialize_plan(single) == "Nodes:\nA: x (Web)");

  single.nodes.push_back({"B", "y", ToolKind::news, "news"});
  single.edges.push_back({"A", "B"});
  CHECK(serialize_plan(single) == "Nodes:\nA: x (Web)\nB: y (News)\nEdges: A -> B");
}

TEST_CASE("serialize/parse round-trip on the market fixture") {
  SearchPlan plan = parse_plan(fixtures::kMarketPlanText);
  SearchPlan again = parse_plan(serialize_plan(plan));
  CHECK(again.nodes.size() == plan.nodes.size());
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
    CHECK(again.nodes[i].id == plan.nodes[i].id);
    CHECK(again.nodes[i].query == plan.nodes[i].query);
    CHECK(again.nodes[i].tool == plan.nodes[i].tool);
  }
  CHECK(again.edges == plan.edges);
}

TEST_CASE("round-trip property: random structurally valid plans") {
  std::mt19937 rng(20240901);
  std::uniform_int_distribution<int> node_count(1, 8);
  std::uniform_int_distribution<int> word_count(1, 6);
  std::uniform_int_distribution<int> tool_die(0, 3);
  const std::vector<std::string> words = {"alpha",  "beta (x)", "gamma:",  "delta",
                                          "epsilon", "zeta)",    "(eta",    "theta9"};

  for (int iteration = 0; iteration < 300; ++iteration) {
    SearchPlan plan;
    int n = node_count(rng);
    for (int i = 0; i < n; ++i) {
      PlanNode node;
      node.id = oracles::node_label(i);
      int wc = word_count(rng);
      for (int w = 0; w < wc; ++w) {
        if (w > 0) node.query += ' ';
        node.query += words[static_cast<std::size_t>(
            std::uniform_int_distribution<int>(0, static_cast<int>(words.size()) - 1)(rng))];
      }
      switch (tool_die(rng)) {
        case 0: node.tool = ToolKind::news; node.tool_label = "news"; break;
        case 1: node.tool = ToolKind::academic; node.tool_label = "Academic"; break;
        case 2: node.tool = ToolKind::web; node.tool_label = "WEB"; break;
        default: node.tool = std::nullopt; node.tool_label = "Sql"; break;
      }
      plan.nodes.push_back(std::move(node));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && std::uniform_real_distribution<>(0, 1)(rng) < 0.2) {
          plan.edges.push_back({oracles::node_label(i), oracles::node_label(j)});
        }
      }
    }

    SearchPlan again = parse_plan(serialize_plan(plan));
    REQUIRE(again.nodes.size() == plan.nodes.size());
    for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
      CHECK(again.nodes[i].id == plan.nodes[i].id);
      CHECK(again.nodes[i].query == plan.nodes[i].query);
      CHECK(again.nodes[i].tool == plan.nodes[i].tool);
      // label equality modulo case
      std::string a = again.nodes[i].tool_label, b = plan.nodes[i].tool_label;
      std::transform(a.begin(), a.end(), a.begin(), ::tolower);
      std::transform(b.begin(), b.end(), b.begin(), ::tolower);
      CHECK(a == b);
    }
    CHECK(again.edges == plan.edges);
  }
}

TEST_CASE("validate: two-cycle fails acyclicity") {
  SearchPlan plan = parse_plan("A: x (Web)\nB: y (Web)\nEdges: A -> B; B -> A");
  ValidationReport report = validate_plan(plan);
  CHECK(!report.acyclic);
  CHECK(!report.reward_valid);
  CHECK(report.node_format_ok);
  CHECK(report.tools_ok);
}

TEST_CASE("validate: unknown tool is excluded and fails tools_ok") {
  SearchPlan plan = parse_plan("A: x (Twitter)\nB: y (Web)");
  ValidationReport report = validate_plan(plan);
  CHECK(report.excluded_nodes == std::vector<std::string>{"A"});
  CHECK(!report.tools_ok);
  CHECK(!report.reward_valid);
  CHECK(report.acyclic);
}

TEST_CASE("validate: known tool outside the available set is excluded too") {
  SearchPlan plan = parse_plan("A: x (Academic)");
  ValidationReport report = validate_plan(plan, {ToolKind::news, ToolKind::web});
  CHECK(report.excluded_nodes == std::vector<std::string>{"A"});
  CHECK(!report.reward_valid);
}

TEST_CASE("validate: the market fixture is fully valid") {
  SearchPlan plan = parse_plan(fixtures::kMarketPlanText);
  ValidationReport report = validate_plan(plan, all_tools(), 8);
  CHECK(report.acyclic);
  CHECK(report.node_format_ok);
  CHECK(report.tools_ok);
  CHECK(report.node_count_ok);
  CHECK(report.edge_refs_ok);
  CHECK(report.excluded_nodes.empty());
  CHECK(report.reward_valid);
}

TEST_CASE("validate: node budget and edge references") {
  SearchPlan plan;
  for (int i = 0; i < 9; ++i) {
    plan.nodes.push_back({oracles::node_label(i), "q", ToolKind::web, "web"});
  }
  CHECK(!validate_plan(plan, all_tools(), 8).node_count_ok);
  CHECK(!validate_plan(plan, all_tools(), 8).reward_valid);
  CHECK(validate_plan(plan, all_tools(), 9).node_count_ok);

  SearchPlan dangling = parse_plan("A: x (Web)\nEdges: A -> Z");
  ValidationReport report = validate_plan(dangling);
  CHECK(!report.edge_refs_ok);
  CHECK(report.acyclic);  // undeclared endpoints stay out of the cycle check
  CHECK(!report.reward_valid);

  SearchPlan empty;
  CHECK(!validate_plan(empty).node_count_ok);
}

TEST_CASE("validate: acyclicity agrees with the transitive-closure oracle, exhaustively to n=4") {
  for (int n = 1; n <= 4; ++n) {
    unsigned top = 1u << (n * n);
    for (unsigned mask = 0; mask < top; ++mask) {
      oracles::Digraph g = oracles::digraph_from_mask(n, mask);
      SearchPlan plan = oracles::plan_from_digraph(g);
      bool expected = !oracles::has_cycle_transitive_closure(g);
      ValidationReport report = validate_plan(plan, all_tools(), 16);
      if (report.acyclic != expected) {
        CAPTURE(n);
        CAPTURE(mask);
        REQUIRE(report.acyclic == expected);
      }
    }
  }
}

TEST_CASE("topo: join node waits for both parents (levels match all linear extensions)") {
  SearchPlan plan = parse_plan("A: x (Web)\nB: y (Web)\nC: z (Web)\nEdges: A -> C; B -> C");

  // Oracle: enumerate every permutation of {A,B,C}; keep those where all
  // edges point forward. A and B must precede C in each, and both A-before-B
  // and B-before-A must occur, so the only depth assignment is {A,B} then {C}.
  std::vector<std::string> ids = {"A", "B", "C"};
  std::sort(ids.begin(), ids.end());
  int valid = 0;
  bool a_first = false, b_first = false;
  do {
    auto pos = [&](const std::string& x) {
      return std::find(ids.begin(), ids.end(), x) - ids.begin();
    };
    if (pos("A") < pos("C") && pos("B") < pos("C")) {
      ++valid;
      a_first = a_first || pos("A") < pos("B");
      b_first = b_first || pos("B") < pos("A");
    }
  } while (std::next_permutation(ids.begin(), ids.end()));
  REQUIRE(valid == 2);
  REQUIRE(a_first);
  REQUIRE(b_first);

  auto levels = topo_levels(plan);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0] == std::vector<std::string>{"A", "B"});
  CHECK(levels[1] == std::vector<std::string>{"C"});
}

TEST_CASE("topo: chain and edgeless plans") {
  auto chain = topo_levels(parse_plan("A: x (Web)\nB: y (Web)\nC: z (Web)\nEdges: A -> B; B -> C"));
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == std::vector<std::string>{"A"});
  CHECK(chain[1] == std::vector<std::string>{"B"});
  CHECK(chain[2] == std::vector<std::string>{"C"});

  auto flat = topo_levels(parse_plan("A: x (Web)\nB: y (Web)"));
  REQUIRE(flat.size() == 1);
  CHECK(flat[0] == std::vector<std::string>{"A", "B"});
}

TEST_CASE("topo: cycle raises CycleDetected") {
  SearchPlan plan = parse_plan("A: x (Web)\nB: y (Web)\nEdges: A -> B; B -> A");
  CHECK_THROWS_AS(topo_levels(plan), Error);
  try {
    topo_levels(plan);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CycleDetected);
  }
}

TEST_CASE("topo property: levels partition the nodes and form a linear extension") {
  std::mt19937 rng(777);
  for (int iteration = 0; iteration < 300; ++iteration) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    oracles::Digraph g = oracles::random_dag(n, 0.4, rng);
    SearchPlan plan = oracles::plan_from_digraph(g);

    auto levels = topo_levels(plan);
    CHECK(oracles::is_linear_extension(g, levels));

    std::size_t total = 0;
    std::set<std::string> seen;
    for (const auto& level : levels) {
      total += level.size();
      for (const auto& id : level) seen.insert(id);
    }
    CHECK(total == plan.nodes.size());
    CHECK(seen.size() == plan.nodes.size());

    // Levels match brute-force longest-path depths.
    auto depths = oracles::longest_path_depths(g);
    for (int i = 0; i < n; ++i) {
      const std::string id = oracles::node_label(i);
      auto d = static_cast<std::size_t>(depths[static_cast<std::size_t>(i)]);
      REQUIRE(d < levels.size());
      CHECK(std::find(levels[d].begin(), levels[d].end(), id) != levels[d].end());
    }
  }
}
