#include <doctest.h>

#include <random>

#include "dagsearch/errors.hpp"
#include "dagsearch/exec.hpp"
#include "dagsearch/strings.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/stubs.hpp"

using namespace dagsearch;

namespace {

BackendRegistry registry_with_news_chain(BackendRegistry::Chain news_chain,
                                         SearchSettings settings = {}) {
  std::map<ToolKind, BackendRegistry::Chain> chains;
  chains[ToolKind::news] = std::move(news_chain);
  chains[ToolKind::academic] = {make_mock_backend(ToolKind::academic)};
  chains[ToolKind::web] = {make_mock_backend(ToolKind::web)};
  return BackendRegistry(settings, std::move(chains));
}

}  // namespace

TEST_CASE("fetch: mock backend is deterministic and honors k") {
  BackendRegistry registry = BackendRegistry::mock();
  auto passages = fetch(ToolKind::news, "coke price early October 2024", 2, registry);
  REQUIRE(passages.size() == 2);
  CHECK(passages[0].title == "mock:news:coke price early October 2024:1");
  CHECK(passages[1].title == "mock:news:coke price early October 2024:2");
  CHECK(passages[0].rank == 1);
  CHECK(passages[1].rank == 2);

  auto again = fetch(ToolKind::news, "coke price early October 2024", 2, registry);
  CHECK(passages == again);
}

TEST_CASE("fetch: news falls back when the primary returns nothing") {
  auto empty_primary = std::make_shared<stubs::FixedBackend>("empty", std::vector<Passage>{});
  auto fallback = std::make_shared<stubs::FixedBackend>(
      "fallback", std::vector<Passage>{stubs::passage("fb", "from fallback", ToolKind::news, 1)});
  BackendRegistry registry = registry_with_news_chain({empty_primary, fallback});

  auto passages = fetch(ToolKind::news, "q", 2, registry);
  REQUIRE(passages.size() == 1);
  CHECK(passages[0].title == "fb");
  CHECK(empty_primary->calls >= 1);
  CHECK(fallback->calls == 1);
}

TEST_CASE("fetch: news falls back when the primary errors; retries happen first") {
  SearchSettings settings;
  settings.retries = 1;
  auto broken = std::make_shared<stubs::ThrowingBackend>("broken", ErrorKind::HttpError);
  auto fallback = std::make_shared<stubs::FixedBackend>(
      "fallback", std::vector<Passage>{stubs::passage("fb", "s", ToolKind::news, 1)});
  BackendRegistry registry = registry_with_news_chain({broken, fallback}, settings);

  auto passages = fetch(ToolKind::news, "q", 2, registry);
  REQUIRE(passages.size() == 1);
  CHECK(broken->calls == 2);  // first try + one retry
  CHECK(fallback->calls == 1);
}

TEST_CASE("fetch: every backend failing raises AllBackendsFailed for a chain") {
  auto b1 = std::make_shared<stubs::ThrowingBackend>("b1", ErrorKind::Timeout);
  auto b2 = std::make_shared<stubs::ThrowingBackend>("b2", ErrorKind::HttpError);
  BackendRegistry registry = registry_with_news_chain({b1, b2});
  try {
    fetch(ToolKind::news, "q", 2, registry);
    FAIL("expected AllBackendsFailed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllBackendsFailed);
  }
}

TEST_CASE("fetch: a sole backend's error propagates unchanged") {
  auto sole = std::make_shared<stubs::ThrowingBackend>("sole", ErrorKind::Timeout);
  BackendRegistry registry = registry_with_news_chain({sole});
  try {
    fetch(ToolKind::news, "q", 2, registry);
    FAIL("expected Timeout");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Timeout);
  }
}

TEST_CASE("fetch: AuthMissing is not retried") {
  SearchSettings settings;
  settings.retries = 3;
  auto keyless = std::make_shared<stubs::ThrowingBackend>("keyless", ErrorKind::AuthMissing);
  BackendRegistry registry = registry_with_news_chain({keyless}, settings);
  CHECK_THROWS_AS(fetch(ToolKind::news, "q", 2, registry), Error);
  CHECK(keyless->calls == 1);
}

TEST_CASE("fetch: snippets truncate at the per-passage cap") {
  SearchSettings settings;
  settings.snippet_max_chars = 10;
  auto longform = std::make_shared<stubs::FixedBackend>(
      "long", std::vector<Passage>{
                  stubs::passage("t", std::string(500, 'x'), ToolKind::news, 1)});
  BackendRegistry registry = registry_with_news_chain({longform}, settings);
  auto passages = fetch(ToolKind::news, "q", 1, registry);
  CHECK(passages[0].snippet.size() == 10);
}

TEST_CASE("live HTTP backends parse their providers' response shapes") {
  stubs::LocalHttpServer server;
  // Handlers run on the server thread: no test assertions in here. Wrong
  // credentials get a 401, which the client side surfaces as HttpError.
  server.server().Get("/api/v4/search", [](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("apikey") != "gk") {
      res.status = 401;
      return;
    }
    res.set_content(R"({"articles":[{"title":"n1","description":"d1","url":"u1"},)"
                    R"({"title":"n2","description":"d2","url":"u2"},)"
                    R"({"title":"n3","description":"d3","url":"u3"}]})",
                    "application/json");
  });
  server.server().Post("/news", [](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("X-API-KEY") != "sk") {
      res.status = 401;
      return;
    }
    res.set_content(R"({"news":[{"title":"sn","snippet":"ss","link":"sl"}]})", "application/json");
  });
  server.server().Post("/search", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"organic":[{"title":"w1","snippet":"ws","link":"wl"}]})",
                    "application/json");
  });
  server.server().Get("/api/query", [](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("max_results") != "2") {
      res.status = 400;
      return;
    }
    res.set_content("<feed><entry><title>paper one</title><summary>abstract &amp; more</summary>"
                    "<id>http://example.org/abs/1</id></entry>"
                    "<entry><title>paper two</title><summary>s2</summary>"
                    "<id>http://example.org/abs/2</id></entry></feed>",
                    "application/atom+xml");
  });
  server.start();

  SearchEndpoints endpoints;
  endpoints.arxiv_base = server.base_url();
  endpoints.gnews_base = server.base_url();
  endpoints.serper_base = server.base_url();
  endpoints.gnews_api_key = "gk";
  endpoints.serper_api_key = "sk";
  SearchSettings settings;
  settings.timeout_seconds = 5.0;

  auto gnews = make_gnews_backend(endpoints, settings);
  auto via_gnews = gnews->search("q", 2);
  REQUIRE(via_gnews.size() == 2);  // backend returns its page; fetch() caps at k
  CHECK(via_gnews[0].title == "n1");
  CHECK(via_gnews[0].source_tool == ToolKind::news);

  auto serper_news = make_serper_backend(endpoints, settings, SerperMode::news);
  auto via_serper = serper_news->search("q", 2);
  REQUIRE(via_serper.size() == 1);
  CHECK(via_serper[0].title == "sn");

  auto serper_web = make_serper_backend(endpoints, settings, SerperMode::web);
  CHECK(serper_web->search("q", 2)[0].title == "w1");

  auto arxiv = make_arxiv_backend(endpoints, settings);
  auto papers = arxiv->search("transformers", 2);
  REQUIRE(papers.size() == 2);
  CHECK(papers[0].title == "paper one");
  CHECK(papers[0].snippet == "abstract & more");
  CHECK(papers[0].source_tool == ToolKind::academic);
}

TEST_CASE("live HTTP backends: missing keys fail fast; arXiv needs none") {
  stubs::LocalHttpServer server;
  server.server().Get("/api/query", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<feed><entry><title>t</title><summary>s</summary>"
                    "<id>u</id></entry></feed>",
                    "application/atom+xml");
  });
  server.start();

  SearchEndpoints endpoints;
  endpoints.arxiv_base = server.base_url();
  SearchSettings settings;

  auto gnews = make_gnews_backend(endpoints, settings);
  try {
    gnews->search("q", 2);
    FAIL("expected AuthMissing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AuthMissing);
  }

  auto arxiv = make_arxiv_backend(endpoints, settings);
  CHECK(arxiv->search("q", 1).size() == 1);
}

TEST_CASE("live HTTP backends: non-200 statuses surface as HttpError") {
  stubs::LocalHttpServer server;
  server.server().Post("/search", [](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
    res.set_content("slow down", "text/plain");
  });
  server.start();

  SearchEndpoints endpoints;
  endpoints.serper_base = server.base_url();
  endpoints.serper_api_key = "sk";
  auto serper = make_serper_backend(endpoints, {}, SerperMode::web);
  try {
    serper->search("q", 1);
    FAIL("expected HttpError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HttpError);
    CHECK(e.http_status() == 429);
  }
}

TEST_CASE("execute_plan: market fixture with mock backends") {
  SearchPlan plan = parse_plan(fixtures::kMarketPlanText);
  ValidationReport report = validate_plan(plan);
  BackendRegistry registry = BackendRegistry::mock();

  ExecutionTrace trace = execute_plan(plan, report, registry, 2);
  REQUIRE(trace.levels.size() == 2);
  CHECK(trace.levels[0] == std::vector<std::string>{"A", "B"});
  CHECK(trace.levels[1] == std::vector<std::string>{"C"});

  std::size_t total_passages = 0;
  for (const auto& r : trace.node_results) total_passages += r.passages.size();
  CHECK(total_passages == 6);
  CHECK(trace.result_block.rfind("Node A (news) Search results:", 0) == 0);
  CHECK(trace.node_results.size() == 3);
  CHECK(trace.node_results[0].node_id == "A");
  CHECK(trace.node_results[1].node_id == "B");
  CHECK(trace.node_results[2].node_id == "C");
}

TEST_CASE("execute_plan: deterministic across parallelism limits and runs") {
  std::string text = "A: alpha (Web)\nB: beta (News)\nC: gamma (Academic)\nD: delta (Web)";
  SearchPlan plan = parse_plan(text);
  ValidationReport report = validate_plan(plan);

  std::string reference;
  for (int parallelism = 1; parallelism <= 8; ++parallelism) {
    SearchSettings settings;
    settings.parallelism = parallelism;
    BackendRegistry registry = BackendRegistry::mock(settings);
    ExecutionTrace trace = execute_plan(plan, report, registry, 2);
    if (reference.empty()) {
      reference = trace.result_block;
    } else {
      CHECK(trace.result_block == reference);
    }
  }

  // sequential-execution oracle: run the fetches one by one in level order
  // and assemble; must be byte-identical to the concurrent path
  BackendRegistry registry = BackendRegistry::mock();
  std::vector<NodeResult> sequential;
  for (const auto& level : topo_levels(plan)) {
    for (const auto& id : level) {
      const PlanNode* node = plan.find_node(id);
      NodeResult r;
      r.node_id = node->id;
      r.query = node->query;
      r.tool_label = std::string(tool_name(*node->tool));
      r.passages = fetch(*node->tool, node->query, 2, registry);
      r.status = r.passages.empty() ? NodeStatus::empty : NodeStatus::ok;
      sequential.push_back(std::move(r));
    }
  }
  CHECK(assemble_results(plan, sequential) == reference);
}

TEST_CASE("execute_plan: a failing node is isolated and reported in brackets") {
  SearchPlan plan = parse_plan("A: good query (News)\nB: bad FAIL query (News)");
  ValidationReport report = validate_plan(plan);

  auto inner = make_mock_backend(ToolKind::news);
  auto selective = std::make_shared<stubs::SelectiveBackend>(inner, "FAIL");
  SearchSettings settings;
  settings.retries = 0;
  BackendRegistry registry = registry_with_news_chain({selective}, settings);

  ExecutionTrace trace = execute_plan(plan, report, registry, 2);
  REQUIRE(trace.node_results.size() == 2);
  CHECK(trace.node_results[0].status == NodeStatus::ok);
  CHECK(trace.node_results[1].status == NodeStatus::failed);
  CHECK(trace.result_block.find("[search failed:") != std::string::npos);

  // isolation: node A's passages match an all-good run
  BackendRegistry clean = registry_with_news_chain({inner}, settings);
  ExecutionTrace good = execute_plan(plan, report, clean, 2);
  CHECK(trace.node_results[0].passages == good.node_results[0].passages);
}

TEST_CASE("execute_plan: excluded nodes keep their slot and are never fetched") {
  SearchPlan plan = parse_plan("A: x (Twitter)\nB: y (News)\nEdges: A -> B");
  ValidationReport report = validate_plan(plan);
  REQUIRE(report.excluded_nodes == std::vector<std::string>{"A"});

  auto counting = std::make_shared<stubs::FixedBackend>(
      "news", std::vector<Passage>{stubs::passage("t", "s", ToolKind::news, 1)});
  BackendRegistry registry = registry_with_news_chain({counting});

  ExecutionTrace trace = execute_plan(plan, report, registry, 2);
  REQUIRE(trace.node_results.size() == 2);
  CHECK(trace.node_results[0].status == NodeStatus::excluded);
  CHECK(trace.node_results[0].passages.empty());
  CHECK(trace.node_results[1].status == NodeStatus::ok);
  CHECK(counting->calls == 1);  // only node B
  CHECK(trace.result_block.find("Node A (twitter) Search results:") != std::string::npos);
  CHECK(trace.result_block.find("[excluded from execution") != std::string::npos);
}

TEST_CASE("execute_plan: cyclic plans are refused") {
  SearchPlan plan = parse_plan("A: x (Web)\nB: y (Web)\nEdges: A -> B; B -> A");
  ValidationReport report = validate_plan(plan);
  BackendRegistry registry = BackendRegistry::mock();
  CHECK_THROWS_AS(execute_plan(plan, report, registry, 2), Error);
}

TEST_CASE("execute_plan: passage budget is k per non-excluded node") {
  std::mt19937 rng(31);
  for (int iteration = 0; iteration < 20; ++iteration) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    oracles::Digraph g = oracles::random_dag(n, 0.3, rng);
    SearchPlan plan = oracles::plan_from_digraph(g);
    ValidationReport report = validate_plan(plan);
    BackendRegistry registry = BackendRegistry::mock();
    int k = std::uniform_int_distribution<int>(1, 3)(rng);
    ExecutionTrace trace = execute_plan(plan, report, registry, k);
    std::size_t total = 0;
    for (const auto& r : trace.node_results) total += r.passages.size();
    CHECK(total <= static_cast<std::size_t>(k) * plan.nodes.size());
  }
}

TEST_CASE("assemble_results: block layout fixtures") {
  SearchPlan plan = parse_plan("A: q (News)");
  NodeResult ok;
  ok.node_id = "A";
  ok.tool_label = "news";
  ok.query = "q";
  ok.passages = {stubs::passage("The Title", "The abstract.", ToolKind::news, 1)};
  ok.status = NodeStatus::ok;
  CHECK(assemble_results(plan, {ok}) ==
        "Node A (news) Search results:\n\nResult 1:\n\nTitle: The Title\n\nAbstract: The abstract.");

  NodeResult empty;
  empty.node_id = "A";
  empty.tool_label = "news";
  empty.query = "q";
  empty.status = NodeStatus::empty;
  CHECK(assemble_results(plan, {empty}) == "Node A (news) Search results:\n\n[no results]");

  // execution order is the caller's order
  NodeResult b = ok;
  b.node_id = "B";
  std::string block = assemble_results(plan, {b, ok});
  CHECK(block.find("Node B") < block.find("Node A"));
}

TEST_CASE("token economy: canonical text beats the key/value rendering on every fixture plan") {
  std::mt19937 rng(6060);
  for (int nodes = 1; nodes <= 8; ++nodes) {
    for (int variant = 0; variant < 3; ++variant) {
      SearchPlan plan;
      for (int i = 0; i < nodes; ++i) {
        PlanNode node;
        node.id = oracles::node_label(i);
        int words = std::uniform_int_distribution<int>(2, 9)(rng);
        for (int w = 0; w < words; ++w) {
          if (w > 0) node.query += ' ';
          node.query += "term" + std::to_string(std::uniform_int_distribution<int>(0, 99)(rng));
        }
        node.tool = ToolKind::news;
        node.tool_label = "news";
        plan.nodes.push_back(std::move(node));
      }
      for (int i = 1; i < nodes; ++i) {
        if (std::bernoulli_distribution(0.5)(rng)) {
          plan.edges.push_back({oracles::node_label(i - 1), oracles::node_label(i)});
        }
      }

      std::string text = serialize_plan(plan);
      std::string structured = structured_plan_json(plan);
      CHECK(text.size() < structured.size());
      CHECK(count_tokens(text) < count_tokens(structured));
    }
  }
}
