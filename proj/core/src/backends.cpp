#include "dagsearch/backends.hpp"

#include <cmath>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

class MockBackend final : public SearchBackend {
 public:
  explicit MockBackend(ToolKind tool) : tool_(tool) {}

  std::string name() const override { return "mock-" + std::string(tool_name(tool_)); }

  std::vector<Passage> search(const std::string& query, int k) override {
    std::vector<Passage> out;
    for (int rank = 1; rank <= k; ++rank) {
      std::string key = std::string(tool_name(tool_)) + ":" + query + ":" + std::to_string(rank);
      Passage p;
      p.title = "mock:" + key;
      p.snippet = "Deterministic mock passage " + std::to_string(rank) + " for query '" + query +
                  "' from the " + std::string(tool_name(tool_)) + " source [" + fnv1a_hex(key) + "].";
      p.url = "mock://" + std::string(tool_name(tool_)) + "/" + fnv1a_hex(key);
      p.source_tool = tool_;
      p.rank = rank;
      out.push_back(std::move(p));
    }
    return out;
  }

 private:
  ToolKind tool_;
};

httplib::Client make_client(const std::string& base, const SearchSettings& settings) {
  httplib::Client client(base);
  auto seconds = static_cast<time_t>(settings.timeout_seconds);
  auto micros = static_cast<time_t>((settings.timeout_seconds - std::floor(settings.timeout_seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_follow_location(true);
  return client;
}

void throw_transport(const httplib::Result& res, const std::string& who) {
  if (res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read) {
    throw Error(ErrorKind::Timeout, who + " timed out");
  }
  throw Error(ErrorKind::HttpError, who + " request failed: " + to_string(res.error()));
}

// Minimal Atom feed extraction: <entry> blocks with <title>/<summary>/<id>.
std::vector<Passage> parse_arxiv_atom(const std::string& body, int k) {
  static const std::regex entry_re("<entry>([\\s\\S]*?)</entry>");
  static const std::regex title_re("<title[^>]*>([\\s\\S]*?)</title>");
  static const std::regex summary_re("<summary[^>]*>([\\s\\S]*?)</summary>");
  static const std::regex id_re("<id>([\\s\\S]*?)</id>");

  auto decode = [](std::string s) {
    struct Pair { const char* from; const char* to; };
    static constexpr Pair pairs[] = {{"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""},
                                     {"&#39;", "'"}, {"&apos;", "'"}, {"&amp;", "&"}};
    for (const auto& p : pairs) {
      std::size_t pos = 0;
      while ((pos = s.find(p.from, pos)) != std::string::npos) {
        s.replace(pos, std::strlen(p.from), p.to);
        pos += std::strlen(p.to);
      }
    }
    return s;
  };

  std::vector<Passage> out;
  auto begin = std::sregex_iterator(body.begin(), body.end(), entry_re);
  for (auto it = begin; it != std::sregex_iterator() && static_cast<int>(out.size()) < k; ++it) {
    std::string entry = (*it)[1].str();
    std::smatch m;
    Passage p;
    if (std::regex_search(entry, m, title_re)) p.title = collapse_whitespace(decode(m[1].str()));
    if (std::regex_search(entry, m, summary_re)) p.snippet = collapse_whitespace(decode(m[1].str()));
    if (std::regex_search(entry, m, id_re)) p.url = trim(m[1].str());
    p.source_tool = ToolKind::academic;
    p.rank = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(p));
  }
  return out;
}

class ArxivBackend final : public SearchBackend {
 public:
  ArxivBackend(SearchEndpoints endpoints, SearchSettings settings)
      : endpoints_(std::move(endpoints)), settings_(settings) {}

  std::string name() const override { return "arxiv"; }

  std::vector<Passage> search(const std::string& query, int k) override {
    auto client = make_client(endpoints_.arxiv_base, settings_);
    httplib::Params params{{"search_query", "all:" + query},
                           {"start", "0"},
                           {"max_results", std::to_string(k)}};
    auto res = client.Get("/api/query", params, httplib::Headers{});
    if (!res) throw_transport(res, name());
    if (res->status != 200) {
      throw Error(ErrorKind::HttpError, "arxiv returned status " + std::to_string(res->status),
                  res->status);
    }
    return parse_arxiv_atom(res->body, k);
  }

 private:
  SearchEndpoints endpoints_;
  SearchSettings settings_;
};

class GnewsBackend final : public SearchBackend {
 public:
  GnewsBackend(SearchEndpoints endpoints, SearchSettings settings)
      : endpoints_(std::move(endpoints)), settings_(settings) {}

  std::string name() const override { return "gnews"; }

  std::vector<Passage> search(const std::string& query, int k) override {
    if (endpoints_.gnews_api_key.empty()) {
      throw Error(ErrorKind::AuthMissing, "GNEWS_API_KEY is not configured");
    }
    auto client = make_client(endpoints_.gnews_base, settings_);
    httplib::Params params{{"q", query}, {"max", std::to_string(k)},
                           {"apikey", endpoints_.gnews_api_key}};
    auto res = client.Get("/api/v4/search", params, httplib::Headers{});
    if (!res) throw_transport(res, name());
    if (res->status != 200) {
      throw Error(ErrorKind::HttpError, "gnews returned status " + std::to_string(res->status),
                  res->status);
    }
    std::vector<Passage> out;
    try {
      auto j = nlohmann::json::parse(res->body);
      for (const auto& article : j.value("articles", nlohmann::json::array())) {
        if (static_cast<int>(out.size()) >= k) break;
        Passage p;
        p.title = article.value("title", "");
        p.snippet = article.value("description", "");
        p.url = article.value("url", "");
        p.source_tool = ToolKind::news;
        p.rank = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::HttpError, std::string("malformed gnews response: ") + e.what());
    }
    return out;
  }

 private:
  SearchEndpoints endpoints_;
  SearchSettings settings_;
};

class SerperBackend final : public SearchBackend {
 public:
  SerperBackend(SearchEndpoints endpoints, SearchSettings settings, SerperMode mode)
      : endpoints_(std::move(endpoints)), settings_(settings), mode_(mode) {}

  std::string name() const override {
    return mode_ == SerperMode::news ? "serper-news" : "serper-web";
  }

  std::vector<Passage> search(const std::string& query, int k) override {
    if (endpoints_.serper_api_key.empty()) {
      throw Error(ErrorKind::AuthMissing, "SERPER_API_KEY is not configured");
    }
    auto client = make_client(endpoints_.serper_base, settings_);
    nlohmann::json body = {{"q", query}, {"num", k}};
    httplib::Headers headers{{"X-API-KEY", endpoints_.serper_api_key}};
    const char* path = mode_ == SerperMode::news ? "/news" : "/search";
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw_transport(res, name());
    if (res->status != 200) {
      throw Error(ErrorKind::HttpError,
                  name() + " returned status " + std::to_string(res->status), res->status);
    }
    std::vector<Passage> out;
    try {
      auto j = nlohmann::json::parse(res->body);
      const char* list_key = mode_ == SerperMode::news ? "news" : "organic";
      for (const auto& item : j.value(list_key, nlohmann::json::array())) {
        if (static_cast<int>(out.size()) >= k) break;
        Passage p;
        p.title = item.value("title", "");
        p.snippet = item.value("snippet", "");
        p.url = item.value("link", "");
        p.source_tool = mode_ == SerperMode::news ? ToolKind::news : ToolKind::web;
        p.rank = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::HttpError, std::string("malformed serper response: ") + e.what());
    }
    return out;
  }

 private:
  SearchEndpoints endpoints_;
  SearchSettings settings_;
  SerperMode mode_;
};

}  // namespace

std::shared_ptr<SearchBackend> make_mock_backend(ToolKind tool) {
  return std::make_shared<MockBackend>(tool);
}

std::shared_ptr<SearchBackend> make_arxiv_backend(const SearchEndpoints& endpoints,
                                                  const SearchSettings& settings) {
  return std::make_shared<ArxivBackend>(endpoints, settings);
}

std::shared_ptr<SearchBackend> make_gnews_backend(const SearchEndpoints& endpoints,
                                                  const SearchSettings& settings) {
  return std::make_shared<GnewsBackend>(endpoints, settings);
}

std::shared_ptr<SearchBackend> make_serper_backend(const SearchEndpoints& endpoints,
                                                   const SearchSettings& settings, SerperMode mode) {
  return std::make_shared<SerperBackend>(endpoints, settings, mode);
}

BackendRegistry::BackendRegistry(SearchSettings settings, std::map<ToolKind, Chain> chains)
    : settings_(settings), chains_(std::move(chains)) {
  for (ToolKind tool : all_tools()) {
    if (!chains_.contains(tool) || chains_.at(tool).empty()) {
      throw Error(ErrorKind::ConfigInvalid,
                  "registry is missing a backend for tool '" + std::string(tool_name(tool)) + "'");
    }
  }
}

BackendRegistry BackendRegistry::mock(SearchSettings settings) {
  std::map<ToolKind, Chain> chains;
  for (ToolKind tool : all_tools()) chains[tool] = {make_mock_backend(tool)};
  return BackendRegistry(settings, std::move(chains));
}

BackendRegistry BackendRegistry::live(const SearchEndpoints& endpoints, SearchSettings settings) {
  std::map<ToolKind, Chain> chains;
  chains[ToolKind::academic] = {make_arxiv_backend(endpoints, settings)};
  chains[ToolKind::news] = {make_gnews_backend(endpoints, settings),
                            make_serper_backend(endpoints, settings, SerperMode::news)};
  chains[ToolKind::web] = {make_serper_backend(endpoints, settings, SerperMode::web)};
  return BackendRegistry(settings, std::move(chains));
}

const BackendRegistry::Chain& BackendRegistry::chain(ToolKind tool) const {
  return chains_.at(tool);
}

}  // namespace dagsearch
