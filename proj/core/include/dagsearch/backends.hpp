#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dagsearch/plan.hpp"

namespace dagsearch {

/// One retrieved passage.
struct Passage {
  std::string title;
  std::string snippet;
  std::string url;
  ToolKind source_tool = ToolKind::web;
  int rank = 1;  // 1-based retrieval rank

  bool operator==(const Passage&) const = default;
};

/// A single search endpoint. Implementations must be callable from
/// concurrent tasks. Errors surface as Error with kinds Timeout,
/// HttpError or AuthMissing; zero results are a normal empty return.
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Passage> search(const std::string& query, int k) = 0;
};

struct SearchSettings {
  double timeout_seconds = 10.0;
  int retries = 1;                   // extra attempts per backend after the first
  int parallelism = 4;               // concurrent fetches within a topo level
  std::size_t snippet_max_chars = 600;
};

/// Live endpoint wiring. Base URLs are overridable so tests can point the
/// clients at local stand-ins.
struct SearchEndpoints {
  std::string arxiv_base = "http://export.arxiv.org";
  std::string gnews_base = "https://gnews.io";
  std::string serper_base = "https://google.serper.dev";
  std::string gnews_api_key;   // env GNEWS_API_KEY
  std::string serper_api_key;  // env SERPER_API_KEY
};

/// Deterministic in-process backend: passage fields are pure functions of
/// (tool, query, rank). No network.
std::shared_ptr<SearchBackend> make_mock_backend(ToolKind tool);

std::shared_ptr<SearchBackend> make_arxiv_backend(const SearchEndpoints& endpoints,
                                                  const SearchSettings& settings);
std::shared_ptr<SearchBackend> make_gnews_backend(const SearchEndpoints& endpoints,
                                                  const SearchSettings& settings);

enum class SerperMode { web, news };
std::shared_ptr<SearchBackend> make_serper_backend(const SearchEndpoints& endpoints,
                                                   const SearchSettings& settings, SerperMode mode);

/// Maps every tool to its backend chain: the primary endpoint first,
/// fallbacks after it (news falls back from GNews to Serper news mode).
class BackendRegistry {
 public:
  using Chain = std::vector<std::shared_ptr<SearchBackend>>;

  BackendRegistry(SearchSettings settings, std::map<ToolKind, Chain> chains);

  /// All three tools served by deterministic mock backends.
  static BackendRegistry mock(SearchSettings settings = {});

  /// arXiv for academic, GNews with Serper-news fallback for news,
  /// Serper web mode for web.
  static BackendRegistry live(const SearchEndpoints& endpoints, SearchSettings settings = {});

  const SearchSettings& settings() const { return settings_; }
  const Chain& chain(ToolKind tool) const;

 private:
  SearchSettings settings_;
  std::map<ToolKind, Chain> chains_;
};

}  // namespace dagsearch
