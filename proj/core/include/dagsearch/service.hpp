#pragma once

#include <memory>
#include <string>

#include "dagsearch/config.hpp"

namespace dagsearch {

/// HTTP surface over the engine:
///   POST /v1/plan/parse     {"text"}                     -> {"plan", "canonical"}
///   POST /v1/plan/validate  {"text"|"plan", "max_nodes"?, "tools"?} -> {"plan", "report"}
///   POST /v1/plan/execute   {"text"|"plan", "k"?}        -> {"trace"}
///   POST /v1/reward/score   {"text", "gold"}             -> {"reward"}
///   POST /v1/rollout        {"query", "gold", "group"?}  -> {"record"} | {"group"}
///   GET  /healthz                                        -> "ok"
/// Domain failures return 400 with {"error": {"kind", "message"}}.
class Service {
 public:
  explicit Service(EngineConfig config);
  ~Service();
  Service(Service&&) noexcept;
  Service& operator=(Service&&) noexcept;

  /// Binds and serves on a background thread; port 0 picks an ephemeral
  /// port. Returns the bound port. Throws Error(BindFailure).
  int start(const std::string& host, int port);

  /// Blocking serve, for the CLI.
  void run(const std::string& host, int port);

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dagsearch
