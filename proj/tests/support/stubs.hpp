#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "dagsearch/backends.hpp"
#include "dagsearch/errors.hpp"

namespace stubs {

// Backend returning canned passages; counts calls.
class FixedBackend final : public dagsearch::SearchBackend {
 public:
  FixedBackend(std::string name, std::vector<dagsearch::Passage> passages)
      : name_(std::move(name)), passages_(std::move(passages)) {}

  std::string name() const override { return name_; }

  std::vector<dagsearch::Passage> search(const std::string&, int k) override {
    ++calls;
    auto out = passages_;
    if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
    return out;
  }

  std::atomic<int> calls{0};

 private:
  std::string name_;
  std::vector<dagsearch::Passage> passages_;
};

class ThrowingBackend final : public dagsearch::SearchBackend {
 public:
  ThrowingBackend(std::string name, dagsearch::ErrorKind kind) : name_(std::move(name)), kind_(kind) {}

  std::string name() const override { return name_; }

  std::vector<dagsearch::Passage> search(const std::string&, int) override {
    ++calls;
    throw dagsearch::Error(kind_, name_ + " always fails");
  }

  std::atomic<int> calls{0};

 private:
  std::string name_;
  dagsearch::ErrorKind kind_;
};

// Backend failing only for queries containing a marker substring.
class SelectiveBackend final : public dagsearch::SearchBackend {
 public:
  SelectiveBackend(std::shared_ptr<dagsearch::SearchBackend> inner, std::string marker)
      : inner_(std::move(inner)), marker_(std::move(marker)) {}

  std::string name() const override { return inner_->name(); }

  std::vector<dagsearch::Passage> search(const std::string& query, int k) override {
    if (query.find(marker_) != std::string::npos) {
      throw dagsearch::Error(dagsearch::ErrorKind::Timeout, "selective failure");
    }
    return inner_->search(query, k);
  }

 private:
  std::shared_ptr<dagsearch::SearchBackend> inner_;
  std::string marker_;
};

inline dagsearch::Passage passage(const std::string& title, const std::string& snippet,
                                  dagsearch::ToolKind tool, int rank) {
  dagsearch::Passage p;
  p.title = title;
  p.snippet = snippet;
  p.url = "stub://" + title;
  p.source_tool = tool;
  p.rank = rank;
  return p;
}

// In-process HTTP server on an ephemeral port.
class LocalHttpServer {
 public:
  LocalHttpServer() = default;

  ~LocalHttpServer() { stop(); }

  httplib::Server& server() { return server_; }

  int start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace stubs
