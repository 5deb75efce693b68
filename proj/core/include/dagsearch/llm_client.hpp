#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dagsearch {

struct ChatOptions {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::vector<std::string> stop;
};

struct ChatResult {
  std::string content;
  bool stopped = false;    // a stop sequence ended the generation
  bool truncated = false;  // the token limit ended it
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

/// Chat-completions style endpoint. One implementation speaks HTTP; tests
/// and offline runs use scripted replies.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResult complete(const std::string& prompt, const ChatOptions& options) = 0;
};

/// Client for an OpenAI-compatible /v1/chat/completions endpoint.
/// Transport failures surface as Error(kind) with `kind` describing the
/// failure class passed at construction (judge vs policy vs generator).
class HttpChatClient final : public ChatClient {
 public:
  /// `base_url` like "http://host:port" or "https://host"; the path
  /// "/v1/chat/completions" is appended. The key goes into the
  /// Authorization header and never into error messages.
  HttpChatClient(std::string base_url, std::string api_key, double timeout_seconds = 60.0);

  ChatResult complete(const std::string& prompt, const ChatOptions& options) override;

 private:
  std::string base_url_;
  std::string api_key_;
  double timeout_seconds_;
};

/// Replays a fixed sequence of replies; after the last one, keeps
/// returning it. Used for judge/checker stubs.
class StubChatClient final : public ChatClient {
 public:
  explicit StubChatClient(std::vector<std::string> replies);

  ChatResult complete(const std::string& prompt, const ChatOptions& options) override;

  const std::vector<std::string>& prompts_seen() const { return prompts_seen_; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_seen_;
};

}  // namespace dagsearch
