#include "dagsearch/llm_client.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "dagsearch/errors.hpp"

namespace dagsearch {

HttpChatClient::HttpChatClient(std::string base_url, std::string api_key, double timeout_seconds)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {}

ChatResult HttpChatClient::complete(const std::string& prompt, const ChatOptions& options) {
  if (base_url_.empty()) {
    throw Error(ErrorKind::PolicyUnreachable, "chat endpoint base URL is not configured");
  }
  httplib::Client client(base_url_);
  auto seconds = static_cast<time_t>(timeout_seconds_);
  auto micros = static_cast<time_t>((timeout_seconds_ - std::floor(timeout_seconds_)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);

  nlohmann::json body = {
      {"model", options.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", options.temperature},
      {"max_tokens", options.max_tokens},
  };
  if (!options.stop.empty()) body["stop"] = options.stop;

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::PolicyUnreachable, "chat endpoint unreachable: " + to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::HttpError, "chat endpoint returned status " + std::to_string(res->status),
                res->status);
  }

  ChatResult out;
  try {
    auto j = nlohmann::json::parse(res->body);
    const auto& choice = j.at("choices").at(0);
    out.content = choice.at("message").at("content").get<std::string>();
    std::string finish = choice.value("finish_reason", "");
    out.stopped = finish == "stop";
    out.truncated = finish == "length";
    if (j.contains("usage")) {
      out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      out.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::HttpError, std::string("malformed chat completion response: ") + e.what());
  }
  return out;
}

StubChatClient::StubChatClient(std::vector<std::string> replies) : replies_(std::move(replies)) {
  if (replies_.empty()) replies_.push_back("");
}

ChatResult StubChatClient::complete(const std::string& prompt, const ChatOptions&) {
  prompts_seen_.push_back(prompt);
  const std::string& reply = replies_[std::min(next_, replies_.size() - 1)];
  if (next_ + 1 < replies_.size()) ++next_;
  ChatResult out;
  out.content = reply;
  out.stopped = true;
  return out;
}

}  // namespace dagsearch
