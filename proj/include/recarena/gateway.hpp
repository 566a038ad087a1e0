#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "recarena/json_util.hpp"
#include "recarena/rng.hpp"

namespace recarena {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

inline void to_json(Json& j, const ChatMessage& m) {
  j = Json{{"role", m.role}, {"content", m.content}};
}

inline void from_json(const Json& j, ChatMessage& m) {
  m.role = j.at("role").get<std::string>();
  m.content = j.at("content").get<std::string>();
}

struct ChatRequest {
  std::string model = "default";
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1024;
};

struct ChatResponse {
  std::string text;
  std::string finish_reason = "stop";
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int retry_count = 0;
};

inline Json canonical_request_json(const ChatRequest& r) {
  return Json{{"model", r.model},
              {"messages", r.messages},
              {"temperature", r.temperature},
              {"top_p", r.top_p},
              {"max_tokens", r.max_tokens}};
}

inline std::string request_hash(const ChatRequest& r) {
  std::ostringstream os;
  os << std::hex << fnv1a64(canonical_request_json(r).dump());
  return os.str();
}

class GatewayError : public std::runtime_error {
 public:
  GatewayError(const std::string& msg, bool retryable)
      : std::runtime_error(msg), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend: deterministic test double. Responses come from keyed
// substring matches against the last user message, then a FIFO queue, then a
// default. Scheduled failures fire before anything else.
class ScriptedBackend : public ChatBackend {
 public:
  void enqueue(std::string response) { queue_.push_back(std::move(response)); }
  void on_contains(std::string needle, std::string response) {
    keyed_.emplace_back(std::move(needle), std::move(response));
  }
  void set_default(std::string response) { default_ = std::move(response); }
  void fail_next(int n, bool retryable = true) {
    fail_count_ = n;
    fail_retryable_ = retryable;
  }

  const std::vector<ChatRequest>& calls() const { return calls_; }

  ChatResponse complete(const ChatRequest& request) override {
    calls_.push_back(request);
    if (fail_count_ > 0) {
      --fail_count_;
      throw GatewayError("scripted failure", fail_retryable_);
    }
    std::string prompt;
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
      if (it->role == "user") {
        prompt = it->content;
        break;
      }
    }
    for (const auto& [needle, response] : keyed_) {
      if (prompt.find(needle) != std::string::npos) return make(response);
    }
    if (!queue_.empty()) {
      std::string r = std::move(queue_.front());
      queue_.pop_front();
      return make(r);
    }
    if (default_) return make(*default_);
    throw GatewayError("scripted backend has no response for request", false);
  }

  std::string name() const override { return "script"; }

  // Script file: JSONL of {"match": "...", "response": "..."} for keyed
  // entries, {"response": "..."} for queued ones, {"default": "..."}.
  static ScriptedBackend load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open chat script: " + path);
    ScriptedBackend b;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json j = Json::parse(line);
      if (j.contains("default")) {
        b.set_default(j.at("default").get<std::string>());
      } else if (j.contains("match")) {
        b.on_contains(j.at("match").get<std::string>(), j.at("response").get<std::string>());
      } else {
        b.enqueue(j.at("response").get<std::string>());
      }
    }
    return b;
  }

 private:
  ChatResponse make(const std::string& text) const {
    ChatResponse r;
    r.text = text;
    r.completion_tokens = int(text.size() / 4);
    return r;
  }

  std::deque<std::string> queue_;
  std::vector<std::pair<std::string, std::string>> keyed_;
  std::optional<std::string> default_;
  int fail_count_ = 0;
  bool fail_retryable_ = true;
  std::vector<ChatRequest> calls_;
};

// ---------------------------------------------------------------------------
// Replay backend: deterministic playback of a recorded request->response log,
// keyed by request hash. A miss is a hard error.
class ReplayBackend : public ChatBackend {
 public:
  static ReplayBackend load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open replay log: " + path);
    ReplayBackend b;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json j = Json::parse(line);
      b.responses_[j.at("request_hash").get<std::string>()] =
          j.at("response_text").get<std::string>();
    }
    return b;
  }

  void add(const std::string& hash, std::string response) {
    responses_[hash] = std::move(response);
  }

  ChatResponse complete(const ChatRequest& request) override {
    const std::string h = request_hash(request);
    auto it = responses_.find(h);
    if (it == responses_.end())
      throw GatewayError("replay miss for request hash " + h, false);
    ChatResponse r;
    r.text = it->second;
    return r;
  }

  std::string name() const override { return "replay"; }

 private:
  std::map<std::string, std::string> responses_;
};

// Wraps a live backend and appends {request_hash, response_text} JSONL
// records, producing a log that ReplayBackend can play back.
class RecordingBackend : public ChatBackend {
 public:
  RecordingBackend(ChatBackend& inner, const std::string& log_path)
      : inner_(inner), out_(log_path, std::ios::app) {
    if (!out_) throw std::runtime_error("cannot open replay log for write: " + log_path);
  }

  ChatResponse complete(const ChatRequest& request) override {
    ChatResponse r = inner_.complete(request);
    std::lock_guard<std::mutex> lock(mu_);
    out_ << Json{{"request_hash", request_hash(request)}, {"response_text", r.text}}.dump()
         << "\n";
    out_.flush();
    return r;
  }

  std::string name() const override { return "recording(" + inner_.name() + ")"; }

 private:
  ChatBackend& inner_;
  std::ofstream out_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// HTTP backend speaking the JSON chat-completion protocol:
// POST {model, messages, temperature, top_p, max_tokens} ->
// {choices: [{message: {content}}], usage}.
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(std::string base_url, std::string path = "/v1/chat/completions")
      : base_url_(std::move(base_url)), path_(std::move(path)) {}

  ChatResponse complete(const ChatRequest& request) override {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    auto res = client.Post(path_, canonical_request_json(request).dump(), "application/json");
    if (!res) throw GatewayError("transport error: " + httplib::to_string(res.error()), true);
    if (res->status >= 500)
      throw GatewayError("server error " + std::to_string(res->status), true);
    if (res->status != 200)
      throw GatewayError("request rejected with status " + std::to_string(res->status), false);
    Json j = Json::parse(res->body);
    const auto& choices = j.at("choices");
    if (choices.empty()) throw GatewayError("response has no choices", false);
    ChatResponse r;
    r.text = choices.at(0).at("message").at("content").get<std::string>();
    r.finish_reason = get_or<std::string>(choices.at(0), "finish_reason", "stop");
    if (j.contains("usage")) {
      r.prompt_tokens = get_or<int>(j.at("usage"), "prompt_tokens", 0);
      r.completion_tokens = get_or<int>(j.at("usage"), "completion_tokens", 0);
    }
    return r;
  }

  std::string name() const override { return "http(" + base_url_ + ")"; }

 private:
  std::string base_url_;
  std::string path_;
};

// ---------------------------------------------------------------------------

struct RetryPolicy {
  int max_retries = 3;
  int base_delay_ms = 100;  // doubles per retry; 0 disables sleeping in tests
};

// Completion with at-most-max_retries retries on retryable (transport)
// errors, exponential backoff between attempts.
inline ChatResponse llm_chat(const ChatRequest& request, ChatBackend& backend,
                             const RetryPolicy& policy = {}) {
  int attempt = 0;
  for (;;) {
    try {
      ChatResponse r = backend.complete(request);
      r.retry_count = attempt;
      return r;
    } catch (const GatewayError& e) {
      if (!e.retryable() || attempt >= policy.max_retries) throw;
      if (policy.base_delay_ms > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(policy.base_delay_ms << attempt));
      }
      ++attempt;
    }
  }
}

}  // namespace recarena
