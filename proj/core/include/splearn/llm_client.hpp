#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

namespace splearn {

/// Connection settings for an OpenAI-style chat-completion endpoint. The API
/// key is read from the named environment variable, never stored in config
/// files.
struct ChatClientConfig {
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "SPLEARN_API_KEY";
  int max_retries = 3;
  int backoff_base_ms = 250;
  int timeout_ms = 60000;
};

/// Minimal single-turn chat client with retry and exponential backoff.
/// Thread-safe; per-call state only. Request counters support the
/// equal-API-call accounting checks.
class ChatClient {
 public:
  explicit ChatClient(ChatClientConfig config);
  ~ChatClient();

  /// One user-message completion at the given temperature; returns the
  /// trimmed assistant text. Transport and retryable HTTP failures
  /// (408/429/5xx) are retried up to max_retries with exponential backoff,
  /// then surfaced as std::runtime_error. An empty completion is an error.
  std::string complete(const std::string& prompt, double temperature) const;

  std::uint64_t request_count() const { return requests_.load(); }
  std::uint64_t retry_count() const { return retries_.load(); }

 private:
  ChatClientConfig config_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
  mutable std::atomic<std::uint64_t> requests_{0};
  mutable std::atomic<std::uint64_t> retries_{0};
};

}  // namespace splearn
