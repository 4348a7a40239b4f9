#include "splearn/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace splearn {

namespace {

using nlohmann::json;

std::string trim_copy(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

ChatClient::ChatClient(ChatClientConfig config) : config_(std::move(config)) {
  const auto& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("chat client: endpoint needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = url;
    path_ = "/v1/chat/completions";
  } else {
    base_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

ChatClient::~ChatClient() = default;

std::string ChatClient::complete(const std::string& prompt,
                                 double temperature) const {
  json body{{"model", config_.model},
            {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", temperature}};
  const std::string payload = body.dump();

  httplib::Client client(base_);
  client.set_connection_timeout(config_.timeout_ms / 1000,
                                (config_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config_.timeout_ms / 1000,
                          (config_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str());
      key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      retries_.fetch_add(1);
      const auto delay = std::chrono::milliseconds(
          config_.backoff_base_ms * (1LL << (attempt - 1)));
      std::this_thread::sleep_for(delay);
    }
    requests_.fetch_add(1);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      if (retryable_status(res->status)) continue;
      throw std::runtime_error("chat client: " + last_error + ": " + res->body);
    }
    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::exception& e) {
      throw std::runtime_error(std::string("chat client: malformed response: ") +
                               e.what());
    }
    if (!parsed.contains("choices") || parsed["choices"].empty())
      throw std::runtime_error("chat client: response has no choices");
    const auto& msg = parsed["choices"][0];
    std::string text;
    if (msg.contains("message") && msg["message"].contains("content"))
      text = msg["message"]["content"].get<std::string>();
    else if (msg.contains("text"))
      text = msg["text"].get<std::string>();
    text = trim_copy(std::move(text));
    if (text.empty())
      throw std::runtime_error("chat client: empty completion");
    return text;
  }
  throw std::runtime_error("chat client: giving up after " +
                           std::to_string(config_.max_retries + 1) +
                           " attempts; last error: " + last_error);
}

}  // namespace splearn
