#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/error.hpp"

namespace timepoint {

class TransportError : public Error {
public:
  explicit TransportError(const std::string& message) : Error("TransportError", message) {}
};

struct ChatMessage {
  std::string role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct TransportRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 256;
  /// Distinguishes repeated samples of the same prompt; part of the cache key
  /// but never sent to an endpoint.
  int sample = 0;

  /// Canonical JSON text; equal requests serialize identically.
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] static TransportRequest from_json(std::string_view text);
  /// Hex SHA-256 of to_json().
  [[nodiscard]] std::string content_hash() const;

  friend bool operator==(const TransportRequest&, const TransportRequest&) = default;
};

struct TransportResponse {
  std::string text;
  std::string finish_reason = "stop";
  std::chrono::milliseconds latency{0};
};

/// A chat-completion endpoint. Implementations must be safe to call from
/// several threads at once.
class Transport {
public:
  virtual ~Transport() = default;
  /// Throws TransportError on failure.
  virtual TransportResponse complete(const TransportRequest& request) = 0;
};

/// Answers from a script: the first rule whose every `contains` substring
/// occurs in the last user message wins, else the default. A rule either
/// fails or answers with responses[sample % size].
class MockTransport final : public Transport {
public:
  struct Rule {
    std::vector<std::string> contains;
    std::vector<std::string> responses;
    std::optional<std::string> error;
  };

  MockTransport(std::vector<Rule> rules, std::string default_response);

  /// {"default": "...", "rules": [{"contains": "..."|[...], "response": "..."|[...], "error": "..."}]}
  /// Throws ParseError.
  [[nodiscard]] static std::unique_ptr<MockTransport> from_script(std::string_view json);
  [[nodiscard]] static std::unique_ptr<MockTransport> from_script_file(const std::filesystem::path& path);

  TransportResponse complete(const TransportRequest& request) override;

  [[nodiscard]] std::size_t calls() const;

private:
  std::vector<Rule> rules_;
  std::string default_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

/// Content-addressed response cache in a directory of JSON files named by
/// the request hash. With no inner transport it only replays, and a miss is
/// a TransportError.
class CachingTransport final : public Transport {
public:
  CachingTransport(std::filesystem::path directory, std::shared_ptr<Transport> inner);

  TransportResponse complete(const TransportRequest& request) override;

  [[nodiscard]] std::size_t hits() const;
  [[nodiscard]] std::size_t misses() const;
  [[nodiscard]] std::filesystem::path entry_path(const TransportRequest& request) const;

private:
  std::filesystem::path directory_;
  std::shared_ptr<Transport> inner_;
  mutable std::mutex mutex_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct PacingOptions {
  std::chrono::milliseconds min_interval{0};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
};

/// Spaces requests at least min_interval apart and retries failures with
/// exponential backoff.
class PacedTransport final : public Transport {
public:
  PacedTransport(std::shared_ptr<Transport> inner, PacingOptions options);

  TransportResponse complete(const TransportRequest& request) override;

private:
  void wait_turn();

  std::shared_ptr<Transport> inner_;
  PacingOptions options_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

struct HttpSettings {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  std::chrono::seconds timeout{60};

  /// Overrides fields from TIMEPOINT_LLM_ENDPOINT, TIMEPOINT_LLM_API_KEY and
  /// TIMEPOINT_LLM_MODEL when they are set.
  [[nodiscard]] static HttpSettings from_environment(HttpSettings defaults);
  [[nodiscard]] static HttpSettings from_environment();
};

/// OpenAI-style chat-completions client.
class HttpTransport final : public Transport {
public:
  explicit HttpTransport(HttpSettings settings);

  TransportResponse complete(const TransportRequest& request) override;

  [[nodiscard]] const HttpSettings& settings() const noexcept { return settings_; }

private:
  HttpSettings settings_;
};

/// Lower-case hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace timepoint
