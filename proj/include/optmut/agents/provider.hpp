#pragma once

// Chat-completion providers: a fixture-backed scripted provider for offline
// runs, an OpenAI-compatible HTTP client, and helpers for authoring fixtures.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace optmut::agents {

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
  bool operator==(const Message&) const = default;
};

struct Decoding {
  double temperature = 1.0;
  std::size_t max_tokens = 4096;
};

struct Completion {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  // Throws Error(ProviderUnavailable) or Error(FixtureMissing).
  virtual Completion complete(const std::vector<Message>& messages, const Decoding& decoding) = 0;
};

// Compact JSON array of {"content", "role"} objects.
std::string canonical_messages(const std::vector<Message>& messages);
// Lowercase hex SHA-256 of canonical_messages(); decoding settings excluded.
std::string prompt_hash(const std::vector<Message>& messages);
// Deterministic size estimate used where a provider reports no usage.
std::size_t estimate_tokens(const std::string& text);
std::size_t estimate_tokens(const std::vector<Message>& messages);

// Answers from `<dir>/<prompt_hash>.txt`.
class ScriptedProvider : public LlmProvider {
 public:
  explicit ScriptedProvider(std::filesystem::path dir);
  Completion complete(const std::vector<Message>& messages, const Decoding& decoding) override;

 private:
  std::filesystem::path dir_;
};

// Replays responses in order, regardless of the prompt.
class SequenceProvider : public LlmProvider {
 public:
  explicit SequenceProvider(std::vector<std::string> responses);
  Completion complete(const std::vector<Message>& messages, const Decoding& decoding) override;
  std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

// Always unavailable; selects the deterministic fallbacks.
class OfflineProvider : public LlmProvider {
 public:
  Completion complete(const std::vector<Message>& messages, const Decoding& decoding) override;
};

// Forwards to `inner` and stores every answer as a ScriptedProvider fixture.
class RecordingProvider : public LlmProvider {
 public:
  RecordingProvider(LlmProvider& inner, std::filesystem::path dir);
  Completion complete(const std::vector<Message>& messages, const Decoding& decoding) override;
  const std::vector<std::string>& recorded() const { return recorded_; }

 private:
  LlmProvider& inner_;
  std::filesystem::path dir_;
  std::vector<std::string> recorded_;
};

// Spaces successive requests by at least `min_interval`. Thread-safe.
class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds min_interval);
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::milliseconds interval_;
  std::chrono::steady_clock::time_point next_{};
};

struct HttpConfig {
  std::string endpoint = "https://api.openai.com/v1";  // base URL; /chat/completions is appended
  std::string api_key;
  std::string model = "gpt-4o";
  std::chrono::seconds timeout{120};
  std::size_t max_attempts = 3;
  std::chrono::milliseconds backoff{500};
  std::chrono::milliseconds min_interval{0};

  // OPTMUT_API_KEY, and optionally OPTMUT_ENDPOINT, OPTMUT_MODEL.
  static HttpConfig from_environment();
};

// OpenAI-compatible chat-completions client. Connection failures, 429 and
// 5xx responses are retried with exponential backoff.
class HttpChatProvider : public LlmProvider {
 public:
  explicit HttpChatProvider(HttpConfig config);
  Completion complete(const std::vector<Message>& messages, const Decoding& decoding) override;

 private:
  HttpConfig config_;
  RateLimiter limiter_;
  std::string origin_;
  std::string path_;
};

}  // namespace optmut::agents
