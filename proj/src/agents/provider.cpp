#include "optmut/agents/provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "optmut/error.hpp"
#include "optmut/json_io.hpp"

namespace optmut::agents {

std::string canonical_messages(const std::vector<Message>& messages) {
  Json arr = Json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr.dump();
}

std::string prompt_hash(const std::vector<Message>& messages) {
  const std::string data = canonical_messages(messages);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::PreconditionFailed, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::size_t estimate_tokens(const std::string& text) { return (text.size() + 3) / 4; }

std::size_t estimate_tokens(const std::vector<Message>& messages) {
  std::size_t n = 0;
  for (const auto& m : messages) n += estimate_tokens(m.content);
  return n;
}

ScriptedProvider::ScriptedProvider(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_))
    throw Error(ErrorCode::IoError, "fixture directory '" + dir_.string() + "' does not exist");
}

Completion ScriptedProvider::complete(const std::vector<Message>& messages, const Decoding&) {
  const std::string hash = prompt_hash(messages);
  const auto path = dir_ / (hash + ".txt");
  if (!std::filesystem::is_regular_file(path))
    throw Error(ErrorCode::FixtureMissing, "no scripted response for prompt " + hash + " in " + dir_.string(), hash);
  Completion c;
  c.text = read_text_file(path);
  c.prompt_tokens = estimate_tokens(messages);
  c.completion_tokens = estimate_tokens(c.text);
  return c;
}

SequenceProvider::SequenceProvider(std::vector<std::string> responses) : responses_(std::move(responses)) {}

Completion SequenceProvider::complete(const std::vector<Message>& messages, const Decoding&) {
  std::lock_guard lock(mutex_);
  if (next_ >= responses_.size()) throw Error(ErrorCode::ProviderUnavailable, "response sequence exhausted");
  Completion c;
  c.text = responses_[next_++];
  c.prompt_tokens = estimate_tokens(messages);
  c.completion_tokens = estimate_tokens(c.text);
  return c;
}

std::size_t SequenceProvider::remaining() const {
  std::lock_guard lock(mutex_);
  return responses_.size() - next_;
}

Completion OfflineProvider::complete(const std::vector<Message>&, const Decoding&) {
  throw Error(ErrorCode::ProviderUnavailable, "no provider configured");
}

RecordingProvider::RecordingProvider(LlmProvider& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

Completion RecordingProvider::complete(const std::vector<Message>& messages, const Decoding& decoding) {
  Completion c = inner_.complete(messages, decoding);
  const std::string hash = prompt_hash(messages);
  write_file_atomic(dir_ / (hash + ".txt"), c.text);
  recorded_.push_back(hash);
  return c;
}

RateLimiter::RateLimiter(std::chrono::milliseconds min_interval) : interval_(min_interval) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

HttpConfig HttpConfig::from_environment() {
  HttpConfig cfg;
  if (const char* key = std::getenv("OPTMUT_API_KEY")) cfg.api_key = key;
  if (const char* endpoint = std::getenv("OPTMUT_ENDPOINT")) cfg.endpoint = endpoint;
  if (const char* model = std::getenv("OPTMUT_MODEL")) cfg.model = model;
  return cfg;
}

HttpChatProvider::HttpChatProvider(HttpConfig config) : config_(std::move(config)), limiter_(config_.min_interval) {
  const std::string& url = config_.endpoint;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::PreconditionFailed, "endpoint '" + url + "' has no scheme");
  const auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? std::string() : url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  if (config_.max_attempts == 0) config_.max_attempts = 1;
}

Completion HttpChatProvider::complete(const std::vector<Message>& messages, const Decoding& decoding) {
  Json body = {{"model", config_.model}, {"temperature", decoding.temperature}, {"max_tokens", decoding.max_tokens}};
  body["messages"] = Json::parse(canonical_messages(messages));
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  for (std::size_t attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1LL << (attempt - 1)));
    limiter_.acquire();
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw Error(ErrorCode::ProviderUnavailable, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    try {
      const Json reply = Json::parse(res->body);
      Completion c;
      c.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
        c.prompt_tokens = usage->value("prompt_tokens", std::size_t{0});
        c.completion_tokens = usage->value("completion_tokens", std::size_t{0});
      } else {
        c.prompt_tokens = estimate_tokens(messages);
        c.completion_tokens = estimate_tokens(c.text);
      }
      return c;
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ProviderUnavailable, std::string("malformed chat-completions reply: ") + e.what());
    }
  }
  throw Error(ErrorCode::ProviderUnavailable,
              "gave up after " + std::to_string(config_.max_attempts) + " attempts: " + last_error);
}

}  // namespace optmut::agents
