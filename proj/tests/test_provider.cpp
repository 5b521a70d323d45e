#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "optmut/agents/provider.hpp"
#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "support.hpp"

using namespace optmut;
using namespace optmut::agents;

namespace {

const std::vector<Message> kPrompt{{"system", "sys"}, {"user", "hello"}};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::IoError;
}

}  // namespace

TEST(PromptHash, CanonicalAndStable) {
  EXPECT_EQ(canonical_messages(kPrompt), R"([{"content":"sys","role":"system"},{"content":"hello","role":"user"}])");
  const std::string h = prompt_hash(kPrompt);
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(h, prompt_hash(kPrompt));
  EXPECT_NE(h, prompt_hash({{"user", "hello"}}));
  // SHA-256 of the empty array "[]".
  EXPECT_EQ(prompt_hash({}), "4f53cda18c2baa0c0354bb5f9a3ecbe5ed12ab4d8e11ba873c2f11161202b945");
  EXPECT_EQ(estimate_tokens("abcd"), 1u);
  EXPECT_EQ(estimate_tokens("abcde"), 2u);
}

TEST(Scripted, AnswersFromHashFilesAndFailsLoudly) {
  const auto dir = testing_support::scratch_dir("scripted");
  write_file_atomic(dir / (prompt_hash(kPrompt) + ".txt"), "answer");
  ScriptedProvider p(dir);
  EXPECT_EQ(p.complete(kPrompt, {}).text, "answer");
  EXPECT_EQ(code_of([&] { p.complete({{"user", "other"}}, {}); }), ErrorCode::FixtureMissing);
  EXPECT_EQ(code_of([&] { ScriptedProvider missing(dir / "nope"); }), ErrorCode::IoError);
}

TEST(Sequence, ReplaysInOrderThenFails) {
  SequenceProvider p({"one", "two"});
  EXPECT_EQ(p.complete(kPrompt, {}).text, "one");
  EXPECT_EQ(p.remaining(), 1u);
  EXPECT_EQ(p.complete(kPrompt, {}).text, "two");
  EXPECT_EQ(code_of([&] { p.complete(kPrompt, {}); }), ErrorCode::ProviderUnavailable);
}

TEST(Recording, WritesReplayableFixtures) {
  const auto dir = testing_support::scratch_dir("recording");
  SequenceProvider inner({"recorded"});
  RecordingProvider rec(inner, dir);
  EXPECT_EQ(rec.complete(kPrompt, {}).text, "recorded");
  ASSERT_EQ(rec.recorded().size(), 1u);
  EXPECT_EQ(rec.recorded()[0], prompt_hash(kPrompt));
  ScriptedProvider replay(dir);
  EXPECT_EQ(replay.complete(kPrompt, {}).text, "recorded");
}

TEST(Offline, AlwaysUnavailable) {
  OfflineProvider p;
  EXPECT_EQ(code_of([&] { p.complete(kPrompt, {}); }), ErrorCode::ProviderUnavailable);
}

TEST(RateLimiter, SpacesRequests) {
  RateLimiter limiter(std::chrono::milliseconds(20));
  const auto start = std::chrono::steady_clock::now();
  limiter.acquire();
  limiter.acquire();
  limiter.acquire();
  EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(40));
}

class LocalServer : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      const int n = ++calls_;
      if (n <= failures_) {
        res.status = 503;
        res.set_content("busy", "text/plain");
        return;
      }
      res.set_content(
          R"({"choices":[{"message":{"role":"assistant","content":"pong"}}],"usage":{"prompt_tokens":7,"completion_tokens":1}})",
          "application/json");
    });
    server_.Post("/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.status = 401;
      res.set_content("denied", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  HttpConfig config(const std::string& path = "/v1") const {
    HttpConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + path;
    c.api_key = "secret";
    c.model = "test-model";
    c.backoff = std::chrono::milliseconds(1);
    c.timeout = std::chrono::seconds(5);
    return c;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  int failures_ = 0;
  std::string last_body_, last_auth_;
};

TEST_F(LocalServer, SendsChatCompletionRequest) {
  HttpChatProvider p(config());
  Decoding d;
  d.temperature = 0.25;
  const Completion c = p.complete(kPrompt, d);
  EXPECT_EQ(c.text, "pong");
  EXPECT_EQ(c.prompt_tokens, 7u);
  EXPECT_EQ(last_auth_, "Bearer secret");
  const Json body = Json::parse(last_body_);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.25);
  EXPECT_EQ(body["messages"][1]["content"], "hello");
}

TEST_F(LocalServer, RetriesServiceUnavailable) {
  failures_ = 2;
  HttpChatProvider p(config());
  EXPECT_EQ(p.complete(kPrompt, {}).text, "pong");
  EXPECT_EQ(calls_.load(), 3);
}

TEST_F(LocalServer, GivesUpAfterThreeAttempts) {
  failures_ = 10;
  HttpChatProvider p(config());
  EXPECT_EQ(code_of([&] { p.complete(kPrompt, {}); }), ErrorCode::ProviderUnavailable);
  EXPECT_EQ(calls_.load(), 3);
}

TEST_F(LocalServer, ClientErrorsAreNotRetried) {
  HttpChatProvider p(config("/bad"));
  EXPECT_EQ(code_of([&] { p.complete(kPrompt, {}); }), ErrorCode::ProviderUnavailable);
}

TEST(Http, ConnectionRefusedIsUnavailable) {
  HttpConfig c;
  c.endpoint = "http://127.0.0.1:1/v1";
  c.backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::seconds(1);
  HttpChatProvider p(c);
  EXPECT_EQ(code_of([&] { p.complete(kPrompt, {}); }), ErrorCode::ProviderUnavailable);
  HttpConfig bad;
  bad.endpoint = "no-scheme";
  EXPECT_EQ(code_of([&] { HttpChatProvider q(bad); }), ErrorCode::PreconditionFailed);
}
