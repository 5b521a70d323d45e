#pragma once

// Shared request/validate/reprompt loop of the agents. Internal header.

#include <string>
#include <vector>

#include "optmut/agents/agents.hpp"
#include "optmut/error.hpp"
#include "optmut/json_io.hpp"

namespace optmut::agents::detail {

// JSON from the first ```json fence, or from the whole reply.
Json json_payload(const std::string& text);
std::string reprompt_text(const std::string& diagnostic);

// Sends `messages`; when `parse` throws, appends the rejected reply and the
// validator's message and asks exactly once more.
template <typename Parse>
auto ask(AgentContext& ctx, const std::string& agent, std::vector<Message> messages, Parse parse)
    -> decltype(parse(std::string())) {
  std::string diagnostic;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string hash = prompt_hash(messages);
    Completion c;
    try {
      c = ctx.provider.complete(messages, ctx.decoding);
    } catch (const Error& e) {
      ctx.trace.record(ctx.iteration, agent, "provider_error", e.describe(), hash);
      throw;
    }
    ctx.trace.record(ctx.iteration, agent, "completion", {}, hash, c.prompt_tokens, c.completion_tokens);
    try {
      auto value = parse(c.text);
      ctx.trace.record(ctx.iteration, agent, "accepted");
      return value;
    } catch (const Error& e) {
      diagnostic = e.describe();
      ctx.trace.record(ctx.iteration, agent, "rejected", diagnostic);
      messages.push_back({"assistant", c.text});
      messages.push_back({"user", reprompt_text(diagnostic)});
    }
  }
  throw Error(ErrorCode::LlmOutputInvalid, agent + " output rejected after one reprompt: " + diagnostic);
}

}  // namespace optmut::agents::detail
