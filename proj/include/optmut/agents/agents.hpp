#pragma once

// The generation agents. Each renders its template, asks the provider,
// validates the answer, and reprompts once with the validation error before
// giving up with Error(LlmOutputInvalid).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optmut/agents/prompts.hpp"
#include "optmut/agents/provider.hpp"
#include "optmut/interface.hpp"
#include "optmut/model.hpp"
#include "optmut/mutation.hpp"

namespace optmut::agents {

struct TraceEvent {
  std::size_t seq = 0;
  std::size_t iteration = 0;
  std::string agent;
  std::string event;
  std::string prompt_hash;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::string detail;
};

// Append-only event log, serialized as JSON lines.
class Trace {
 public:
  void record(std::size_t iteration, std::string agent, std::string event, std::string detail = {},
              std::string prompt_hash = {}, std::size_t prompt_tokens = 0, std::size_t completion_tokens = 0);
  const std::vector<TraceEvent>& events() const { return events_; }
  std::string to_jsonl() const;

 private:
  std::vector<TraceEvent> events_;
};

struct AgentContext {
  LlmProvider& provider;
  const TemplateSet& templates;
  Trace& trace;
  Decoding decoding = {};
  std::size_t iteration = 0;
};

BusinessInterface gen_business_interface(AgentContext& ctx, const std::string& description,
                                         std::size_t attempt = 1);

// `warnings` receives "NoKpis" for an interface without KPIs.
TestSuite gen_tests(AgentContext& ctx, const std::string& description, const BusinessInterface& bi,
                    std::vector<std::string>* warnings = nullptr);

struct GeneratedModel {
  LpModel model;
  InterfaceBinding binding;
};

GeneratedModel gen_model(AgentContext& ctx, const std::string& description, const BusinessInterface& bi,
                         const TestSuite& suite);

struct MutationProposals {
  std::vector<Mutant> mutants;
  std::vector<std::string> dropped;  // one diagnostic per rejected proposal
  bool fallback = false;
};

std::string default_mutation_rules();

// Never throws for bad proposals or provider failures: when nothing usable
// comes back, one seeded engine mutant is generated instead.
MutationProposals gen_mutations(AgentContext& ctx, const std::string& description, const BusinessInterface& bi,
                                const TestSuite& suite, const GeneratedModel& model, const std::string& rules,
                                std::uint64_t seed);

namespace detail {
// Body of the first ```<lang> fence, or the trimmed text when none exists.
std::optional<std::string> fenced_block(const std::string& text, const std::string& lang);
}  // namespace detail

}  // namespace optmut::agents
