#include "optmut/agents/agents.hpp"

#include <algorithm>

#include "internal.hpp"

#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "optmut/model_text.hpp"

namespace optmut::agents {

void Trace::record(std::size_t iteration, std::string agent, std::string event, std::string detail,
                   std::string prompt_hash, std::size_t prompt_tokens, std::size_t completion_tokens) {
  TraceEvent e;
  e.seq = events_.size() + 1;
  e.iteration = iteration;
  e.agent = std::move(agent);
  e.event = std::move(event);
  e.detail = std::move(detail);
  e.prompt_hash = std::move(prompt_hash);
  e.prompt_tokens = prompt_tokens;
  e.completion_tokens = completion_tokens;
  events_.push_back(std::move(e));
}

std::string Trace::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    Json j = {{"seq", e.seq},
              {"iteration", e.iteration},
              {"agent", e.agent},
              {"event", e.event},
              {"prompt_hash", e.prompt_hash},
              {"prompt_tokens", e.prompt_tokens},
              {"completion_tokens", e.completion_tokens},
              {"detail", e.detail}};
    out += j.dump() + "\n";
  }
  return out;
}

namespace detail {

std::optional<std::string> fenced_block(const std::string& text, const std::string& lang) {
  const std::string open = "```" + lang;
  std::size_t pos = 0;
  while ((pos = text.find(open, pos)) != std::string::npos) {
    const std::size_t line_end = text.find('\n', pos);
    if (line_end == std::string::npos) return std::nullopt;
    const std::string rest = text.substr(pos + open.size(), line_end - pos - open.size());
    if (rest.find_first_not_of(" \t\r") != std::string::npos) {
      pos = line_end;
      continue;
    }
    const std::size_t close = text.find("```", line_end + 1);
    if (close == std::string::npos) return std::nullopt;
    return text.substr(line_end + 1, close - line_end - 1);
  }
  return std::nullopt;
}

Json json_payload(const std::string& text) {
  if (auto block = fenced_block(text, "json")) return parse_json(*block);
  return parse_json(text);
}

std::string reprompt_text(const std::string& diagnostic) {
  return "Your previous reply was rejected by the validator:\n" + diagnostic +
         "\nReply again with the complete corrected output in the required format.";
}

}  // namespace detail

using detail::ask;
using detail::json_payload;

namespace {

std::string interface_text(const BusinessInterface& bi) { return canonical_dump(to_json(bi)); }

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

BusinessInterface gen_business_interface(AgentContext& ctx, const std::string& description, std::size_t attempt) {
  if (blank(description)) throw Error(ErrorCode::PreconditionFailed, "problem description is empty");
  auto messages = render(ctx.templates.get(kInterfaceTemplate),
                         {{"description", description}, {"attempt", std::to_string(attempt)}});
  return ask(ctx, "business_interface", std::move(messages),
             [](const std::string& text) { return interface_from_json(json_payload(text)); });
}

TestSuite gen_tests(AgentContext& ctx, const std::string& description, const BusinessInterface& bi,
                    std::vector<std::string>* warnings) {
  if (blank(description)) throw Error(ErrorCode::PreconditionFailed, "problem description is empty");
  if (bi.kpis.empty()) {
    ctx.trace.record(ctx.iteration, "tests", "warning", "NoKpis");
    if (warnings) warnings->push_back("NoKpis");
  }
  auto messages = render(ctx.templates.get(kTestsTemplate), {{"description", description},
                                                             {"interface", interface_text(bi)},
                                                             {"iteration", std::to_string(ctx.iteration)}});
  return ask(ctx, "tests", std::move(messages), [&](const std::string& text) {
    TestSuite suite = suite_from_json(json_payload(text));
    if (suite.interface_name != bi.name)
      throw Error(ErrorCode::SchemaViolation,
                  "suite targets interface '" + suite.interface_name + "' instead of '" + bi.name + "'", "/interface");
    validate(suite, bi);
    return suite;
  });
}

GeneratedModel gen_model(AgentContext& ctx, const std::string& description, const BusinessInterface& bi,
                         const TestSuite& suite) {
  auto messages = render(ctx.templates.get(kModelTemplate), {{"description", description},
                                                             {"interface", interface_text(bi)},
                                                             {"testsuite", canonical_dump(to_json(suite))},
                                                             {"iteration", std::to_string(ctx.iteration)}});
  return ask(ctx, "model", std::move(messages), [&](const std::string& text) {
    const auto source = detail::fenced_block(text, "optmod");
    if (!source) throw Error(ErrorCode::SyntaxError, "reply has no ```optmod block");
    const ParseResult parsed = parse_model(*source);
    if (!parsed.ok()) {
      const Diagnostic& d = parsed.diagnostics.front();
      throw Error(d.code, "model: " + d.to_string(), std::to_string(d.span.line) + ":" + std::to_string(d.span.column));
    }
    const auto binding_text = detail::fenced_block(text, "json");
    if (!binding_text) throw Error(ErrorCode::BindingIncomplete, "reply has no ```json binding block");
    GeneratedModel out{parsed.document->model, binding_from_json(parse_json(*binding_text))};
    check_binding(bi, out.model, out.binding);
    return out;
  });
}

std::string default_mutation_rules() {
  return "Propose single-edit mutations a faulty model could plausibly contain. Allowed operators:\n"
         "- rhs_delta {constraint, delta}: shift a right-hand side\n"
         "- coef_delta {constraint, variable, delta}: shift a constraint coefficient\n"
         "- sense_flip {constraint, sense}: change a row's sense to \"<=\", \">=\" or \"==\"\n"
         "- objective_scale {factor}: multiply the objective by factor > 0, factor != 1\n"
         "- objective_coef_delta {variable, delta}: shift an objective coefficient\n"
         "- bound_drop {variable, bound}: remove the \"lower\" or \"upper\" bound\n"
         "- domain_relax {variable}: make an integer variable continuous\n"
         "- constraint_drop {constraint}: delete a row\n"
         "Deltas must be non-zero.";
}

MutationProposals gen_mutations(AgentContext& ctx, const std::string& description, const BusinessInterface& bi,
                                const TestSuite& suite, const GeneratedModel& model, const std::string& rules,
                                std::uint64_t seed) {
  MutationProposals out;
  const LpModel base = normalize(model.model);
  auto consider = [&](const MutationKind& kind) {
    try {
      Mutant m = make_mutant(base, kind, "m" + std::to_string(out.mutants.size() + 1));
      if (m.model == base) throw Error(ErrorCode::InvalidMutation, "mutation leaves the model unchanged");
      for (const auto& other : out.mutants)
        if (other.model == m.model) throw Error(ErrorCode::InvalidMutation, "duplicate of " + other.id);
      out.mutants.push_back(std::move(m));
    } catch (const Error& e) {
      out.dropped.push_back(e.describe());
    }
  };

  try {
    auto messages = render(ctx.templates.get(kMutationsTemplate), {{"description", description},
                                                                   {"interface", interface_text(bi)},
                                                                   {"testsuite", canonical_dump(to_json(suite))},
                                                                   {"model", serialize_model(model.model)},
                                                                   {"binding", canonical_dump(to_json(model.binding))},
                                                                   {"rules", rules},
                                                                   {"iteration", std::to_string(ctx.iteration)}});
    const std::string hash = prompt_hash(messages);
    const Completion c = ctx.provider.complete(messages, ctx.decoding);
    ctx.trace.record(ctx.iteration, "mutations", "completion", {}, hash, c.prompt_tokens, c.completion_tokens);
    const Json payload = json_payload(c.text);
    const Json* list = &payload;
    if (payload.is_object()) {
      auto it = payload.find("mutations");
      if (it == payload.end() || payload.size() != 1)
        throw Error(ErrorCode::SchemaViolation, "expected {\"mutations\": [...]}", "/");
      list = &*it;
    }
    if (!list->is_array()) throw Error(ErrorCode::SchemaViolation, "mutations must be an array", "/mutations");
    for (std::size_t i = 0; i < list->size(); ++i) {
      try {
        consider(mutation_from_json((*list)[i], "/mutations/" + std::to_string(i)));
      } catch (const Error& e) {
        out.dropped.push_back(e.describe());
      }
    }
  } catch (const Error& e) {
    out.dropped.push_back(e.describe());
  }
  for (const auto& d : out.dropped) ctx.trace.record(ctx.iteration, "mutations", "dropped", d);

  if (out.mutants.empty()) {
    out.fallback = true;
    try {
      std::set<MutationOperator> ops(std::begin(kAllOperators), std::end(kAllOperators));
      out.mutants = generate_mutants(base, ops, 1, seed);
    } catch (const Error& e) {
      ctx.trace.record(ctx.iteration, "mutations", "fallback_failed", e.describe());
    }
    std::string ids;
    for (const auto& m : out.mutants) ids += (ids.empty() ? "" : ", ") + m.mutation.description;
    ctx.trace.record(ctx.iteration, "mutations", "fallback", ids);
  } else {
    ctx.trace.record(ctx.iteration, "mutations", "accepted", std::to_string(out.mutants.size()) + " mutant(s)");
  }
  return out;
}

}  // namespace optmut::agents
