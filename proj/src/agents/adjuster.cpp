#include "optmut/agents/adjuster.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "internal.hpp"
#include "optmut/model_text.hpp"

namespace optmut::agents {

std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '_' || c == '-' || c == ' ' || c == '.') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  const std::string x = normalize_name(a), y = normalize_name(b);
  if (x.empty() && y.empty()) return 0.0;
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[y.size()]) / static_cast<double>(std::max(x.size(), y.size()));
}

namespace {

// Greedy one-to-one assignment, closest pairs first.
std::vector<std::optional<std::size_t>> match(const std::vector<std::string>& from, const std::vector<std::string>& to,
                                              double max_distance) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = 0; j < to.size(); ++j) {
      const double d = normalized_edit_distance(from[i], to[j]);
      if (d <= max_distance) pairs.emplace_back(d, i, j);
    }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::optional<std::size_t>> out(from.size());
  std::vector<bool> used(to.size(), false);
  for (const auto& [d, i, j] : pairs) {
    if (out[i] || used[j]) continue;
    out[i] = j;
    used[j] = true;
  }
  return out;
}

std::multiset<std::string> kinds_of(const TestSuite& suite) {
  std::multiset<std::string> out;
  for (const auto& c : suite.cases)
    for (const auto& a : c.assertions) out.insert(std::string(assertion_kind(a)));
  return out;
}

}  // namespace

InterfaceBinding fallback_binding(const BusinessInterface& bi, const LpModel& model, double max_distance) {
  std::vector<std::string> quantities, variables, bi_params, model_params;
  for (const auto& q : bi.quantities) quantities.push_back(q.name);
  for (const auto& v : model.variables) variables.push_back(v.name);
  for (const auto& p : bi.parameters) bi_params.push_back(p.name);
  for (const auto& p : model.parameters) model_params.push_back(p.name);

  InterfaceBinding b;
  std::vector<std::string> unbound;
  const auto qm = match(quantities, variables, max_distance);
  for (std::size_t i = 0; i < quantities.size(); ++i) {
    if (qm[i])
      b.quantities[quantities[i]] = variables[*qm[i]];
    else
      unbound.push_back(quantities[i]);
  }
  const auto pm = match(bi_params, model_params, max_distance);
  for (std::size_t i = 0; i < bi_params.size(); ++i) {
    if (pm[i])
      b.parameters[bi_params[i]] = model_params[*pm[i]];
    else
      unbound.push_back(bi_params[i]);
  }
  if (!unbound.empty()) {
    std::string names;
    for (const auto& n : unbound) names += (names.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::UnbindableSuite, "no model symbol matches: " + names);
  }
  return b;
}

AdjustResult adjust_tests(AgentContext& ctx, const std::string& description, const LpModel& external,
                          const TestSuite& suite, const BusinessInterface& bi, const AdjustOptions& options) {
  const LpModel model = normalize(external);
  validate(model);
  validate(suite, bi);
  const auto original_kinds = kinds_of(suite);

  AdjustResult out;
  try {
    auto messages = render(ctx.templates.get(kAdjustTemplate), {{"description", description},
                                                                {"interface", canonical_dump(to_json(bi))},
                                                                {"testsuite", canonical_dump(to_json(suite))},
                                                                {"model", serialize_model(model)}});
    auto [adjusted, binding] = detail::ask(ctx, "adjuster", std::move(messages), [&](const std::string& text) {
      const Json payload = detail::json_payload(text);
      if (!payload.is_object() || payload.size() != 2 || !payload.contains("testsuite") || !payload.contains("binding"))
        throw Error(ErrorCode::SchemaViolation, "expected exactly {\"testsuite\", \"binding\"}", "/");
      TestSuite s = suite_from_json(payload["testsuite"]);
      InterfaceBinding b = binding_from_json(payload["binding"]);
      validate(s, bi);
      check_binding(bi, model, b);
      if (kinds_of(s) != original_kinds)
        throw Error(ErrorCode::SchemaViolation, "adjusted suite changes the assertion kinds", "/testsuite/cases");
      return std::make_pair(std::move(s), std::move(b));
    });
    out.suite = std::move(adjusted);
    out.binding = std::move(binding);
    return out;
  } catch (const Error& e) {
    const bool provider_side = e.code() == ErrorCode::ProviderUnavailable || e.code() == ErrorCode::FixtureMissing;
    if (!options.allow_fallback || (!provider_side && e.code() != ErrorCode::LlmOutputInvalid)) throw;
    out.diagnostics.push_back(e.describe());
    ctx.trace.record(ctx.iteration, "adjuster", "fallback", e.describe());
  }
  out.used_fallback = true;
  out.suite = suite;
  out.binding = fallback_binding(bi, model, options.max_distance);
  return out;
}

}  // namespace optmut::agents
