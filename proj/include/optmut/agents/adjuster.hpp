#pragma once

// Rebinds an existing test suite onto an externally authored model.

#include <string>
#include <string_view>
#include <vector>

#include "optmut/agents/agents.hpp"

namespace optmut::agents {

struct AdjustOptions {
  bool allow_fallback = true;
  double max_distance = 0.4;
};

struct AdjustResult {
  TestSuite suite;
  InterfaceBinding binding;
  bool used_fallback = false;
  std::vector<std::string> diagnostics;
};

// Asks the provider for {"testsuite", "binding"}; the answer must keep the
// multiset of assertion kinds and bind totally. Otherwise, or when the
// provider is unavailable, falls back to name matching.
// Throws Error(UnbindableSuite) listing names nothing matches, and
// Error(LlmOutputInvalid) only when the fallback is disabled.
AdjustResult adjust_tests(AgentContext& ctx, const std::string& description, const LpModel& external,
                          const TestSuite& suite, const BusinessInterface& bi, const AdjustOptions& options = {});

// Lowercase with '_', '-', ' ' and '.' removed.
std::string normalize_name(std::string_view name);
// Levenshtein distance of the normalized names over the longer length.
double normalized_edit_distance(std::string_view a, std::string_view b);

// Greedy matching of quantities onto variables and interface parameters onto
// model parameters, closest pairs first, ties by declaration order.
InterfaceBinding fallback_binding(const BusinessInterface& bi, const LpModel& model, double max_distance = 0.4);

}  // namespace optmut::agents
