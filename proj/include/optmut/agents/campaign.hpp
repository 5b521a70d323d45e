#pragma once

// The iterative test-suite generation loop and its artifact directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optmut/agents/agents.hpp"
#include "optmut/report.hpp"

namespace optmut::agents {

struct CampaignConfig {
  std::size_t budget = 10;
  SolverConfig solver = {};
  Decoding decoding = {};
  std::uint64_t seed = 1;
  std::string rules = default_mutation_rules();
  // Regenerate the business interface after a failed iteration.
  bool regenerate_interface = false;
  std::string problem_id = "problem";
  std::optional<double> reference_objective;
};

struct CampaignResult {
  std::optional<BusinessInterface> bi;
  std::optional<TestSuite> suite;
  std::optional<GeneratedModel> model;
  std::vector<Mutant> mutants;
  std::vector<MutantVerdict> verdicts;
  std::optional<CoverageReport> coverage;
  std::size_t iterations = 0;
  Verdict verdict = Verdict::Fail;
  bool budget_exhausted = false;
  Trace trace;
  CampaignReport report;
};

// Runs until the generated suite passes on the generated model or `budget`
// iterations elapse. Provider failures propagate; invalid agent output only
// fails the iteration in which it occurs.
CampaignResult run_campaign(LlmProvider& provider, const TemplateSet& templates, const std::string& description,
                            const CampaignConfig& cfg = {});

// interface.json, testsuite.json, model.optmod, binding.json, mutants.json,
// report.json and trace.log; artifacts that were never produced are skipped.
void write_campaign_artifacts(const CampaignResult& result, const std::filesystem::path& dir);

}  // namespace optmut::agents
