#include "optmut/agents/campaign.hpp"

#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "optmut/model_text.hpp"

namespace optmut::agents {

CampaignResult run_campaign(LlmProvider& provider, const TemplateSet& templates, const std::string& description,
                            const CampaignConfig& cfg) {
  if (cfg.budget == 0) throw Error(ErrorCode::PreconditionFailed, "iteration budget must be at least 1");
  CampaignResult r;
  AgentContext ctx{provider, templates, r.trace, cfg.decoding, 0};
  r.bi = gen_business_interface(ctx, description, 1);

  for (std::size_t it = 1; it <= cfg.budget; ++it) {
    ctx.iteration = it;
    r.iterations = it;
    r.trace.record(it, "campaign", "iteration_start");
    bool passed = false;
    try {
      TestSuite suite = gen_tests(ctx, description, *r.bi);
      GeneratedModel model = gen_model(ctx, description, *r.bi, suite);
      const SuiteReport report = run_suite(suite, model.model, model.binding, *r.bi, cfg.solver);
      std::string detail(to_string(report.verdict));
      for (const auto& name : report.failing_cases()) detail += " " + name;
      r.trace.record(it, "campaign", "suite_run", detail);
      MutationProposals ma = gen_mutations(ctx, description, *r.bi, suite, model, cfg.rules, cfg.seed);
      r.suite = std::move(suite);
      r.model = std::move(model);
      r.mutants = std::move(ma.mutants);
      passed = report.passed();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LlmOutputInvalid) throw;
      r.trace.record(it, "campaign", "iteration_failed", e.describe());
    }
    if (passed) {
      r.verdict = Verdict::Pass;
      break;
    }
    if (cfg.regenerate_interface && it < cfg.budget) {
      try {
        r.bi = gen_business_interface(ctx, description, it + 1);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::LlmOutputInvalid) throw;
        r.trace.record(it, "campaign", "interface_kept", e.describe());
      }
    }
  }
  r.budget_exhausted = r.verdict != Verdict::Pass;
  r.trace.record(r.iterations, "campaign", r.budget_exhausted ? "budget_exhausted" : "converged");

  if (r.suite && r.model && !r.mutants.empty()) {
    EvaluationContext ectx{r.model->model, *r.suite, r.model->binding, *r.bi, cfg.solver, {}};
    r.verdicts = evaluate_mutants(r.mutants, ectx);
    try {
      r.coverage = coverage(r.verdicts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoValidMutants) throw;
    }
    for (const auto& v : r.verdicts) {
      std::string detail = v.mutant_id + " " + std::string(to_string(v.status));
      for (const auto& c : v.failing_cases) detail += " " + c;
      r.trace.record(r.iterations, "campaign", "mutant_evaluated", detail);
    }
  }

  r.report = make_campaign_report(cfg.problem_id, r.iterations, cfg.budget, r.verdict, r.mutants, r.verdicts);
  r.report.reference_objective = cfg.reference_objective;
  if (r.model) {
    const Solution s = solve_milp(r.model->model, cfg.solver);
    if (s.optimal()) r.report.objective = s.objective;
  }
  return r;
}

void write_campaign_artifacts(const CampaignResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (result.bi) write_file_atomic(dir / "interface.json", canonical_dump(to_json(*result.bi)));
  if (result.suite) write_file_atomic(dir / "testsuite.json", canonical_dump(to_json(*result.suite)));
  if (result.model) {
    write_file_atomic(dir / "model.optmod", serialize_model(result.model->model));
    write_file_atomic(dir / "binding.json", canonical_dump(to_json(result.model->binding)));
  }
  const std::string base = result.model ? result.model->model.name : std::string("model");
  write_file_atomic(dir / "mutants.json", canonical_dump(mutants_to_json(base, result.report.mutants, result.coverage)));
  write_file_atomic(dir / "report.json", canonical_dump(to_json(result.report)));
  write_file_atomic(dir / "trace.log", result.trace.to_jsonl());
}

}  // namespace optmut::agents
