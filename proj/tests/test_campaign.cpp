#include <gtest/gtest.h>

#include "optmut/agents/campaign.hpp"
#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "support.hpp"

using namespace optmut;
using namespace optmut::agents;

namespace {

CampaignResult run_fixture(const std::string& problem, std::size_t budget = 10) {
  const auto dir = testing_support::fixture("campaigns/" + problem);
  ScriptedProvider provider(dir / "scripted");
  CampaignConfig cfg;
  cfg.budget = budget;
  cfg.problem_id = problem;
  return run_campaign(provider, TemplateSet::embedded(), read_text_file(dir / "description.txt"), cfg);
}

std::map<std::string, std::string> slurp(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) out[e.path().filename().string()] = read_text_file(e.path());
  return out;
}

}  // namespace

TEST(Campaign, FactoryConvergesOnFirstIteration) {
  const CampaignResult r = run_fixture("factory");
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_FALSE(r.budget_exhausted);
  ASSERT_TRUE(r.coverage.has_value());
  EXPECT_DOUBLE_EQ(r.coverage->mc_percent, 100.0);
  ASSERT_FALSE(r.mutants.empty());
  EXPECT_TRUE(r.mutants[0].mutation.kind == MutationKind(RhsDelta{"assembly", -1.0}));
  EXPECT_EQ(r.verdicts[0].status, MutantStatus::Killed);
  EXPECT_EQ(r.report.problem_id, "factory");
  EXPECT_DOUBLE_EQ(*r.report.objective, 780.0);
}

TEST(Campaign, RetriesUntilSuitePasses) {
  const CampaignResult r = run_fixture("factory_retry");
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  std::size_t runs = 0, passing = 0;
  for (const auto& e : r.trace.events()) {
    if (e.agent != "campaign" || e.event != "suite_run") continue;
    ++runs;
    passing += e.detail.rfind("pass", 0) == 0;
  }
  EXPECT_EQ(runs, 3u);
  EXPECT_EQ(passing, 1u);
}

TEST(Campaign, BudgetExhaustion) {
  const CampaignResult r = run_fixture("factory_retry", 1);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_EQ(r.report.verdict, Verdict::Fail);
}

TEST(Campaign, MalformedFirstModelCostsOneIteration) {
  const CampaignResult r = run_fixture("blend");
  EXPECT_EQ(r.iterations, 2u);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Campaign, ArtifactsAreBitIdenticalAcrossRuns) {
  const auto a = testing_support::scratch_dir("campaign_a"), b = testing_support::scratch_dir("campaign_b");
  write_campaign_artifacts(run_fixture("diet"), a);
  write_campaign_artifacts(run_fixture("diet"), b);
  const auto fa = slurp(a), fb = slurp(b);
  EXPECT_EQ(fa.size(), 7u);
  EXPECT_EQ(fa, fb);
  EXPECT_NO_THROW(campaign_report_from_json(parse_json(fa.at("report.json"))));
  EXPECT_NE(fa.at("trace.log").find("\"rejected\""), std::string::npos);
}

TEST(Campaign, ProviderFailurePropagates) {
  OfflineProvider offline;
  try {
    run_campaign(offline, TemplateSet::embedded(), "some problem");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderUnavailable);
  }
}

TEST(Campaign, ZeroBudgetIsRejected) {
  SequenceProvider none({});
  CampaignConfig cfg;
  cfg.budget = 0;
  EXPECT_THROW(run_campaign(none, TemplateSet::embedded(), "text", cfg), Error);
}

TEST(Campaign, IterationPromptsDoNotCarryFailures) {
  // Iterations of the retry fixture share one test-generation prompt apart
  // from the round number.
  const CampaignResult r = run_fixture("factory_retry");
  std::vector<std::string> hashes;
  for (const auto& e : r.trace.events())
    if (e.agent == "tests" && e.event == "completion") hashes.push_back(e.prompt_hash);
  ASSERT_EQ(hashes.size(), 3u);
  EXPECT_NE(hashes[0], hashes[1]);
  EXPECT_NE(hashes[1], hashes[2]);
}
