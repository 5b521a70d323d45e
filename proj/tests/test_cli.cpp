#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using testing_support::fixture;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "optmut");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = optmut::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string f(const std::string& rel) { return fixture(rel).string(); }

}  // namespace

TEST(Cli, SolvePrintsOptimum) {
  const CliRun r = cli({"solve", f("factory/model.optmod")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Optimal 780; x=2 y=6\n");
}

TEST(Cli, SolveScenario) {
  const CliRun r = cli({"solve", f("factory/model.optmod"), "--scenario", "assembly_cap=7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Optimal 720; x=3 y=4\n");
}

TEST(Cli, SolveExitCodes) {
  EXPECT_EQ(cli({"solve", f("factory/infeasible.optmod")}).code, 2);
  const CliRun bad = cli({"solve", f("factory/bad_syntax.optmod")});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("bad_syntax.optmod:4:15: SyntaxError"), std::string::npos);
  EXPECT_EQ(cli({"solve", "/nonexistent/model.optmod"}).code, 3);
  EXPECT_EQ(cli({"solve"}).code, 3);
}

TEST(Cli, MutateSeedTwoKillsAssemblyMutant) {
  const auto out = testing_support::scratch_dir("cli_mutate") / "mutants.json";
  const CliRun r = cli({"mutate", f("factory/model.optmod"), "--suite", f("factory/testsuite.json"), "--binding",
                     f("factory/binding.json"), "--ops", "rhs_delta", "--seed", "2", "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("killed"), std::string::npos);
  EXPECT_NE(r.out.find("coverage 1/1 = 100%"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(out));
}

TEST(Cli, MutateRejectsBrokenBaselineAndUnknownOperator) {
  const auto dir = testing_support::scratch_dir("cli_broken");
  std::filesystem::copy_file(fixture("factory/interface.json"), dir / "interface.json");
  optmut::Json suite = optmut::parse_json(optmut::read_text_file(fixture("factory/testsuite.json")));
  suite["cases"][0]["assertions"][2]["value"] = 781;
  optmut::write_file_atomic(dir / "testsuite.json", suite.dump());
  const CliRun broken = cli({"mutate", f("factory/model.optmod"), "--suite", (dir / "testsuite.json").string(),
                          "--binding", f("factory/binding.json"), "--out", (dir / "m.json").string()});
  EXPECT_EQ(broken.code, 5) << broken.err;

  const CliRun unknown = cli({"mutate", f("factory/model.optmod"), "--suite", f("factory/testsuite.json"), "--binding",
                           f("factory/binding.json"), "--ops", "domainrelax", "--out", (dir / "m.json").string()});
  EXPECT_EQ(unknown.code, 3);
}

TEST(Cli, CampaignScripted) {
  const auto out = testing_support::scratch_dir("cli_campaign");
  const CliRun ok = cli({"campaign", f("campaigns/factory/description.txt"), "--provider",
                      "scripted:" + f("campaigns/factory/scripted"), "--out", out.string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("factory: pass after 1 iteration(s)"), std::string::npos) << ok.out;
  EXPECT_TRUE(std::filesystem::exists(out / "report.json"));

  const CliRun exhausted = cli({"campaign", f("campaigns/factory_retry/description.txt"), "--provider",
                             "scripted:" + f("campaigns/factory_retry/scripted"), "--budget", "1", "--out",
                             out.string()});
  EXPECT_EQ(exhausted.code, 6);

  EXPECT_EQ(cli({"campaign", "/nonexistent/description.txt", "--provider", "offline"}).code, 3);
  EXPECT_EQ(cli({"campaign", f("campaigns/factory/description.txt"), "--provider", "offline", "--out", out.string()})
                .code,
            7);
}

TEST(Cli, CheckExternal) {
  auto check = [](const std::string& model, const std::string& suite, const std::string& description,
                  std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"check-external", f(model), "--suite", f(suite), "--description", f(description)};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
  };
  const std::string suite = "factory/testsuite.json", description = "campaigns/factory/description.txt";
  const CliRun gearbox = check("external/gearbox/model.optmod", suite, description,
                            {"--provider", "scripted:" + f("external/gearbox/scripted")});
  EXPECT_EQ(gearbox.code, 0) << gearbox.err << gearbox.out;
  EXPECT_NE(gearbox.out.find("binding (provider)"), std::string::npos);
  EXPECT_NE(gearbox.out.find("verdict pass"), std::string::npos);

  const CliRun flipped = check("external/flipped/model.optmod", suite, description);
  EXPECT_EQ(flipped.code, 1) << flipped.err;
  EXPECT_NE(flipped.out.find("verdict fail"), std::string::npos);

  EXPECT_EQ(check("external/crates_relaxed/model.optmod", "external/crates_relaxed/testsuite.json",
                  "external/crates_relaxed/description.txt")
                .code,
            1);
  EXPECT_EQ(check("external/unbindable/model.optmod", suite, description).code, 5);
}

TEST(Cli, Report) {
  EXPECT_EQ(cli({"report"}).code, 3);
  const CliRun a = cli({"report", f("reports/run_a")});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("\"coverage\": 0.76"), std::string::npos) << a.out;
  const auto out = testing_support::scratch_dir("cli_report");
  const CliRun b = cli({"report", f("reports/run_b"), "--out", (out / "aggregate.json").string(), "--csv",
                        (out / "aggregate.csv").string()});
  EXPECT_EQ(b.out, "4 run(s), 4 problem(s); killed 131, survived 58, ratio 0.69\n");
  EXPECT_TRUE(std::filesystem::exists(out / "aggregate.csv"));
}

TEST(Cli, Help) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"frobnicate"}).code, 3);
}
