// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "optmut/agents/campaign.hpp"
#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "optmut/model_text.hpp"
#include "optmut/mutation.hpp"
#include "optmut/report.hpp"
#include "optmut/solver.hpp"
#include "oracle/oracle.hpp"
#include "oracle/random_models.hpp"

using namespace optmut;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kExact = 1e-9;
constexpr double kScaleRel = 1e-9;
constexpr double kOracleTol = 1e-6;
constexpr double kPercentTol = 1e-4;
constexpr double kMinCoverage = 80.0;

// Time limits in seconds.
constexpr double kAc1Seconds = 1.0;
constexpr double kAc5Seconds = 60.0;
constexpr double kAc6Seconds = 30.0;

constexpr int kRandomLps = 500;
constexpr int kRandomMilps = 100;
constexpr int kFuzzInputs = 10'000;

const char* kTwoProduct = R"(model two_product
vars
  x, y
maximize 120 x + 90 y
subject_to
  c1: x + y <= 8
  c2: 2 x + y <= 10
)";

fs::path fixture(const std::string& rel) { return fs::path(OPTMUT_FIXTURES) / rel; }

template <class F>
auto load(const std::string& rel, F reader) {
  return reader(parse_json(read_text_file(fixture(rel))));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail = what;
    pass = false;
  }
};

// --- AC1 ---------------------------------------------------------------

Outcome ac1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const LpModel primal = parse_model_or_throw(kTwoProduct);
  const Solution p = solve_lp(primal);
  const LpModel dual_model = dualize(primal);
  const Solution d = solve_lp(dual_model);
  const double elapsed = seconds_since(start);

  o.require(p.optimal() && near(*p.objective, 780.0, kExact), "primal objective");
  o.require(p.optimal() && near(value_of(primal, p, "x"), 2.0, kExact) && near(value_of(primal, p, "y"), 6.0, kExact),
            "primal argmax");
  o.require(d.optimal() && near(*d.objective, 780.0, kExact), "dual objective");
  o.require(d.optimal() && near(value_of(dual_model, d, "u_c1"), 60.0, kExact) &&
                near(value_of(dual_model, d, "u_c2"), 30.0, kExact),
            "dual point");
  o.require(elapsed < kAc1Seconds, "time");
  char buf[128];
  std::snprintf(buf, sizeof buf, "primal=%g dual=%g in %.3fs", p.objective.value_or(NAN), d.objective.value_or(NAN),
                elapsed);
  if (o.pass) o.detail = buf;
  return o;
}

// --- AC2 ---------------------------------------------------------------

TestSuite point_and_quantity_only(const TestSuite& suite) {
  TestSuite out{suite.interface_name, {}};
  for (const auto& c : suite.cases) {
    TestCase kept{c.name, c.scenario, {}};
    for (const auto& a : c.assertions)
      if (std::holds_alternative<PointFeasible>(a) || std::holds_alternative<QuantityCompare>(a))
        kept.assertions.push_back(a);
    if (!kept.assertions.empty()) out.cases.push_back(std::move(kept));
  }
  return out;
}

Outcome ac2() {
  Outcome o;
  const LpModel base = parse_model_or_throw(read_text_file(fixture("factory/model.optmod")));
  const auto bi = load("factory/interface.json", interface_from_json);
  const auto binding = load("factory/binding.json", binding_from_json);
  const TestSuite suite = point_and_quantity_only(load("factory/testsuite.json", suite_from_json));
  const Solution ref = solve_lp(base);
  const auto ref_vertex = oracle::enumerate_vertices(base);
  const SuiteReport ref_report = run_suite(suite, base, binding, bi);
  o.require(!suite.cases.empty(), "filtered suite is empty");

  for (double factor : {0.5, 10.0, 1000.0}) {
    const std::string tag = " at factor " + format_number(factor);
    const LpModel scaled = scale_objective(base, factor);
    o.require(scaled.constraints == base.constraints && scaled.variables == base.variables, "feasible region" + tag);
    const Solution s = solve_lp(scaled);
    const auto vertex = oracle::enumerate_vertices(scaled);
    o.require(s.optimal() && s.values == ref.values, "argmax" + tag);
    o.require(vertex.x == ref_vertex.x, "oracle argmax" + tag);
    const double expected = factor * *ref.objective;
    o.require(s.optimal() && std::abs(*s.objective - expected) <= kScaleRel * std::abs(expected), "objective" + tag);
    const SuiteReport report = run_suite(suite, scaled, binding, bi);
    bool same = report.verdict == ref_report.verdict && report.cases.size() == ref_report.cases.size();
    for (std::size_t i = 0; same && i < report.cases.size(); ++i) same = report.cases[i].verdict == ref_report.cases[i].verdict;
    o.require(same, "suite verdicts" + tag);
  }
  if (o.pass) o.detail = "factors 0.5, 10, 1000 over " + std::to_string(suite.cases.size()) + " case(s)";
  return o;
}

// --- AC3 ---------------------------------------------------------------

Outcome ac3() {
  Outcome o;
  const LpModel base = parse_model_or_throw(read_text_file(fixture("factory/model.optmod")));
  const auto bi = load("factory/interface.json", interface_from_json);
  const auto binding = load("factory/binding.json", binding_from_json);
  const auto suite = load("factory/testsuite.json", suite_from_json);

  o.require(run_suite(suite, base, binding, bi).passed(), "base suite does not pass");
  const auto mutants = generate_mutants(base, {MutationOperator::RhsDelta}, 1, 2);
  o.require(mutants.size() == 1, "mutant count");
  if (!o.pass) return o;
  const LpModel inst = instantiate(mutants[0].model);
  const Constraint* row = inst.find_constraint("assembly");
  o.require(row && row->sense == Sense::Le && row->rhs == Scalar(7.0), "mutant is not x + y <= 7");
  EvaluationContext ctx{base, suite, binding, bi};
  const MutantVerdict v = evaluate_mutant(mutants[0], ctx);
  o.require(v.status == MutantStatus::Killed, "mutant verdict " + std::string(to_string(v.status)));
  if (o.pass) {
    o.detail = mutants[0].mutation.description + ": killed by";
    for (const auto& c : v.failing_cases) o.detail += " " + c;
  }
  return o;
}

// --- AC4 ---------------------------------------------------------------

Outcome ac4() {
  Outcome o;
  struct Expect {
    const char* dir;
    std::size_t killed, survived;
    double rounded, percent;
  };
  const Expect expects[] = {{"reports/run_a", 142, 46, 0.76, 75.5319}, {"reports/run_b", 131, 58, 0.69, 69.3122}};
  std::string detail;
  for (const auto& e : expects) {
    std::vector<CampaignReport> runs;
    for (const auto& entry : fs::directory_iterator(fixture(e.dir)))
      if (fs::exists(entry.path() / "report.json"))
        runs.push_back(campaign_report_from_json(parse_json(read_text_file(entry.path() / "report.json"))));
    const AggregateReport agg = aggregate(runs);
    o.require(agg.killed == e.killed && agg.survived == e.survived, std::string(e.dir) + " counts");
    o.require(agg.ratio && near(round2(*agg.ratio), e.rounded, kExact), std::string(e.dir) + " rounded ratio");
    o.require(agg.ratio && near(100.0 * *agg.ratio, e.percent, kPercentTol), std::string(e.dir) + " percent");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%zu/%zu -> %.2f (%.4f%%)", detail.empty() ? "" : "; ", agg.killed,
                  agg.killed + agg.survived, round2(agg.ratio.value_or(0)), 100.0 * agg.ratio.value_or(0));
    detail += buf;
  }
  if (o.pass) o.detail = detail;
  return o;
}

// --- AC5 ---------------------------------------------------------------

Outcome ac5() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(424242);
  int optimal = 0;
  for (int i = 0; i < kRandomLps && o.pass; ++i) {
    const LpModel m = oracle::random_model(rng, false);
    const Solution s = solve_lp(m);
    const auto ref = oracle::enumerate_vertices(m);
    o.require(s.status == ref.status, "LP " + std::to_string(i) + " status");
    if (ref.status != SolveStatus::Optimal || !o.pass) continue;
    ++optimal;
    o.require(near(*s.objective, ref.objective, kOracleTol), "LP " + std::to_string(i) + " objective");
  }
  int milp_optimal = 0;
  for (int i = 0; i < kRandomMilps && o.pass; ++i) {
    const LpModel m = oracle::random_model(rng, true);
    const Solution s = solve_milp(m);
    const auto ref = oracle::enumerate_lattice(m);
    o.require(s.status == ref.status, "MILP " + std::to_string(i) + " status");
    if (ref.status != SolveStatus::Optimal || !o.pass) continue;
    ++milp_optimal;
    o.require(near(*s.objective, ref.objective, kOracleTol), "MILP " + std::to_string(i) + " objective");
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < kAc5Seconds, "time");
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d LPs (%d optimal), %d MILPs (%d optimal) in %.2fs", kRandomLps, optimal,
                  kRandomMilps, milp_optimal, elapsed);
    o.detail = buf;
  }
  return o;
}

// --- AC6 ---------------------------------------------------------------

std::map<std::string, std::string> slurp(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_text_file(e.path());
  return out;
}

Outcome ac6() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto scratch = fs::temp_directory_path() / "optmut_acceptance_ac6";
  fs::remove_all(scratch);
  double min_mc = 100.0;
  std::size_t max_iterations = 0;
  for (const std::string problem : {"factory", "diet", "blend", "crates", "staffing"}) {
    const fs::path dir = fixture("campaigns/" + problem);
    const std::string description = read_text_file(dir / "description.txt");
    agents::CampaignConfig cfg;
    cfg.budget = 10;
    cfg.problem_id = problem;
    for (int run = 0; run < 2; ++run) {
      agents::ScriptedProvider provider(dir / "scripted");
      const auto r = agents::run_campaign(provider, agents::TemplateSet::embedded(), description, cfg);
      agents::write_campaign_artifacts(r, scratch / problem / std::to_string(run));
      if (run) continue;
      o.require(r.verdict == Verdict::Pass && !r.budget_exhausted, problem + " did not converge");
      o.require(r.coverage.has_value() && r.coverage->mc_percent >= kMinCoverage, problem + " coverage");
      if (r.coverage) min_mc = std::min(min_mc, r.coverage->mc_percent);
      max_iterations = std::max(max_iterations, r.iterations);
    }
    o.require(slurp(scratch / problem / "0") == slurp(scratch / problem / "1"), problem + " artifacts differ");
  }
  fs::remove_all(scratch);
  const double elapsed = seconds_since(start);
  o.require(elapsed < kAc6Seconds, "time");
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "5 problems, max %zu iteration(s), min MC %g%%, identical reruns, %.2fs",
                  max_iterations, min_mc, elapsed);
    o.detail = buf;
  }
  return o;
}

// --- AC7 ---------------------------------------------------------------

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "optmut");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

Outcome ac7() {
  Outcome o;
  const std::string suite = fixture("factory/testsuite.json").string();
  const std::string description = fixture("campaigns/factory/description.txt").string();
  std::string text;
  const int gearbox = cli({"check-external", fixture("external/gearbox/model.optmod").string(), "--suite", suite,
                           "--description", description, "--provider",
                           "scripted:" + fixture("external/gearbox/scripted").string()},
                          &text);
  o.require(gearbox == cli::kOk && text.find("verdict pass") != std::string::npos, "gearbox");
  const int flipped = cli({"check-external", fixture("external/flipped/model.optmod").string(), "--suite", suite,
                           "--description", description},
                          &text);
  o.require(flipped == cli::kSuiteFailed && text.find("verdict fail") != std::string::npos, "flipped");
  const int relaxed = cli({"check-external", fixture("external/crates_relaxed/model.optmod").string(), "--suite",
                           fixture("external/crates_relaxed/testsuite.json").string(), "--description",
                           fixture("external/crates_relaxed/description.txt").string()},
                          &text);
  o.require(relaxed == cli::kSuiteFailed && text.find("verdict fail") != std::string::npos, "crates_relaxed");
  if (o.pass) o.detail = "gearbox pass, flipped fail, crates_relaxed fail";
  return o;
}

// --- AC8 ---------------------------------------------------------------

std::vector<fs::path> corpus_models() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(fixture("")))
    if (e.is_regular_file() && e.path().extension() == ".optmod") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string fuzz_input(std::mt19937_64& rng, const std::vector<std::string>& seeds) {
  static const std::string alphabet =
      "model vars params subject_to maximize minimize int binary free in [],:=<>+-*/()0123456789.eE \n\tabxyz_";
  std::string text;
  if (rng() % 2 && !seeds.empty()) {
    text = seeds[rng() % seeds.size()];
    const std::size_t edits = 1 + rng() % 6;
    for (std::size_t k = 0; k < edits && !text.empty(); ++k) {
      const std::size_t at = rng() % text.size();
      const std::size_t line = text.rfind('\n', at) == std::string::npos ? 0 : text.rfind('\n', at) + 1;
      const std::size_t line_end = std::min(text.size(), text.find('\n', at) + 1);
      switch (rng() % 6) {
        case 0: text.erase(at, 1 + rng() % 8); break;
        case 1: text.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
        case 2: text[at] = static_cast<char>(rng() % 256); break;
        case 3:
          if (std::isdigit(static_cast<unsigned char>(text[at]))) text[at] = static_cast<char>('0' + rng() % 10);
          break;
        case 4: text.erase(line, line_end - line); break;
        default: text.insert(line, text.substr(line, line_end - line));
      }
    }
  } else {
    const std::size_t len = rng() % 240;
    for (std::size_t k = 0; k < len; ++k)
      text += rng() % 5 == 0 ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()];
  }
  return text;
}

Outcome ac8() {
  Outcome o;
  std::vector<std::string> seeds;
  std::vector<LpModel> corpus;
  for (const auto& path : corpus_models()) {
    seeds.push_back(read_text_file(path));
    ParseResult r = parse_model(seeds.back());
    if (r.ok()) corpus.push_back(r.document->model);
  }

  SolverConfig small;
  small.max_pivots = 2'000;
  small.max_nodes = 200;
  std::mt19937_64 rng(8);
  std::size_t parsed = 0;
  for (int i = 0; i < kFuzzInputs && o.pass; ++i) {
    const std::string text = fuzz_input(rng, seeds);
    try {
      const ParseResult r = parse_model(text);
      if (!r.ok()) {
        o.require(!r.diagnostics.empty() && r.diagnostics.front().span.line >= 1, "fuzz input without diagnostic");
        continue;
      }
      ++parsed;
      try {
        solve_milp(r.document->model, small);
      } catch (const Error&) {
      }
    } catch (const std::exception& e) {
      o.require(false, "fuzz input " + std::to_string(i) + ": " + e.what());
    }
  }

  std::size_t mutants = 0;
  std::set<MutationOperator> ops(std::begin(kAllOperators), std::end(kAllOperators));
  for (const auto& model : corpus) {
    std::vector<Mutant> ms;
    try {
      ms = generate_mutants(model, ops, 1'000, 1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoApplicableOperator) o.require(false, model.name + ": " + e.what());
      continue;
    }
    for (const auto& m : ms) {
      ++mutants;
      try {
        solve_milp(m.model);
      } catch (const std::exception& e) {
        o.require(false, model.name + " " + m.mutation.description + ": " + e.what());
      }
    }
  }
  o.require(mutants > 0, "no mutants generated");
  if (o.pass)
    o.detail = std::to_string(kFuzzInputs) + " fuzz inputs (" + std::to_string(parsed) + " parsed), " +
               std::to_string(mutants) + " mutants over " + std::to_string(corpus.size()) + " models re-solved";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << name << " " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
