#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>

#include "optmut/agents/adjuster.hpp"
#include "optmut/agents/campaign.hpp"
#include "optmut/json_io.hpp"
#include "optmut/model_text.hpp"
#include "optmut/mutation.hpp"
#include "optmut/report.hpp"
#include "optmut/solver.hpp"

namespace optmut::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbindableSuite: return kBaselineBroken;
    case ErrorCode::LlmOutputInvalid: return kCampaignFailed;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::FixtureMissing: return kProviderError;
    default: return kInputError;
  }
}

namespace {

// Raised after diagnostics have already been printed.
struct Reported {
  int code;
};

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string status_word(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

LpModel load_model(const std::string& path, std::ostream& err) {
  const std::string text = read_text_file(path);
  if (fs::path(path).extension() == ".json") return model_from_json(parse_json(text));
  const ParseResult r = parse_model(text);
  if (!r.ok()) {
    for (const auto& d : r.diagnostics) err << path << ":" << d.to_string() << "\n";
    throw Reported{kInputError};
  }
  return r.document->model;
}

BusinessInterface load_interface(const std::string& explicit_path, const std::string& suite_path) {
  const fs::path path = explicit_path.empty() ? fs::path(suite_path).parent_path() / "interface.json" : fs::path(explicit_path);
  return interface_from_json(parse_json(read_text_file(path)));
}

ParameterValues parse_scenario(const std::vector<std::string>& items) {
  ParameterValues out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::SyntaxError, "scenario entry '" + item + "' is not name=value");
    const std::string name = item.substr(0, eq), value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty())
      throw Error(ErrorCode::SyntaxError, "scenario value '" + value + "' is not a number");
    out[name] = v;
  }
  return out;
}

std::unique_ptr<agents::LlmProvider> make_provider(const std::string& choice) {
  if (choice == "offline") return std::make_unique<agents::OfflineProvider>();
  if (choice == "http") {
    agents::HttpConfig cfg = agents::HttpConfig::from_environment();
    if (cfg.api_key.empty()) throw Error(ErrorCode::ProviderUnavailable, "OPTMUT_API_KEY is not set");
    return std::make_unique<agents::HttpChatProvider>(cfg);
  }
  const std::string prefix = "scripted:";
  if (choice.rfind(prefix, 0) == 0) return std::make_unique<agents::ScriptedProvider>(choice.substr(prefix.size()));
  throw Error(ErrorCode::PreconditionFailed, "unknown provider '" + choice + "' (scripted:<dir>, http or offline)");
}

agents::TemplateSet load_templates(const std::string& dir) {
  return dir.empty() ? agents::TemplateSet::embedded() : agents::TemplateSet::with_overrides(dir);
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string model;
  std::vector<std::string> scenario;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const LpModel model = load_model(a.model, err);
  const LpModel inst = instantiate(model, parse_scenario(a.scenario));
  const Solution s = solve_milp(inst);
  if (!s.optimal()) {
    out << status_word(s.status) << "\n";
    return s.status == SolveStatus::IterationLimit ? kIterationLimit : kNoOptimum;
  }
  out << "Optimal " << g12(*s.objective) << ";";
  for (std::size_t i = 0; i < inst.variables.size(); ++i) out << " " << inst.variables[i].name << "=" << g12(s.values[i]);
  out << "\n";
  return kOk;
}

// --- mutate ----------------------------------------------------------------

struct MutateArgs {
  std::string model, suite, binding, interface, ops, out = "mutants.json";
  std::size_t budget = 1;
  std::uint64_t seed = 1;
};

int cmd_mutate(const MutateArgs& a, std::ostream& out, std::ostream& err) {
  const LpModel model = load_model(a.model, err);
  const TestSuite suite = suite_from_json(parse_json(read_text_file(a.suite)));
  const InterfaceBinding binding = binding_from_json(parse_json(read_text_file(a.binding)));
  const BusinessInterface bi = load_interface(a.interface, a.suite);
  validate(suite, bi);

  std::set<MutationOperator> ops;
  if (a.ops.empty()) {
    ops.insert(std::begin(kAllOperators), std::end(kAllOperators));
  } else {
    std::stringstream ss(a.ops);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto op = parse_operator(item);
      if (!op) throw Error(ErrorCode::PreconditionFailed, "unknown mutation operator '" + item + "'");
      ops.insert(*op);
    }
  }

  const SuiteReport base = run_suite(suite, model, binding, bi);
  if (!base.passed()) {
    err << "BaselineBroken: suite does not pass on the base model:";
    for (const auto& c : base.failing_cases()) err << " " << c;
    err << "\n";
    return kBaselineBroken;
  }
  const auto mutants = generate_mutants(model, ops, a.budget, a.seed);
  EvaluationContext ctx{model, suite, binding, bi};
  const auto verdicts = evaluate_mutants(mutants, ctx);
  const CampaignReport summary = make_campaign_report(model.name, 0, 0, Verdict::Pass, mutants, verdicts);
  std::optional<CoverageReport> cov;
  try {
    cov = coverage(verdicts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoValidMutants) throw;
  }
  write_file_atomic(a.out, canonical_dump(mutants_to_json(model.name, summary.mutants, cov)));
  for (const auto& m : summary.mutants) {
    out << m.id << " " << m.description << ": " << to_string(m.verdict.status);
    if (!m.verdict.failing_cases.empty()) {
      out << " (";
      for (std::size_t i = 0; i < m.verdict.failing_cases.size(); ++i) out << (i ? ", " : "") << m.verdict.failing_cases[i];
      out << ")";
    }
    if (m.verdict.potentially_equivalent) out << " [potentially equivalent]";
    out << "\n";
  }
  if (!cov) {
    err << "NoValidMutants: every mutant is stillborn\n";
    return kInputError;
  }
  out << "coverage " << cov->killed << "/" << cov->total << " = " << g12(cov->mc_percent) << "% (ratio "
      << g12(round2(cov->ratio)) << ")\n";
  return kOk;
}

// --- campaign --------------------------------------------------------------

struct CampaignArgs {
  std::string input, provider = "http", out = "campaign", prompts;
  std::size_t budget = 10;
  std::uint64_t seed = 1;
  double temperature = 1.0;
  bool regenerate_interface = false;
};

int cmd_campaign(const CampaignArgs& a, std::ostream& out, std::ostream&) {
  std::vector<BenchmarkProblem> problems;
  const fs::path input(a.input);
  if (fs::is_regular_file(input)) {
    BenchmarkProblem p;
    p.description = input;
    const fs::path dir = fs::absolute(input).parent_path();
    p.id = input.filename() == "description.txt" ? dir.filename().string() : input.stem().string();
    if (fs::is_regular_file(dir / "solution.json")) p.solution = dir / "solution.json";
    problems.push_back(p);
  } else if (fs::is_directory(input)) {
    problems = scan_benchmark(input);
    if (problems.empty()) throw Error(ErrorCode::IoError, "no description.txt under '" + a.input + "'");
  } else {
    throw Error(ErrorCode::IoError, "'" + a.input + "' does not exist");
  }

  auto provider = make_provider(a.provider);
  const agents::TemplateSet templates = load_templates(a.prompts);
  const bool single = problems.size() == 1 && fs::is_regular_file(input);
  bool all_pass = true;
  for (const auto& p : problems) {
    agents::CampaignConfig cfg;
    cfg.budget = a.budget;
    cfg.seed = a.seed;
    cfg.decoding.temperature = a.temperature;
    cfg.regenerate_interface = a.regenerate_interface;
    cfg.problem_id = p.id;
    if (p.solution) cfg.reference_objective = reference_objective(*p.solution);
    const auto result = agents::run_campaign(*provider, templates, read_text_file(p.description), cfg);
    const fs::path dir = single ? fs::path(a.out) : fs::path(a.out) / p.id;
    agents::write_campaign_artifacts(result, dir);
    const CampaignReport& r = result.report;
    out << p.id << ": " << to_string(r.verdict) << " after " << r.iterations << " iteration(s); mutants " << r.killed
        << " killed, " << r.survived << " survived, " << r.stillborn << " stillborn";
    if (auto ratio = r.ratio()) out << "; MC " << g12(100.0 * *ratio) << "%";
    if (r.reference_objective && r.objective) out << "; objective " << g12(*r.objective) << " vs reference " << g12(*r.reference_objective);
    out << "\n";
    all_pass &= r.verdict == Verdict::Pass;
  }
  return all_pass ? kOk : kCampaignFailed;
}

// --- check-external --------------------------------------------------------

struct CheckArgs {
  std::string model, suite, description, interface, provider = "offline", out, prompts;
  bool no_fallback = false;
};

int cmd_check_external(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const LpModel model = load_model(a.model, err);
  const TestSuite suite = suite_from_json(parse_json(read_text_file(a.suite)));
  const BusinessInterface bi = load_interface(a.interface, a.suite);
  const std::string description = read_text_file(a.description);
  auto provider = make_provider(a.provider);
  const agents::TemplateSet templates = load_templates(a.prompts);
  agents::Trace trace;
  agents::AgentContext ctx{*provider, templates, trace};
  agents::AdjustOptions options;
  options.allow_fallback = !a.no_fallback;
  const agents::AdjustResult adjusted = agents::adjust_tests(ctx, description, model, suite, bi, options);
  const SuiteReport report = run_suite(adjusted.suite, model, adjusted.binding, bi);

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_file_atomic(fs::path(a.out) / "testsuite.json", canonical_dump(to_json(adjusted.suite)));
    write_file_atomic(fs::path(a.out) / "binding.json", canonical_dump(to_json(adjusted.binding)));
    write_file_atomic(fs::path(a.out) / "trace.log", trace.to_jsonl());
  } else {
    out << canonical_dump(to_json(adjusted.suite));
  }
  out << "binding (" << (adjusted.used_fallback ? "name matching" : "provider") << "):";
  for (const auto& [q, e] : adjusted.binding.quantities) out << " " << q << "->" << e;
  for (const auto& [p, m] : adjusted.binding.parameters) out << " " << p << "->" << m;
  out << "\n";
  for (const auto& c : report.cases) {
    out << "case " << c.name << ": " << to_string(c.verdict);
    if (!c.diagnostic.empty()) out << " (" << c.diagnostic << ")";
    out << "\n";
    for (const auto& as : c.assertions)
      if (as.verdict != Verdict::Pass) out << "  " << to_string(as.verdict) << ": " << as.message << "\n";
  }
  out << "verdict " << to_string(report.verdict) << "\n";
  return report.passed() ? kOk : kSuiteFailed;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> dirs;
  std::string out, csv;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
  if (a.dirs.empty()) throw Error(ErrorCode::PreconditionFailed, "no report directories given");
  std::vector<CampaignReport> runs;
  for (const auto& d : a.dirs) {
    const fs::path dir(d);
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "'" + d + "' is not a directory");
    std::vector<fs::path> files;
    if (fs::is_regular_file(dir / "report.json")) {
      files.push_back(dir / "report.json");
    } else {
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && fs::is_regular_file(e.path() / "report.json")) files.push_back(e.path() / "report.json");
      std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw Error(ErrorCode::IoError, "no report.json under '" + d + "'");
    for (const auto& f : files) runs.push_back(campaign_report_from_json(parse_json(read_text_file(f))));
  }
  const AggregateReport agg = aggregate(runs);
  const std::string json = canonical_dump(to_json(agg));
  if (a.out.empty())
    out << json;
  else
    write_file_atomic(a.out, json);
  if (!a.csv.empty()) write_file_atomic(a.csv, to_csv(agg));
  if (!a.out.empty()) {
    out << runs.size() << " run(s), " << agg.problems.size() << " problem(s); killed " << agg.killed << ", survived "
        << agg.survived;
    if (agg.ratio) out << ", ratio " << g12(round2(*agg.ratio));
    out << "\n";
  }
  return kOk;
}

// --- fixtures record -------------------------------------------------------

struct RecordArgs {
  std::string responses, description, out, prompts, mode = "campaign", model, suite, interface;
  std::size_t budget = 10;
  std::uint64_t seed = 1;
};

int cmd_record(const RecordArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.responses))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> responses;
  for (const auto& f : files) responses.push_back(read_text_file(f));
  agents::SequenceProvider sequence(responses);
  agents::RecordingProvider recorder(sequence, a.out);
  const agents::TemplateSet templates = load_templates(a.prompts);
  const std::string description = read_text_file(a.description);
  if (a.mode == "campaign") {
    agents::CampaignConfig cfg;
    cfg.budget = a.budget;
    cfg.seed = a.seed;
    agents::run_campaign(recorder, templates, description, cfg);
  } else if (a.mode == "adjust") {
    const LpModel model = load_model(a.model, err);
    const TestSuite suite = suite_from_json(parse_json(read_text_file(a.suite)));
    const BusinessInterface bi = load_interface(a.interface, a.suite);
    agents::Trace trace;
    agents::AgentContext ctx{recorder, templates, trace};
    agents::adjust_tests(ctx, description, model, suite, bi);
  } else {
    throw Error(ErrorCode::PreconditionFailed, "unknown record mode '" + a.mode + "'");
  }
  for (const auto& h : recorder.recorded()) out << h << "\n";
  if (sequence.remaining() != 0) {
    err << sequence.remaining() << " response(s) were not consumed\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mutation-driven test generation for optimization models", "optmut"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve a model and print the optimum");
  s->add_option("model", solve.model, "Model file (.optmod or .json)")->required();
  s->add_option("--scenario", solve.scenario, "Parameter override name=value");

  MutateArgs mutate;
  auto* m = app.add_subcommand("mutate", "Generate mutants and measure suite coverage");
  m->add_option("model", mutate.model)->required();
  m->add_option("--suite", mutate.suite)->required();
  m->add_option("--binding", mutate.binding)->required();
  m->add_option("--interface", mutate.interface, "Defaults to interface.json next to the suite");
  m->add_option("--budget", mutate.budget)->check(CLI::PositiveNumber);
  m->add_option("--seed", mutate.seed);
  m->add_option("--ops", mutate.ops, "Comma-separated operators");
  m->add_option("--out", mutate.out);

  CampaignArgs campaign;
  auto* c = app.add_subcommand("campaign", "Run the generation loop on a description or benchmark directory");
  c->add_option("input", campaign.input)->required();
  c->add_option("--provider", campaign.provider, "scripted:<dir>, http or offline");
  c->add_option("--budget", campaign.budget)->check(CLI::PositiveNumber);
  c->add_option("--out", campaign.out);
  c->add_option("--seed", campaign.seed);
  c->add_option("--temperature", campaign.temperature);
  c->add_option("--prompts", campaign.prompts, "Directory of template overrides");
  c->add_flag("--regenerate-interface", campaign.regenerate_interface);

  CheckArgs check;
  auto* x = app.add_subcommand("check-external", "Adjust a suite to an external model and run it");
  x->add_option("model", check.model)->required();
  x->add_option("--suite", check.suite)->required();
  x->add_option("--description", check.description)->required();
  x->add_option("--interface", check.interface);
  x->add_option("--provider", check.provider);
  x->add_option("--out", check.out);
  x->add_option("--prompts", check.prompts);
  x->add_flag("--no-fallback", check.no_fallback);

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Aggregate campaign reports");
  r->add_option("dirs", report.dirs);
  r->add_option("--out", report.out);
  r->add_option("--csv", report.csv);

  RecordArgs record;
  auto* f = app.add_subcommand("fixtures", "Fixture maintenance");
  f->require_subcommand(1);
  auto* fr = f->add_subcommand("record", "Record scripted-provider fixtures from ordered responses");
  fr->add_option("--responses", record.responses)->required()->check(CLI::ExistingDirectory);
  fr->add_option("--description", record.description)->required();
  fr->add_option("--out", record.out)->required();
  fr->add_option("--mode", record.mode, "campaign or adjust");
  fr->add_option("--model", record.model);
  fr->add_option("--suite", record.suite);
  fr->add_option("--interface", record.interface);
  fr->add_option("--budget", record.budget);
  fr->add_option("--seed", record.seed);
  fr->add_option("--prompts", record.prompts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*s) return cmd_solve(solve, out, err);
    if (*m) return cmd_mutate(mutate, out, err);
    if (*c) return cmd_campaign(campaign, out, err);
    if (*x) return cmd_check_external(check, out, err);
    if (*r) return cmd_report(report, out, err);
    if (*fr) return cmd_record(record, out, err);
  } catch (const Reported& rep) {
    return rep.code;
  } catch (const Error& e) {
    err << e.describe() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace optmut::cli
