#include "optmut/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "optmut/model_text.hpp"

namespace optmut {

std::optional<double> CampaignReport::ratio() const {
  if (total() == 0) return std::nullopt;
  return static_cast<double>(killed) / static_cast<double>(total());
}

CampaignReport make_campaign_report(std::string problem_id, std::size_t iterations, std::size_t budget,
                                    Verdict verdict, const std::vector<Mutant>& mutants,
                                    const std::vector<MutantVerdict>& verdicts) {
  if (mutants.size() != verdicts.size())
    throw Error(ErrorCode::PreconditionFailed, "every mutant needs exactly one verdict");
  CampaignReport r;
  r.problem_id = std::move(problem_id);
  r.iterations = iterations;
  r.budget = budget;
  r.verdict = verdict;
  for (std::size_t i = 0; i < mutants.size(); ++i) {
    r.mutants.push_back({mutants[i].id, mutants[i].mutation.kind, mutants[i].mutation.description, verdicts[i]});
    switch (verdicts[i].status) {
      case MutantStatus::Killed: ++r.killed; break;
      case MutantStatus::Survived: ++r.survived; break;
      case MutantStatus::Stillborn: ++r.stillborn; break;
    }
  }
  std::stable_sort(r.mutants.begin(), r.mutants.end(),
                   [](const MutantEntry& a, const MutantEntry& b) { return mutant_id_less(a.id, b.id); });
  return r;
}

std::vector<HistogramBin> iteration_histogram(const std::vector<double>& values, double width) {
  if (!(width > 0.0)) throw Error(ErrorCode::PreconditionFailed, "histogram bin width must be positive");
  if (values.empty()) return {};
  std::map<long long, std::size_t> counts;
  for (double v : values) ++counts[std::llround(v / width)];
  std::vector<HistogramBin> bins;
  for (long long k = counts.begin()->first; k <= counts.rbegin()->first; ++k) {
    auto it = counts.find(k);
    bins.push_back({static_cast<double>(k) * width, it == counts.end() ? 0 : it->second});
  }
  return bins;
}

AggregateReport aggregate(const std::vector<CampaignReport>& runs) {
  std::map<std::string, ProblemSummary> by_id;
  std::map<std::string, double> iteration_sums;
  AggregateReport out;
  for (const auto& r : runs) {
    ProblemSummary& p = by_id[r.problem_id];
    p.problem_id = r.problem_id;
    ++p.runs;
    p.passed_runs += r.verdict == Verdict::Pass;
    p.killed += r.killed;
    p.survived += r.survived;
    p.stillborn += r.stillborn;
    iteration_sums[r.problem_id] += static_cast<double>(r.iterations);
    out.killed += r.killed;
    out.survived += r.survived;
    out.stillborn += r.stillborn;
  }
  std::vector<double> means;
  double sum = 0.0;
  for (auto& [id, p] : by_id) {
    p.mean_iterations = iteration_sums[id] / static_cast<double>(p.runs);
    means.push_back(p.mean_iterations);
    sum += p.mean_iterations;
    out.problems.push_back(p);
  }
  if (!means.empty()) out.mean_iterations = sum / static_cast<double>(means.size());
  if (out.killed + out.survived > 0)
    out.ratio = static_cast<double>(out.killed) / static_cast<double>(out.killed + out.survived);
  out.histogram = iteration_histogram(means);
  return out;
}

std::string to_csv(const AggregateReport& report) {
  std::ostringstream os;
  os << "problem_id,runs,mean_iterations,passed_runs,killed,survived,stillborn,ratio,coverage\n";
  auto row = [&](const std::string& id, std::size_t runs, double iters, std::size_t passed, std::size_t k,
                 std::size_t s, std::size_t b) {
    os << id << ',' << runs << ',' << format_number(iters) << ',' << passed << ',' << k << ',' << s << ',' << b << ',';
    if (k + s > 0) {
      const double ratio = static_cast<double>(k) / static_cast<double>(k + s);
      os << format_number(ratio) << ',' << format_number(round2(ratio));
    } else {
      os << ',';
    }
    os << '\n';
  };
  std::size_t runs = 0, passed = 0;
  for (const auto& p : report.problems) {
    row(p.problem_id, p.runs, p.mean_iterations, p.passed_runs, p.killed, p.survived, p.stillborn);
    runs += p.runs;
    passed += p.passed_runs;
  }
  row("TOTAL", runs, report.mean_iterations, passed, report.killed, report.survived, report.stillborn);
  return os.str();
}

std::vector<BenchmarkProblem> scan_benchmark(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  auto problem_at = [](const fs::path& dir) {
    BenchmarkProblem p;
    p.id = dir.filename().string();
    if (p.id.empty()) p.id = dir.parent_path().filename().string();
    p.description = dir / "description.txt";
    if (fs::is_regular_file(dir / "solution.json")) p.solution = dir / "solution.json";
    return p;
  };
  if (!fs::is_directory(root)) throw Error(ErrorCode::IoError, "'" + root.string() + "' is not a directory");
  if (fs::is_regular_file(root / "description.txt")) return {problem_at(root)};
  std::vector<BenchmarkProblem> out;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "description.txt")) out.push_back(problem_at(entry.path()));
  std::sort(out.begin(), out.end(), [](const BenchmarkProblem& a, const BenchmarkProblem& b) { return a.id < b.id; });
  return out;
}

std::optional<double> reference_objective(const std::filesystem::path& solution_json) {
  const Json j = parse_json(read_text_file(solution_json));
  if (!j.is_object()) return std::nullopt;
  auto it = j.find("objective");
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

}  // namespace optmut
