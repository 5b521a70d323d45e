#pragma once

// Per-campaign report files, their aggregation across runs, and benchmark
// directory discovery.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optmut/interface.hpp"
#include "optmut/mutation.hpp"

namespace optmut {

struct MutantEntry {
  std::string id;
  MutationKind kind;
  std::string description;
  MutantVerdict verdict;
  bool operator==(const MutantEntry&) const = default;
};

struct CampaignReport {
  std::string problem_id;
  std::size_t iterations = 0;
  std::size_t budget = 0;
  Verdict verdict = Verdict::Fail;  // final suite verdict on the auxiliary model
  std::size_t killed = 0;
  std::size_t survived = 0;
  std::size_t stillborn = 0;
  std::vector<MutantEntry> mutants;  // may be empty when only counts are known
  std::optional<double> objective;   // auxiliary model, default scenario
  std::optional<double> reference_objective;
  bool operator==(const CampaignReport&) const = default;

  std::size_t total() const { return killed + survived; }
  std::optional<double> ratio() const;
};

CampaignReport make_campaign_report(std::string problem_id, std::size_t iterations, std::size_t budget,
                                    Verdict verdict, const std::vector<Mutant>& mutants,
                                    const std::vector<MutantVerdict>& verdicts);

struct HistogramBin {
  double center = 0.0;
  std::size_t count = 0;
  bool operator==(const HistogramBin&) const = default;
};

// Each value lands in the bin whose center is the nearest multiple of
// `width`; bins span the data range without gaps.
std::vector<HistogramBin> iteration_histogram(const std::vector<double>& values, double width = 0.5);

struct ProblemSummary {
  std::string problem_id;
  std::size_t runs = 0;
  double mean_iterations = 0.0;
  std::size_t passed_runs = 0;
  std::size_t killed = 0;
  std::size_t survived = 0;
  std::size_t stillborn = 0;
  bool operator==(const ProblemSummary&) const = default;
};

struct AggregateReport {
  std::vector<ProblemSummary> problems;  // sorted by problem id
  std::size_t killed = 0;
  std::size_t survived = 0;
  std::size_t stillborn = 0;
  std::optional<double> ratio;  // killed / (killed + survived), unrounded
  double mean_iterations = 0.0;
  std::vector<HistogramBin> histogram;
};

// Runs sharing a problem id are averaged before histogramming.
AggregateReport aggregate(const std::vector<CampaignReport>& runs);

std::string to_csv(const AggregateReport& report);

struct BenchmarkProblem {
  std::string id;
  std::filesystem::path description;
  std::optional<std::filesystem::path> solution;
};

// Every immediate subdirectory holding description.txt, ordered by id.
// A directory that itself holds description.txt yields a single problem.
std::vector<BenchmarkProblem> scan_benchmark(const std::filesystem::path& root);

// Reads "objective" from a solution.json when present.
std::optional<double> reference_objective(const std::filesystem::path& solution_json);

}  // namespace optmut
