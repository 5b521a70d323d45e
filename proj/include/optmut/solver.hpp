#pragma once

// Deterministic embedded solver: dense-tableau two-phase primal simplex with
// Bland's rule, and best-first branch-and-bound for integer variables.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optmut/model.hpp"

namespace optmut {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(SolveStatus status);
std::optional<SolveStatus> parse_solve_status(std::string_view text);

struct SolverConfig {
  double feas_tol = 1e-6;
  double opt_tol = 1e-6;  // relative to the largest objective coefficient
  std::size_t max_pivots = 10'000;
  std::size_t max_nodes = 10'000;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  // Aligned with model.variables; empty unless Optimal.
  std::vector<double> values;
  std::optional<double> objective;
  std::size_t pivots = 0;
  std::size_t nodes = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

// Value of `variable` in `solution`; throws Error(UnknownVariable).
double value_of(const LpModel& model, const Solution& solution, const std::string& variable);

// Solves the continuous relaxation (integrality is ignored). Parameter
// references are resolved with the model's defaults.
Solution solve_lp(const LpModel& model, const SolverConfig& cfg = {});

// Honors Integer domains. Identical to solve_lp when no variable is integer.
Solution solve_milp(const LpModel& model, const SolverConfig& cfg = {});

struct Violation {
  // Constraint name, or "<var>.lower", "<var>.upper", "<var>.integer".
  std::string name;
  double slack = 0.0;  // negative
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;  // most violated first
};

using Point = std::map<std::string, double>;

// Throws Error(MissingVariable) when `point` omits a model variable and
// Error(UnknownVariable) when it names one the model lacks.
FeasibilityReport check_feasible(const LpModel& model, const Point& point, double tol = 1e-6);

double evaluate_objective(const LpModel& model, const std::vector<double>& values);

}  // namespace optmut
