#pragma once

// Problem-level testing API: business interfaces, bindings onto concrete
// models, declarative assertions and the deterministic suite runner.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optmut/model.hpp"
#include "optmut/solver.hpp"

namespace optmut {

struct Quantity {
  std::string name;
  std::string description;
  std::string units;
  bool operator==(const Quantity&) const = default;
};

struct Kpi {
  std::string name;
  std::string expr;  // arithmetic over quantities, parameters and `objective`
  bool operator==(const Kpi&) const = default;
};

struct InterfaceParameter {
  std::string name;
  double default_value = 0.0;
  std::string description;
  bool operator==(const InterfaceParameter&) const = default;
};

struct BusinessInterface {
  std::string name;
  std::vector<Quantity> quantities;
  std::vector<Kpi> kpis;
  std::vector<InterfaceParameter> parameters;

  const Quantity* find_quantity(const std::string& name) const;
  const Kpi* find_kpi(const std::string& name) const;
  const InterfaceParameter* find_parameter(const std::string& name) const;
  ParameterValues parameter_defaults() const;
  bool operator==(const BusinessInterface&) const = default;
};

// Unique identifiers across quantities, KPIs and parameters; KPI expressions
// parse and mention only declared symbols. Throws Error.
void validate(const BusinessInterface& bi);

// Evaluates every KPI. `parameters` overrides the interface defaults and
// `objective` is visible under the reserved name when given.
// Throws Error(DivisionByZero) naming the KPI.
std::map<std::string, double> evaluate_kpis(const BusinessInterface& bi, const std::map<std::string, double>& quantities,
                                            const ParameterValues& parameters = {},
                                            std::optional<double> objective = std::nullopt);

struct InterfaceBinding {
  std::map<std::string, std::string> quantities;  // quantity -> linear expression over model symbols
  std::map<std::string, std::string> parameters;  // interface parameter -> model parameter
  bool operator==(const InterfaceBinding&) const = default;
};

// Throws Error(BindingIncomplete) listing unbound names, or
// Error(UnknownSymbol) when a target does not exist in the model.
void check_binding(const BusinessInterface& bi, const LpModel& model, const InterfaceBinding& binding);

// Names of interface quantities and parameters the binding does not cover
// or maps onto missing model symbols, in declaration order.
std::vector<std::string> unbound_names(const BusinessInterface& bi, const LpModel& model,
                                       const InterfaceBinding& binding);

struct SolutionRecord {
  SolveStatus status = SolveStatus::Infeasible;
  std::map<std::string, double> quantities;
  std::map<std::string, double> kpis;
  std::optional<double> objective;
};

enum class CompareOp { Le, Ge, Eq, Lt, Gt };
std::string_view to_string(CompareOp op);
std::optional<CompareOp> parse_compare_op(std::string_view text);
// Le/Ge/Eq accept a `tol` margin; Lt/Gt demand a margin wider than `tol`.
bool compare(double actual, CompareOp op, double expected, double tol);

inline constexpr double kDefaultTolerance = 1e-6;

struct StatusIs {
  SolveStatus status = SolveStatus::Optimal;
  bool operator==(const StatusIs&) const = default;
};
struct KpiCompare {
  std::string kpi;
  CompareOp op = CompareOp::Ge;
  double value = 0.0;
  double tol = kDefaultTolerance;
  bool operator==(const KpiCompare&) const = default;
};
struct QuantityCompare {
  std::string quantity;
  CompareOp op = CompareOp::Eq;
  double value = 0.0;
  double tol = kDefaultTolerance;
  bool operator==(const QuantityCompare&) const = default;
};
struct PointFeasible {
  std::map<std::string, double> point;  // quantity -> value
  double tol = kDefaultTolerance;
  bool operator==(const PointFeasible&) const = default;
};
struct PointDominated {
  std::map<std::string, double> point;
  double tol = kDefaultTolerance;
  bool relative = false;
  bool operator==(const PointDominated&) const = default;
};

using Assertion = std::variant<StatusIs, KpiCompare, QuantityCompare, PointFeasible, PointDominated>;

// "status_is", "kpi_compare", "quantity_compare", "point_feasible", "point_dominated"
std::string_view assertion_kind(const Assertion& assertion);
std::string describe(const Assertion& assertion);

struct TestCase {
  std::string name;
  ParameterValues scenario;
  std::vector<Assertion> assertions;
  bool operator==(const TestCase&) const = default;
};

struct TestSuite {
  std::string interface_name;
  std::vector<TestCase> cases;
  bool operator==(const TestSuite&) const = default;
};

// Unique case names, at least one assertion per case, non-negative
// tolerances, and every referenced name declared by `bi`. Throws Error.
void validate(const TestSuite& suite, const BusinessInterface& bi);

enum class Verdict { Pass, Fail, Error };
std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view text);

struct AssertionOutcome {
  Verdict verdict = Verdict::Pass;
  std::string message;
};

struct CaseReport {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::vector<AssertionOutcome> assertions;
  std::string diagnostic;  // set when the case could not be evaluated at all
  std::optional<SolutionRecord> record;
};

struct SuiteReport {
  Verdict verdict = Verdict::Pass;
  std::vector<CaseReport> cases;
  std::vector<std::string> warnings;
  bool passed() const { return verdict == Verdict::Pass; }
  std::vector<std::string> failing_cases() const;
};

// Runs every case and every assertion. Throws only when the binding is not
// total; evaluation problems become case-level Error verdicts.
SuiteReport run_suite(const TestSuite& suite, const LpModel& model, const InterfaceBinding& binding,
                      const BusinessInterface& bi, const SolverConfig& cfg = {});

// Model-parameter overrides a case produces: interface defaults, then the
// scenario, projected through the binding.
ParameterValues model_overrides(const BusinessInterface& bi, const InterfaceBinding& binding,
                                const ParameterValues& scenario);

}  // namespace optmut
