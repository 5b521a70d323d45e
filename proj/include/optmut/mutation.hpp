#pragma once

// Single-edit mutants of LpModels, kill evaluation against a test suite and
// mutation coverage.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "optmut/interface.hpp"
#include "optmut/model.hpp"
#include "optmut/solver.hpp"

namespace optmut {

enum class MutationOperator {
  RhsDelta,
  CoefDelta,
  SenseFlip,
  ObjectiveScale,
  ObjectiveCoefDelta,
  BoundDrop,
  DomainRelax,
  ConstraintDrop,
};

inline constexpr MutationOperator kAllOperators[] = {
    MutationOperator::RhsDelta,       MutationOperator::CoefDelta,          MutationOperator::SenseFlip,
    MutationOperator::ObjectiveScale, MutationOperator::ObjectiveCoefDelta, MutationOperator::BoundDrop,
    MutationOperator::DomainRelax,    MutationOperator::ConstraintDrop,
};

// "rhs_delta", "coef_delta", ...
std::string_view to_string(MutationOperator op);
// Case-insensitive; underscores and dashes are ignored ("DomainRelax", "domainrelax").
std::optional<MutationOperator> parse_operator(std::string_view text);

enum class Bound { Lower, Upper };
std::string_view to_string(Bound bound);

struct RhsDelta {
  std::string constraint;
  double delta = 0.0;
  bool operator==(const RhsDelta&) const = default;
};
struct CoefDelta {
  std::string constraint;
  std::string variable;
  double delta = 0.0;
  bool operator==(const CoefDelta&) const = default;
};
struct SenseFlip {
  std::string constraint;
  Sense new_sense = Sense::Ge;
  bool operator==(const SenseFlip&) const = default;
};
struct ObjectiveScale {
  double factor = 10.0;
  bool operator==(const ObjectiveScale&) const = default;
};
struct ObjectiveCoefDelta {
  std::string variable;
  double delta = 0.0;
  bool operator==(const ObjectiveCoefDelta&) const = default;
};
struct BoundDrop {
  std::string variable;
  Bound which = Bound::Upper;
  bool operator==(const BoundDrop&) const = default;
};
struct DomainRelax {
  std::string variable;
  bool operator==(const DomainRelax&) const = default;
};
struct ConstraintDrop {
  std::string constraint;
  bool operator==(const ConstraintDrop&) const = default;
};

using MutationKind =
    std::variant<RhsDelta, CoefDelta, SenseFlip, ObjectiveScale, ObjectiveCoefDelta, BoundDrop, DomainRelax, ConstraintDrop>;

struct Mutation {
  MutationKind kind;
  std::string description;
  bool operator==(const Mutation&) const = default;
};

MutationOperator operator_of(const MutationKind& kind);

// Human-readable summary against the model the mutation targets.
std::string describe(const LpModel& model, const MutationKind& kind);

// Throws Error(InvalidMutation) when the mutation references missing symbols,
// violates its own invariants (zero delta, factor <= 0 or == 1, sense
// unchanged, bound already infinite, variable not integer) or produces an
// invalid model.
LpModel apply_mutation(const LpModel& model, const MutationKind& kind);

struct Mutant {
  std::string id;  // "m1", "m2", ...
  std::string base_name;
  Mutation mutation;
  LpModel model;
};

struct GeneratorConfig {
  double delta_fraction = 0.1;
  double min_delta = 1.0;
  double scale_factor = 10.0;
};

// Deterministic in `seed`. Candidates are enumerated per operator in
// declaration order, shuffled, and taken until `budget` distinct mutants
// that differ from the base are found.
// Throws Error(NoApplicableOperator) when no operator has a candidate and
// Error(PreconditionFailed) for an empty operator set or zero budget.
std::vector<Mutant> generate_mutants(const LpModel& model, const std::set<MutationOperator>& operators,
                                     std::size_t budget, std::uint64_t seed, const GeneratorConfig& gen = {});

// Wraps an externally proposed mutation.
Mutant make_mutant(const LpModel& model, const MutationKind& kind, std::string id);

enum class MutantStatus { Killed, Survived, Stillborn };
std::string_view to_string(MutantStatus status);
std::optional<MutantStatus> parse_mutant_status(std::string_view text);

enum class StillbornReason { InvalidModel, TriviallyEquivalent, BaselineFailed };
std::string_view to_string(StillbornReason reason);
std::optional<StillbornReason> parse_stillborn_reason(std::string_view text);

struct MutantVerdict {
  std::string mutant_id;
  MutantStatus status = MutantStatus::Survived;
  std::vector<std::string> failing_cases;
  bool harness_error = false;  // killed through a case-level Error
  std::optional<StillbornReason> reason;
  bool potentially_equivalent = false;
  std::string diagnostic;
  bool operator==(const MutantVerdict&) const = default;
};

struct ProbeConfig {
  std::size_t random_scenarios = 8;
  double spread = 0.5;  // relative perturbation of each model parameter
  std::uint64_t seed = 0x6f70746d7574ULL;
};

struct EvaluationContext {
  const LpModel& base;
  const TestSuite& suite;
  const InterfaceBinding& binding;
  const BusinessInterface& bi;
  SolverConfig cfg = {};
  ProbeConfig probe = {};
};

// Runs the suite on the base first; a failing baseline makes the mutant
// Stillborn(BaselineFailed).
MutantVerdict evaluate_mutant(const Mutant& mutant, const EvaluationContext& ctx);

// Same as evaluate_mutant over a batch, running the baseline once.
std::vector<MutantVerdict> evaluate_mutants(const std::vector<Mutant>& mutants, const EvaluationContext& ctx);

struct CoverageReport {
  std::size_t killed = 0;
  std::size_t survived = 0;
  std::size_t stillborn = 0;
  std::size_t total = 0;  // killed + survived
  double mc_percent = 0.0;
  double ratio = 0.0;  // killed / total, unrounded
  std::vector<MutantVerdict> verdicts;  // sorted by mutant id
};

// Throws Error(NoValidMutants) when every verdict is Stillborn.
CoverageReport coverage(const std::vector<MutantVerdict>& verdicts);

// Display rounding used in reports.
double round2(double value);

// Orders "m2" before "m10".
bool mutant_id_less(const std::string& a, const std::string& b);

enum class OutcomeCell { DesiredKill, SurvivorGap, BaselineBroken };
std::string_view to_string(OutcomeCell cell);

// Error verdicts count as Fail.
OutcomeCell classify_outcome(Verdict suite_on_base, Verdict suite_on_mutant);

}  // namespace optmut
