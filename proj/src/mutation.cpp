#include "optmut/mutation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <tuple>

#include "optmut/error.hpp"
#include "optmut/model_text.hpp"

namespace optmut {

std::string_view to_string(MutationOperator op) {
  switch (op) {
    case MutationOperator::RhsDelta: return "rhs_delta";
    case MutationOperator::CoefDelta: return "coef_delta";
    case MutationOperator::SenseFlip: return "sense_flip";
    case MutationOperator::ObjectiveScale: return "objective_scale";
    case MutationOperator::ObjectiveCoefDelta: return "objective_coef_delta";
    case MutationOperator::BoundDrop: return "bound_drop";
    case MutationOperator::DomainRelax: return "domain_relax";
    case MutationOperator::ConstraintDrop: return "constraint_drop";
  }
  return "?";
}

namespace {

std::string squash(std::string_view text) {
  std::string out;
  for (char c : text)
    if (c != '_' && c != '-') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::optional<MutationOperator> parse_operator(std::string_view text) {
  const std::string key = squash(text);
  for (auto op : kAllOperators)
    if (squash(to_string(op)) == key) return op;
  return std::nullopt;
}

std::string_view to_string(Bound bound) { return bound == Bound::Lower ? "lower" : "upper"; }

MutationOperator operator_of(const MutationKind& kind) {
  return static_cast<MutationOperator>(kind.index());
}

std::string_view to_string(MutantStatus status) {
  switch (status) {
    case MutantStatus::Killed: return "killed";
    case MutantStatus::Survived: return "survived";
    case MutantStatus::Stillborn: return "stillborn";
  }
  return "?";
}

std::optional<MutantStatus> parse_mutant_status(std::string_view text) {
  for (auto s : {MutantStatus::Killed, MutantStatus::Survived, MutantStatus::Stillborn})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::string_view to_string(StillbornReason reason) {
  switch (reason) {
    case StillbornReason::InvalidModel: return "invalid_model";
    case StillbornReason::TriviallyEquivalent: return "trivially_equivalent";
    case StillbornReason::BaselineFailed: return "baseline_failed";
  }
  return "?";
}

std::optional<StillbornReason> parse_stillborn_reason(std::string_view text) {
  for (auto r : {StillbornReason::InvalidModel, StillbornReason::TriviallyEquivalent, StillbornReason::BaselineFailed})
    if (to_string(r) == text) return r;
  return std::nullopt;
}

std::string_view to_string(OutcomeCell cell) {
  switch (cell) {
    case OutcomeCell::DesiredKill: return "desired_kill";
    case OutcomeCell::SurvivorGap: return "survivor_gap";
    case OutcomeCell::BaselineBroken: return "baseline_broken";
  }
  return "?";
}

OutcomeCell classify_outcome(Verdict suite_on_base, Verdict suite_on_mutant) {
  if (suite_on_base != Verdict::Pass) return OutcomeCell::BaselineBroken;
  return suite_on_mutant == Verdict::Pass ? OutcomeCell::SurvivorGap : OutcomeCell::DesiredKill;
}

namespace {

std::string scalar_text(const Scalar& s) {
  LinearExpr e;
  e.constant = s;
  return format_linear_expr(e);
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidMutation, msg); }

Constraint& constraint_of(LpModel& m, const std::string& name) {
  for (auto& c : m.constraints)
    if (c.name == name) return c;
  invalid("no constraint named '" + name + "'");
}

Variable& variable_of(LpModel& m, const std::string& name) {
  for (auto& v : m.variables)
    if (v.name == name) return v;
  invalid("no variable named '" + name + "'");
}

void check_delta(double delta) {
  if (delta == 0.0 || !std::isfinite(delta)) invalid("delta must be finite and non-zero");
}

struct Applier {
  LpModel& m;

  void operator()(const RhsDelta& k) const {
    check_delta(k.delta);
    constraint_of(m, k.constraint).rhs += Scalar(k.delta);
  }
  void operator()(const CoefDelta& k) const {
    check_delta(k.delta);
    variable_of(m, k.variable);
    constraint_of(m, k.constraint).lhs.add(k.variable, Scalar(k.delta));
  }
  void operator()(const SenseFlip& k) const {
    Constraint& c = constraint_of(m, k.constraint);
    if (c.sense == k.new_sense) invalid("constraint '" + k.constraint + "' already has that sense");
    c.sense = k.new_sense;
  }
  void operator()(const ObjectiveScale& k) const {
    if (!(k.factor > 0.0) || !std::isfinite(k.factor) || k.factor == 1.0)
      invalid("objective scale factor must be positive, finite and different from 1");
    m = scale_objective(m, k.factor);
  }
  void operator()(const ObjectiveCoefDelta& k) const {
    check_delta(k.delta);
    variable_of(m, k.variable);
    m.objective.expr.add(k.variable, Scalar(k.delta));
  }
  void operator()(const BoundDrop& k) const {
    Variable& v = variable_of(m, k.variable);
    double& bound = k.which == Bound::Lower ? v.lower : v.upper;
    if (std::isinf(bound)) invalid("variable '" + k.variable + "' has no finite " + std::string(to_string(k.which)) + " bound");
    bound = k.which == Bound::Lower ? -kInfinity : kInfinity;
  }
  void operator()(const DomainRelax& k) const {
    Variable& v = variable_of(m, k.variable);
    if (v.domain != Domain::Integer) invalid("variable '" + k.variable + "' is not integer");
    v.domain = Domain::Continuous;
  }
  void operator()(const ConstraintDrop& k) const {
    constraint_of(m, k.constraint);
    m.constraints.erase(std::remove_if(m.constraints.begin(), m.constraints.end(),
                                       [&](const Constraint& c) { return c.name == k.constraint; }),
                        m.constraints.end());
  }
};

}  // namespace

std::string describe(const LpModel& model, const MutationKind& kind) {
  struct V {
    const LpModel& m;
    std::string operator()(const RhsDelta& k) const {
      const Constraint* c = m.find_constraint(k.constraint);
      if (!c) return "rhs of " + k.constraint + " shifted by " + format_number(k.delta);
      return "rhs of " + k.constraint + ": " + scalar_text(c->rhs) + " -> " + scalar_text(c->rhs + Scalar(k.delta));
    }
    std::string operator()(const CoefDelta& k) const {
      return "coefficient of " + k.variable + " in " + k.constraint + " shifted by " + format_number(k.delta);
    }
    std::string operator()(const SenseFlip& k) const {
      const Constraint* c = m.find_constraint(k.constraint);
      return "sense of " + k.constraint + ": " + (c ? std::string(to_string(c->sense)) : std::string("?")) + " -> " +
             std::string(to_string(k.new_sense));
    }
    std::string operator()(const ObjectiveScale& k) const { return "objective scaled by " + format_number(k.factor); }
    std::string operator()(const ObjectiveCoefDelta& k) const {
      return "objective coefficient of " + k.variable + " shifted by " + format_number(k.delta);
    }
    std::string operator()(const BoundDrop& k) const {
      return std::string(to_string(k.which)) + " bound of " + k.variable + " dropped";
    }
    std::string operator()(const DomainRelax& k) const { return "integrality of " + k.variable + " relaxed"; }
    std::string operator()(const ConstraintDrop& k) const { return "constraint " + k.constraint + " dropped"; }
  };
  return std::visit(V{model}, kind);
}

LpModel apply_mutation(const LpModel& model, const MutationKind& kind) {
  LpModel m = model;
  std::visit(Applier{m}, kind);
  try {
    m = normalize(m);
    validate(m);
  } catch (const Error& e) {
    invalid(std::string("mutant is not a valid model: ") + e.what());
  }
  return m;
}

Mutant make_mutant(const LpModel& model, const MutationKind& kind, std::string id) {
  Mutant mutant;
  mutant.id = std::move(id);
  mutant.base_name = model.name;
  mutant.model = apply_mutation(model, kind);
  mutant.mutation = Mutation{kind, describe(model, kind)};
  return mutant;
}

namespace {

// Unbiased draw in [0, n) by rejection: portable across standard libraries.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double signed_delta(std::mt19937_64& rng, double value, const GeneratorConfig& gen) {
  const double magnitude = std::max(gen.min_delta, gen.delta_fraction * std::fabs(value));
  return draw_below(rng, 2) == 0 ? -magnitude : magnitude;
}

std::vector<MutationKind> candidates(const LpModel& model, MutationOperator op, std::mt19937_64& rng,
                                     const GeneratorConfig& gen) {
  const ParameterValues params = model.parameter_values();
  std::vector<MutationKind> out;
  switch (op) {
    case MutationOperator::RhsDelta:
      for (const auto& c : model.constraints)
        out.push_back(RhsDelta{c.name, signed_delta(rng, c.rhs.evaluate(params), gen)});
      break;
    case MutationOperator::CoefDelta:
      for (const auto& c : model.constraints)
        for (const auto& t : c.lhs.terms)
          out.push_back(CoefDelta{c.name, t.variable, signed_delta(rng, t.coefficient.evaluate(params), gen)});
      break;
    case MutationOperator::SenseFlip:
      for (const auto& c : model.constraints) {
        if (c.sense == Sense::Le) out.push_back(SenseFlip{c.name, Sense::Ge});
        if (c.sense == Sense::Ge) out.push_back(SenseFlip{c.name, Sense::Le});
        if (c.sense == Sense::Eq) {
          out.push_back(SenseFlip{c.name, Sense::Le});
          out.push_back(SenseFlip{c.name, Sense::Ge});
        }
      }
      break;
    case MutationOperator::ObjectiveScale:
      if (!model.objective.expr.terms.empty()) out.push_back(ObjectiveScale{gen.scale_factor});
      break;
    case MutationOperator::ObjectiveCoefDelta:
      for (const auto& t : model.objective.expr.terms)
        out.push_back(ObjectiveCoefDelta{t.variable, signed_delta(rng, t.coefficient.evaluate(params), gen)});
      break;
    case MutationOperator::BoundDrop:
      for (const auto& v : model.variables) {
        if (std::isfinite(v.lower)) out.push_back(BoundDrop{v.name, Bound::Lower});
        if (std::isfinite(v.upper)) out.push_back(BoundDrop{v.name, Bound::Upper});
      }
      break;
    case MutationOperator::DomainRelax:
      for (const auto& v : model.variables)
        if (v.domain == Domain::Integer) out.push_back(DomainRelax{v.name});
      break;
    case MutationOperator::ConstraintDrop:
      for (const auto& c : model.constraints) out.push_back(ConstraintDrop{c.name});
      break;
  }
  return out;
}

}  // namespace

std::vector<Mutant> generate_mutants(const LpModel& model, const std::set<MutationOperator>& operators,
                                     std::size_t budget, std::uint64_t seed, const GeneratorConfig& gen) {
  if (operators.empty()) throw Error(ErrorCode::PreconditionFailed, "operator set is empty");
  if (budget == 0) throw Error(ErrorCode::PreconditionFailed, "mutant budget must be at least 1");
  const LpModel base = normalize(model);
  std::mt19937_64 rng(seed);
  std::vector<MutationKind> pool;
  for (auto op : kAllOperators) {
    if (!operators.count(op)) continue;
    auto more = candidates(base, op, rng, gen);
    pool.insert(pool.end(), more.begin(), more.end());
  }
  if (pool.empty()) {
    std::string names;
    for (auto op : operators) names += (names.empty() ? "" : ", ") + std::string(to_string(op));
    throw Error(ErrorCode::NoApplicableOperator, "no applicable mutation for operators: " + names);
  }
  for (std::size_t i = pool.size() - 1; i > 0; --i) std::swap(pool[i], pool[draw_below(rng, i + 1)]);

  std::vector<Mutant> out;
  for (const auto& kind : pool) {
    if (out.size() >= budget) break;
    LpModel mutated;
    try {
      mutated = apply_mutation(base, kind);
    } catch (const Error&) {
      continue;
    }
    if (mutated == base) continue;
    if (std::any_of(out.begin(), out.end(), [&](const Mutant& m) { return m.model == mutated; })) continue;
    Mutant m;
    m.id = "m" + std::to_string(out.size() + 1);
    m.base_name = base.name;
    m.mutation = Mutation{kind, describe(base, kind)};
    m.model = std::move(mutated);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

bool same_optimum(const Solution& a, const Solution& b) {
  if (a.status != b.status) return false;
  if (!a.optimal()) return true;
  if (std::fabs(*a.objective - *b.objective) > 1e-6 * std::max(1.0, std::fabs(*a.objective))) return false;
  if (a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (std::fabs(a.values[i] - b.values[i]) > 1e-6 * std::max(1.0, std::fabs(a.values[i]))) return false;
  return true;
}

std::vector<ParameterValues> suite_scenarios(const EvaluationContext& ctx) {
  std::vector<ParameterValues> out{model_overrides(ctx.bi, ctx.binding, {})};
  for (const auto& c : ctx.suite.cases) out.push_back(model_overrides(ctx.bi, ctx.binding, c.scenario));
  return out;
}

bool trivially_equivalent(const LpModel& base, const LpModel& mutant, const std::vector<ParameterValues>& scenarios) {
  const LpModel nb = normalize(base), nm = normalize(mutant);
  for (const auto& s : scenarios) {
    LpModel a = instantiate(nb, s), b = instantiate(nm, s);
    b.name = a.name;
    if (!(a == b)) return false;
  }
  return true;
}

bool differs_somewhere(const LpModel& base, const LpModel& mutant, std::vector<ParameterValues> scenarios,
                       const EvaluationContext& ctx) {
  std::mt19937_64 rng(ctx.probe.seed);
  for (std::size_t i = 0; i < ctx.probe.random_scenarios; ++i) {
    ParameterValues s;
    for (const auto& p : base.parameters) s[p.name] = p.value * (1.0 + ctx.probe.spread * (2.0 * draw_unit(rng) - 1.0));
    scenarios.push_back(std::move(s));
  }
  for (const auto& s : scenarios) {
    try {
      if (!same_optimum(solve_milp(instantiate(base, s), ctx.cfg), solve_milp(instantiate(mutant, s), ctx.cfg)))
        return true;
    } catch (const Error&) {
      return true;
    }
  }
  return false;
}

MutantVerdict evaluate_after_baseline(const Mutant& mutant, const EvaluationContext& ctx) {
  MutantVerdict v;
  v.mutant_id = mutant.id;
  try {
    validate(mutant.model);
  } catch (const Error& e) {
    v.status = MutantStatus::Stillborn;
    v.reason = StillbornReason::InvalidModel;
    v.diagnostic = e.describe();
    return v;
  }
  const auto scenarios = suite_scenarios(ctx);
  if (trivially_equivalent(ctx.base, mutant.model, scenarios)) {
    v.status = MutantStatus::Stillborn;
    v.reason = StillbornReason::TriviallyEquivalent;
    return v;
  }
  try {
    const SuiteReport r = run_suite(ctx.suite, mutant.model, ctx.binding, ctx.bi, ctx.cfg);
    if (r.passed()) {
      v.status = MutantStatus::Survived;
    } else {
      v.status = MutantStatus::Killed;
      v.failing_cases = r.failing_cases();
      for (const auto& c : r.cases) {
        if (c.verdict != Verdict::Error) continue;
        v.harness_error = true;
        if (v.diagnostic.empty()) {
          v.diagnostic = c.diagnostic;
          for (const auto& a : c.assertions)
            if (a.verdict == Verdict::Error && v.diagnostic.empty()) v.diagnostic = a.message;
        }
      }
    }
  } catch (const Error& e) {
    v.status = MutantStatus::Killed;
    v.harness_error = true;
    v.diagnostic = e.describe();
  }
  v.potentially_equivalent = !differs_somewhere(ctx.base, mutant.model, scenarios, ctx);
  return v;
}

MutantVerdict baseline_failed(const Mutant& mutant, const std::string& why) {
  MutantVerdict v;
  v.mutant_id = mutant.id;
  v.status = MutantStatus::Stillborn;
  v.reason = StillbornReason::BaselineFailed;
  v.diagnostic = why;
  return v;
}

std::optional<std::string> baseline_problem(const EvaluationContext& ctx) {
  try {
    const SuiteReport r = run_suite(ctx.suite, ctx.base, ctx.binding, ctx.bi, ctx.cfg);
    if (r.passed()) return std::nullopt;
    std::string names;
    for (const auto& n : r.failing_cases()) names += (names.empty() ? "" : ", ") + n;
    return "suite fails on the base model: " + names;
  } catch (const Error& e) {
    return e.describe();
  }
}

}  // namespace

MutantVerdict evaluate_mutant(const Mutant& mutant, const EvaluationContext& ctx) {
  if (auto why = baseline_problem(ctx)) return baseline_failed(mutant, *why);
  return evaluate_after_baseline(mutant, ctx);
}

std::vector<MutantVerdict> evaluate_mutants(const std::vector<Mutant>& mutants, const EvaluationContext& ctx) {
  std::vector<MutantVerdict> out;
  const auto why = baseline_problem(ctx);
  for (const auto& m : mutants) out.push_back(why ? baseline_failed(m, *why) : evaluate_after_baseline(m, ctx));
  return out;
}

bool mutant_id_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    const std::string digits = s.substr(i);
    const std::size_t nz = digits.find_first_not_of('0');
    return std::make_tuple(s.substr(0, i), nz == std::string::npos ? std::string() : digits.substr(nz));
  };
  auto [pa, na] = split(a);
  auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na.size() != nb.size()) return na.size() < nb.size();
  if (na != nb) return na < nb;
  return a < b;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

CoverageReport coverage(const std::vector<MutantVerdict>& verdicts) {
  CoverageReport r;
  r.verdicts = verdicts;
  std::stable_sort(r.verdicts.begin(), r.verdicts.end(),
                   [](const MutantVerdict& a, const MutantVerdict& b) { return mutant_id_less(a.mutant_id, b.mutant_id); });
  for (const auto& v : verdicts) {
    switch (v.status) {
      case MutantStatus::Killed: ++r.killed; break;
      case MutantStatus::Survived: ++r.survived; break;
      case MutantStatus::Stillborn: ++r.stillborn; break;
    }
  }
  r.total = r.killed + r.survived;
  if (r.total == 0) throw Error(ErrorCode::NoValidMutants, "no non-stillborn mutants to measure");
  r.mc_percent = 100.0 * static_cast<double>(r.killed) / static_cast<double>(r.total);
  r.ratio = static_cast<double>(r.killed) / static_cast<double>(r.total);
  return r;
}

}  // namespace optmut
