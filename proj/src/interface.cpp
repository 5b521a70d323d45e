#include "optmut/interface.hpp"

#include <cmath>
#include <set>

#include "expr.hpp"
#include "optmut/error.hpp"
#include "optmut/model_text.hpp"

namespace optmut {

namespace {

constexpr std::string_view kObjectiveSymbol = "objective";

template <typename T>
const T* find_named(const std::vector<T>& items, const std::string& name) {
  for (const auto& item : items)
    if (item.name == name) return &item;
  return nullptr;
}

detail::ExprPtr parse_kpi(const Kpi& kpi) {
  std::vector<Diagnostic> diags;
  auto tokens = detail::tokenize(kpi.expr, diags);
  detail::ExprPtr ast;
  if (diags.empty()) ast = detail::parse_expression(tokens, 0, tokens.size() - 1, diags);
  if (!ast || !diags.empty()) {
    const std::string msg = diags.empty() ? "malformed expression" : diags.front().message;
    throw Error(ErrorCode::SyntaxError, "kpi '" + kpi.name + "': " + msg);
  }
  return ast;
}

void collect_symbols(const detail::ExprNode& node, std::vector<std::string>& out) {
  if (node.kind == detail::ExprNode::Kind::Symbol) out.push_back(node.name);
  if (node.lhs) collect_symbols(*node.lhs, out);
  if (node.rhs) collect_symbols(*node.rhs, out);
}

double eval_node(const detail::ExprNode& node, const std::map<std::string, double>& symbols, const std::string& kpi) {
  using K = detail::ExprNode::Kind;
  switch (node.kind) {
    case K::Number: return node.value;
    case K::Symbol: {
      auto it = symbols.find(node.name);
      if (it == symbols.end())
        throw Error(ErrorCode::EvaluationError, "kpi '" + kpi + "' references unavailable symbol '" + node.name + "'");
      return it->second;
    }
    case K::Neg: return -eval_node(*node.lhs, symbols, kpi);
    case K::Add: return eval_node(*node.lhs, symbols, kpi) + eval_node(*node.rhs, symbols, kpi);
    case K::Sub: return eval_node(*node.lhs, symbols, kpi) - eval_node(*node.rhs, symbols, kpi);
    case K::Mul: return eval_node(*node.lhs, symbols, kpi) * eval_node(*node.rhs, symbols, kpi);
    case K::Div: {
      const double d = eval_node(*node.rhs, symbols, kpi);
      if (d == 0.0) throw Error(ErrorCode::DivisionByZero, "division by zero in kpi '" + kpi + "'", kpi);
      return eval_node(*node.lhs, symbols, kpi) / d;
    }
  }
  return 0.0;
}

double evaluate(const LinearExpr& expr, const std::map<std::string, double>& vars, const ParameterValues& params) {
  double v = expr.constant.evaluate(params);
  for (const auto& t : expr.terms) v += t.coefficient.evaluate(params) * vars.at(t.variable);
  return v;
}

std::string fmt(double v) { return format_number(v); }

// Everything one case needs to evaluate its assertions.
struct CaseContext {
  const BusinessInterface& bi;
  const InterfaceBinding& binding;
  const LpModel& model;  // instantiated
  const SolverConfig& cfg;
  const Solution& solution;
  const SolutionRecord& record;
  std::optional<std::string> kpi_error;
  std::map<std::string, LinearExpr> exprs;
};

// Quantity point -> model variable assignment when every variable is bound
// one-to-one by a plain quantity.
std::optional<Point> invert_point(const CaseContext& ctx, const std::map<std::string, double>& point) {
  Point out;
  for (const auto& [q, value] : point) {
    const LinearExpr& e = ctx.exprs.at(q);
    if (e.terms.size() != 1 || !e.constant.is_zero() || !(e.terms[0].coefficient == Scalar(1.0))) return std::nullopt;
    if (!out.emplace(e.terms[0].variable, value).second) return std::nullopt;
  }
  if (out.size() != ctx.model.variables.size()) return std::nullopt;
  return out;
}

LpModel restricted(const CaseContext& ctx, const std::map<std::string, double>& point, bool keep_objective) {
  LpModel m = ctx.model;
  if (!keep_objective) m.objective = Objective{};
  std::set<std::string> names;
  for (const auto& c : m.constraints) names.insert(c.name);
  for (const auto& [q, value] : point) {
    std::string name = "bind_" + q;
    while (names.count(name)) name += "_";
    names.insert(name);
    const LinearExpr& e = ctx.exprs.at(q);
    Constraint c;
    c.name = name;
    for (const auto& t : e.terms) c.lhs.add(t.variable, t.coefficient);
    c.sense = Sense::Eq;
    c.rhs = Scalar(value) - e.constant;
    m.constraints.push_back(std::move(c));
  }
  return instantiate(m);
}

AssertionOutcome fail(std::string msg) { return {Verdict::Fail, std::move(msg)}; }
AssertionOutcome pass(std::string msg) { return {Verdict::Pass, std::move(msg)}; }
AssertionOutcome error(std::string msg) { return {Verdict::Error, std::move(msg)}; }

AssertionOutcome check_value(const std::string& what, double actual, CompareOp op, double value, double tol) {
  std::string msg = what + " = " + fmt(actual) + ", expected " + std::string(to_string(op)) + " " + fmt(value) +
                    " (tol " + fmt(tol) + ")";
  return compare(actual, op, value, tol) ? pass(std::move(msg)) : fail(std::move(msg));
}

struct AssertionVisitor {
  const CaseContext& ctx;

  AssertionOutcome operator()(const StatusIs& a) const {
    const std::string msg = "status " + std::string(to_string(ctx.record.status)) + ", expected " +
                            std::string(to_string(a.status));
    return ctx.record.status == a.status ? pass(msg) : fail(msg);
  }

  AssertionOutcome operator()(const KpiCompare& a) const {
    if (!ctx.solution.optimal())
      return fail("kpi " + a.kpi + " unavailable: status " + std::string(to_string(ctx.record.status)));
    if (a.kpi == kObjectiveSymbol) return check_value("objective", *ctx.record.objective, a.op, a.value, a.tol);
    if (ctx.kpi_error) return error(*ctx.kpi_error);
    return check_value("kpi " + a.kpi, ctx.record.kpis.at(a.kpi), a.op, a.value, a.tol);
  }

  AssertionOutcome operator()(const QuantityCompare& a) const {
    if (!ctx.solution.optimal())
      return fail("quantity " + a.quantity + " unavailable: status " + std::string(to_string(ctx.record.status)));
    return check_value("quantity " + a.quantity, ctx.record.quantities.at(a.quantity), a.op, a.value, a.tol);
  }

  AssertionOutcome operator()(const PointFeasible& a) const {
    const std::string what = "point " + point_text(a.point);
    if (auto p = invert_point(ctx, a.point)) {
      const FeasibilityReport r = check_feasible(ctx.model, *p, a.tol);
      if (r.feasible) return pass(what + " is feasible");
      const Violation& v = r.violations.front();
      return fail(what + " violates " + v.name + " by " + fmt(-v.slack));
    }
    SolverConfig cfg = ctx.cfg;
    cfg.feas_tol = std::max(cfg.feas_tol, a.tol);
    const Solution s = solve_milp(restricted(ctx, a.point, false), cfg);
    if (s.status == SolveStatus::Optimal) return pass(what + " is feasible");
    if (s.status == SolveStatus::Infeasible) return fail(what + " admits no feasible completion");
    return error(what + ": feasibility check ended " + std::string(to_string(s.status)));
  }

  AssertionOutcome operator()(const PointDominated& a) const {
    const std::string what = "point " + point_text(a.point);
    if (!ctx.solution.optimal())
      return fail(what + " not dominated: status " + std::string(to_string(ctx.record.status)));
    double point_value = 0.0;
    if (auto p = invert_point(ctx, a.point)) {
      std::vector<double> x;
      for (const auto& v : ctx.model.variables) x.push_back(p->at(v.name));
      point_value = evaluate_objective(ctx.model, x);
    } else {
      const Solution s = solve_milp(restricted(ctx, a.point, true), ctx.cfg);
      if (!s.optimal()) return error(what + ": no optimal completion (" + std::string(to_string(s.status)) + ")");
      point_value = *s.objective;
    }
    const double best = *ctx.record.objective;
    const double tol = a.relative ? a.tol * std::max(1.0, std::fabs(point_value)) : a.tol;
    const bool maximize = ctx.model.objective.sense == ObjectiveSense::Maximize;
    const bool ok = maximize ? best >= point_value - tol : best <= point_value + tol;
    const std::string msg = "optimum " + fmt(best) + (ok ? " dominates " : " is worse than ") + what + " valued " +
                            fmt(point_value);
    return ok ? pass(msg) : fail(msg);
  }

  static std::string point_text(const std::map<std::string, double>& point) {
    std::string s = "(";
    bool first = true;
    for (const auto& [k, v] : point) {
      if (!first) s += ", ";
      first = false;
      s += k + "=" + fmt(v);
    }
    return s + ")";
  }
};

void require_identifier(const std::string& name, const std::string& what) {
  if (!detail::is_identifier(name)) throw Error(ErrorCode::SchemaViolation, what + " '" + name + "' is not a valid identifier");
}

}  // namespace

const Quantity* BusinessInterface::find_quantity(const std::string& n) const { return find_named(quantities, n); }
const Kpi* BusinessInterface::find_kpi(const std::string& n) const { return find_named(kpis, n); }
const InterfaceParameter* BusinessInterface::find_parameter(const std::string& n) const {
  return find_named(parameters, n);
}

ParameterValues BusinessInterface::parameter_defaults() const {
  ParameterValues out;
  for (const auto& p : parameters) out[p.name] = p.default_value;
  return out;
}

void validate(const BusinessInterface& bi) {
  require_identifier(bi.name, "interface name");
  std::set<std::string> names;
  auto declare = [&](const std::string& name, const std::string& what) {
    require_identifier(name, what);
    if (!names.insert(name).second) throw Error(ErrorCode::DuplicateName, "duplicate interface name '" + name + "'");
  };
  for (const auto& q : bi.quantities) declare(q.name, "quantity");
  for (const auto& p : bi.parameters) {
    declare(p.name, "parameter");
    if (!std::isfinite(p.default_value))
      throw Error(ErrorCode::SchemaViolation, "parameter '" + p.name + "' default is not finite");
  }
  for (const auto& k : bi.kpis) declare(k.name, "kpi");
  for (const auto& k : bi.kpis) {
    std::vector<std::string> symbols;
    collect_symbols(*parse_kpi(k), symbols);
    for (const auto& s : symbols) {
      if (s == kObjectiveSymbol || bi.find_quantity(s) || bi.find_parameter(s)) continue;
      throw Error(ErrorCode::UnknownSymbol, "kpi '" + k.name + "' references undeclared symbol '" + s + "'");
    }
  }
}

std::map<std::string, double> evaluate_kpis(const BusinessInterface& bi, const std::map<std::string, double>& quantities,
                                            const ParameterValues& parameters, std::optional<double> objective) {
  std::map<std::string, double> symbols = bi.parameter_defaults();
  for (const auto& [k, v] : parameters) symbols[k] = v;
  for (const auto& q : bi.quantities) {
    auto it = quantities.find(q.name);
    if (it == quantities.end()) throw Error(ErrorCode::MissingVariable, "no value for quantity '" + q.name + "'");
    symbols[q.name] = it->second;
  }
  if (objective) symbols[std::string(kObjectiveSymbol)] = *objective;
  std::map<std::string, double> out;
  for (const auto& k : bi.kpis) out[k.name] = eval_node(*parse_kpi(k), symbols, k.name);
  return out;
}

std::vector<std::string> unbound_names(const BusinessInterface& bi, const LpModel& model,
                                       const InterfaceBinding& binding) {
  std::vector<std::string> out;
  for (const auto& q : bi.quantities) {
    auto it = binding.quantities.find(q.name);
    if (it == binding.quantities.end()) {
      out.push_back(q.name);
      continue;
    }
    try {
      parse_linear_expr(it->second, model);
    } catch (const Error&) {
      out.push_back(q.name);
    }
  }
  for (const auto& p : bi.parameters) {
    auto it = binding.parameters.find(p.name);
    if (it == binding.parameters.end() || !model.find_parameter(it->second)) out.push_back(p.name);
  }
  return out;
}

void check_binding(const BusinessInterface& bi, const LpModel& model, const InterfaceBinding& binding) {
  std::string missing;
  for (const auto& q : bi.quantities)
    if (!binding.quantities.count(q.name)) missing += (missing.empty() ? "" : ", ") + q.name;
  for (const auto& p : bi.parameters)
    if (!binding.parameters.count(p.name)) missing += (missing.empty() ? "" : ", ") + p.name;
  if (!missing.empty()) throw Error(ErrorCode::BindingIncomplete, "binding does not cover: " + missing);
  for (const auto& [q, expr] : binding.quantities) {
    if (!bi.find_quantity(q)) throw Error(ErrorCode::UnknownSymbol, "binding names unknown quantity '" + q + "'");
    try {
      parse_linear_expr(expr, model);
    } catch (const Error& e) {
      throw Error(ErrorCode::UnknownSymbol, "quantity '" + q + "': " + e.what());
    }
  }
  for (const auto& [p, target] : binding.parameters) {
    if (!bi.find_parameter(p)) throw Error(ErrorCode::UnknownSymbol, "binding names unknown parameter '" + p + "'");
    if (!model.find_parameter(target))
      throw Error(ErrorCode::UnknownSymbol, "parameter '" + p + "' is bound to missing model parameter '" + target + "'");
  }
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "==";
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
  }
  return "?";
}

std::optional<CompareOp> parse_compare_op(std::string_view text) {
  for (auto op : {CompareOp::Le, CompareOp::Ge, CompareOp::Eq, CompareOp::Lt, CompareOp::Gt})
    if (to_string(op) == text) return op;
  return std::nullopt;
}

bool compare(double actual, CompareOp op, double expected, double tol) {
  switch (op) {
    case CompareOp::Le: return actual <= expected + tol;
    case CompareOp::Ge: return actual >= expected - tol;
    case CompareOp::Eq: return std::fabs(actual - expected) <= tol;
    case CompareOp::Lt: return actual < expected - tol;
    case CompareOp::Gt: return actual > expected + tol;
  }
  return false;
}

std::string_view assertion_kind(const Assertion& assertion) {
  struct V {
    std::string_view operator()(const StatusIs&) const { return "status_is"; }
    std::string_view operator()(const KpiCompare&) const { return "kpi_compare"; }
    std::string_view operator()(const QuantityCompare&) const { return "quantity_compare"; }
    std::string_view operator()(const PointFeasible&) const { return "point_feasible"; }
    std::string_view operator()(const PointDominated&) const { return "point_dominated"; }
  };
  return std::visit(V{}, assertion);
}

std::string describe(const Assertion& assertion) {
  struct V {
    std::string operator()(const StatusIs& a) const { return "status is " + std::string(to_string(a.status)); }
    std::string operator()(const KpiCompare& a) const {
      return "kpi " + a.kpi + " " + std::string(to_string(a.op)) + " " + fmt(a.value);
    }
    std::string operator()(const QuantityCompare& a) const {
      return "quantity " + a.quantity + " " + std::string(to_string(a.op)) + " " + fmt(a.value);
    }
    std::string operator()(const PointFeasible& a) const {
      return "point " + AssertionVisitor::point_text(a.point) + " feasible";
    }
    std::string operator()(const PointDominated& a) const {
      return "point " + AssertionVisitor::point_text(a.point) + " dominated";
    }
  };
  return std::visit(V{}, assertion);
}

void validate(const TestSuite& suite, const BusinessInterface& bi) {
  std::set<std::string> names;
  for (const auto& c : suite.cases) {
    require_identifier(c.name, "case name");
    if (!names.insert(c.name).second) throw Error(ErrorCode::DuplicateName, "duplicate case name '" + c.name + "'");
    if (c.assertions.empty()) throw Error(ErrorCode::SchemaViolation, "case '" + c.name + "' has no assertions");
    for (const auto& [p, v] : c.scenario) {
      if (!bi.find_parameter(p))
        throw Error(ErrorCode::UnknownSymbol, "case '" + c.name + "' overrides unknown parameter '" + p + "'");
      if (!std::isfinite(v)) throw Error(ErrorCode::SchemaViolation, "case '" + c.name + "': scenario value not finite");
    }
    auto check_tol = [&](double tol) {
      if (!(tol >= 0.0) || !std::isfinite(tol))
        throw Error(ErrorCode::SchemaViolation, "case '" + c.name + "': tolerance must be non-negative");
    };
    auto check_point = [&](const std::map<std::string, double>& point) {
      if (point.empty()) throw Error(ErrorCode::SchemaViolation, "case '" + c.name + "': empty point");
      for (const auto& [q, v] : point) {
        if (!bi.find_quantity(q))
          throw Error(ErrorCode::UnknownSymbol, "case '" + c.name + "' references unknown quantity '" + q + "'");
        if (!std::isfinite(v)) throw Error(ErrorCode::SchemaViolation, "case '" + c.name + "': point value not finite");
      }
    };
    for (const auto& a : c.assertions) {
      if (auto* k = std::get_if<KpiCompare>(&a)) {
        if (k->kpi != kObjectiveSymbol && !bi.find_kpi(k->kpi))
          throw Error(ErrorCode::UnknownSymbol, "case '" + c.name + "' references unknown kpi '" + k->kpi + "'");
        check_tol(k->tol);
      } else if (auto* q = std::get_if<QuantityCompare>(&a)) {
        if (!bi.find_quantity(q->quantity))
          throw Error(ErrorCode::UnknownSymbol,
                      "case '" + c.name + "' references unknown quantity '" + q->quantity + "'");
        check_tol(q->tol);
      } else if (auto* f = std::get_if<PointFeasible>(&a)) {
        check_point(f->point);
        check_tol(f->tol);
      } else if (auto* d = std::get_if<PointDominated>(&a)) {
        check_point(d->point);
        check_tol(d->tol);
      }
    }
  }
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Error: return "error";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::Error})
    if (to_string(v) == text) return v;
  return std::nullopt;
}

std::vector<std::string> SuiteReport::failing_cases() const {
  std::vector<std::string> out;
  for (const auto& c : cases)
    if (c.verdict != Verdict::Pass) out.push_back(c.name);
  return out;
}

ParameterValues model_overrides(const BusinessInterface& bi, const InterfaceBinding& binding,
                                const ParameterValues& scenario) {
  ParameterValues values = bi.parameter_defaults();
  for (const auto& [k, v] : scenario) {
    if (!bi.find_parameter(k)) throw Error(ErrorCode::UnknownParameter, "scenario sets unknown parameter '" + k + "'");
    values[k] = v;
  }
  ParameterValues out;
  for (const auto& [k, v] : values) out[binding.parameters.at(k)] = v;
  return out;
}

namespace {

CaseReport run_case(const TestCase& tc, const LpModel& model, const InterfaceBinding& binding,
                    const BusinessInterface& bi, const SolverConfig& cfg) {
  CaseReport report;
  report.name = tc.name;
  try {
    const LpModel inst = instantiate(model, model_overrides(bi, binding, tc.scenario));
    const ParameterValues params = inst.parameter_values();
    const Solution solution = solve_milp(inst, cfg);

    std::map<std::string, LinearExpr> exprs;
    for (const auto& [q, text] : binding.quantities) exprs.emplace(q, parse_linear_expr(text, inst));

    SolutionRecord record;
    record.status = solution.status;
    std::optional<std::string> kpi_error;
    if (solution.optimal()) {
      std::map<std::string, double> vars;
      for (std::size_t i = 0; i < inst.variables.size(); ++i) vars[inst.variables[i].name] = solution.values[i];
      for (const auto& q : bi.quantities) record.quantities[q.name] = evaluate(exprs.at(q.name), vars, params);
      record.objective = solution.objective;
      ParameterValues bi_params = bi.parameter_defaults();
      for (const auto& [k, v] : tc.scenario) bi_params[k] = v;
      try {
        record.kpis = evaluate_kpis(bi, record.quantities, bi_params, record.objective);
      } catch (const Error& e) {
        kpi_error = e.describe();
      }
    }

    CaseContext ctx{bi, binding, inst, cfg, solution, record, kpi_error, std::move(exprs)};
    bool any_error = false, any_fail = false;
    for (const auto& a : tc.assertions) {
      AssertionOutcome outcome;
      try {
        outcome = std::visit(AssertionVisitor{ctx}, a);
      } catch (const Error& e) {
        outcome = error(describe(a) + ": " + e.describe());
      }
      any_error |= outcome.verdict == Verdict::Error;
      any_fail |= outcome.verdict == Verdict::Fail;
      report.assertions.push_back(std::move(outcome));
    }
    report.verdict = any_error ? Verdict::Error : (any_fail ? Verdict::Fail : Verdict::Pass);
    report.record = std::move(record);
  } catch (const Error& e) {
    report.verdict = Verdict::Error;
    report.diagnostic = e.describe();
  }
  return report;
}

}  // namespace

SuiteReport run_suite(const TestSuite& suite, const LpModel& model, const InterfaceBinding& binding,
                      const BusinessInterface& bi, const SolverConfig& cfg) {
  check_binding(bi, model, binding);
  SuiteReport report;
  if (suite.cases.empty()) report.warnings.push_back("EmptySuite");
  bool any_error = false, any_fail = false;
  for (const auto& tc : suite.cases) {
    report.cases.push_back(run_case(tc, model, binding, bi, cfg));
    any_error |= report.cases.back().verdict == Verdict::Error;
    any_fail |= report.cases.back().verdict == Verdict::Fail;
  }
  report.verdict = any_error ? Verdict::Error : (any_fail ? Verdict::Fail : Verdict::Pass);
  return report;
}

}  // namespace optmut
