#include "optmut/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "optmut/error.hpp"

namespace optmut {

Scalar Scalar::parameter(const std::string& name, double scale) {
  Scalar s;
  s.add_parameter(name, scale);
  return s;
}

void Scalar::add_parameter(const std::string& name, double scale) {
  auto it = std::lower_bound(params_.begin(), params_.end(), name,
                             [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it != params_.end() && it->first == name) {
    it->second += scale;
    if (it->second == 0.0) params_.erase(it);
  } else if (scale != 0.0) {
    params_.insert(it, {name, scale});
  }
}

double Scalar::evaluate(const ParameterValues& values) const {
  double out = constant_;
  for (const auto& [name, scale] : params_) {
    auto it = values.find(name);
    if (it == values.end()) throw Error(ErrorCode::UnknownParameter, "unknown parameter '" + name + "'");
    out += scale * it->second;
  }
  return out;
}

Scalar Scalar::operator-() const {
  Scalar out = *this;
  out *= -1.0;
  return out;
}

Scalar& Scalar::operator+=(const Scalar& other) {
  constant_ += other.constant_;
  for (const auto& [name, scale] : other.params_) add_parameter(name, scale);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& other) {
  constant_ -= other.constant_;
  for (const auto& [name, scale] : other.params_) add_parameter(name, -scale);
  return *this;
}

Scalar& Scalar::operator*=(double factor) {
  constant_ *= factor;
  if (factor == 0.0) {
    params_.clear();
  } else {
    for (auto& entry : params_) entry.second *= factor;
  }
  if (constant_ == 0.0) constant_ = 0.0;  // drop negative zero
  return *this;
}

void LinearExpr::add(const std::string& variable, const Scalar& coefficient) {
  for (auto& term : terms) {
    if (term.variable == variable) {
      term.coefficient += coefficient;
      return;
    }
  }
  terms.push_back({variable, coefficient});
}

Scalar LinearExpr::coefficient(const std::string& variable) const {
  Scalar sum;
  for (const auto& term : terms)
    if (term.variable == variable) sum += term.coefficient;
  return sum;
}

bool LinearExpr::has_term(const std::string& variable) const {
  return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.variable == variable; });
}

const Variable* LpModel::find_variable(const std::string& var) const {
  for (const auto& v : variables)
    if (v.name == var) return &v;
  return nullptr;
}

const Constraint* LpModel::find_constraint(const std::string& row) const {
  for (const auto& c : constraints)
    if (c.name == row) return &c;
  return nullptr;
}

const Parameter* LpModel::find_parameter(const std::string& param) const {
  for (const auto& p : parameters)
    if (p.name == param) return &p;
  return nullptr;
}

std::optional<std::size_t> LpModel::variable_index(const std::string& var) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == var) return i;
  return std::nullopt;
}

ParameterValues LpModel::parameter_values() const {
  ParameterValues out;
  for (const auto& p : parameters) out[p.name] = p.value;
  return out;
}

bool LpModel::has_integer_variables() const {
  return std::any_of(variables.begin(), variables.end(),
                     [](const Variable& v) { return v.domain == Domain::Integer; });
}

std::string_view to_string(Sense sense) {
  switch (sense) {
    case Sense::Le: return "<=";
    case Sense::Ge: return ">=";
    case Sense::Eq: return "==";
  }
  return "?";
}

std::string_view to_string(Domain domain) {
  return domain == Domain::Integer ? "integer" : "continuous";
}

std::string_view to_string(ObjectiveSense sense) {
  return sense == ObjectiveSense::Maximize ? "maximize" : "minimize";
}

namespace {

void check_scalar(const Scalar& s, const std::set<std::string>& params, const std::string& where) {
  if (!std::isfinite(s.constant()))
    throw Error(ErrorCode::InvalidModel, "non-finite number in " + where);
  for (const auto& [name, scale] : s.parameters()) {
    if (!std::isfinite(scale)) throw Error(ErrorCode::InvalidModel, "non-finite number in " + where);
    if (!params.count(name))
      throw Error(ErrorCode::UnknownParameter, "unknown parameter '" + name + "' in " + where);
  }
}

void check_expr(const LinearExpr& expr, const std::set<std::string>& vars, const std::set<std::string>& params,
                const std::string& where) {
  for (const auto& term : expr.terms) {
    if (!vars.count(term.variable))
      throw Error(ErrorCode::UnknownVariable, "unknown variable '" + term.variable + "' in " + where);
    check_scalar(term.coefficient, params, where);
  }
  check_scalar(expr.constant, params, where);
}

LinearExpr normalized_expr(const LinearExpr& expr) {
  LinearExpr out;
  for (const auto& term : expr.terms) out.add(term.variable, term.coefficient);
  std::erase_if(out.terms, [](const Term& t) { return t.coefficient.is_zero(); });
  out.constant = expr.constant;
  return out;
}

Scalar resolved(const Scalar& s, const ParameterValues& values) { return Scalar(s.evaluate(values)); }

LinearExpr resolved(const LinearExpr& expr, const ParameterValues& values) {
  LinearExpr out;
  for (const auto& term : expr.terms) {
    Scalar coef = resolved(term.coefficient, values);
    if (!coef.is_zero()) out.terms.push_back({term.variable, coef});
  }
  out.constant = resolved(expr.constant, values);
  return out;
}

}  // namespace

void validate(const LpModel& model) {
  if (model.name.empty()) throw Error(ErrorCode::InvalidModel, "model name is empty");
  std::set<std::string> vars, rows, params;
  for (const auto& p : model.parameters) {
    if (p.name.empty()) throw Error(ErrorCode::InvalidModel, "empty parameter name");
    if (!params.insert(p.name).second) throw Error(ErrorCode::DuplicateName, "duplicate parameter '" + p.name + "'");
    if (!std::isfinite(p.value)) throw Error(ErrorCode::InvalidModel, "parameter '" + p.name + "' is not finite");
  }
  for (const auto& v : model.variables) {
    if (v.name.empty()) throw Error(ErrorCode::InvalidModel, "empty variable name");
    if (!vars.insert(v.name).second) throw Error(ErrorCode::DuplicateName, "duplicate variable '" + v.name + "'");
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInfinity || v.upper == -kInfinity)
      throw Error(ErrorCode::InvalidModel, "invalid bounds on variable '" + v.name + "'");
    if (v.lower > v.upper)
      throw Error(ErrorCode::InvalidModel, "variable '" + v.name + "' has lower bound above upper bound");
  }
  for (const auto& c : model.constraints) {
    if (c.name.empty()) throw Error(ErrorCode::InvalidModel, "empty constraint name");
    if (!rows.insert(c.name).second) throw Error(ErrorCode::DuplicateName, "duplicate constraint '" + c.name + "'");
    check_expr(c.lhs, vars, params, "constraint '" + c.name + "'");
    check_scalar(c.rhs, params, "constraint '" + c.name + "'");
  }
  check_expr(model.objective.expr, vars, params, "objective");
}

LpModel normalize(const LpModel& model) {
  validate(model);
  LpModel out = model;
  for (auto& c : out.constraints) {
    c.lhs = normalized_expr(c.lhs);
    c.rhs -= c.lhs.constant;
    c.lhs.constant = Scalar();
  }
  out.objective.expr = normalized_expr(out.objective.expr);
  return out;
}

LpModel dualize(const LpModel& model) {
  const LpModel primal = normalize(model);
  if (primal.objective.sense != ObjectiveSense::Maximize)
    throw Error(ErrorCode::NotInStandardForm, "dualize expects a maximization model");
  for (const auto& v : primal.variables) {
    if (v.domain == Domain::Integer)
      throw Error(ErrorCode::NotInStandardForm, "variable '" + v.name + "' is integer");
    if (v.lower != 0.0 || v.upper != kInfinity)
      throw Error(ErrorCode::NotInStandardForm, "variable '" + v.name + "' is not bounded as x >= 0");
  }
  for (const auto& c : primal.constraints)
    if (c.sense != Sense::Le)
      throw Error(ErrorCode::NotInStandardForm, "constraint '" + c.name + "' is not a <= row");

  LpModel dual;
  dual.name = primal.name + "_dual";
  dual.parameters = primal.parameters;
  dual.objective.sense = ObjectiveSense::Minimize;
  dual.objective.expr.constant = primal.objective.expr.constant;
  for (const auto& c : primal.constraints) {
    const std::string u = "u_" + c.name;
    dual.variables.push_back({u, 0.0, kInfinity, Domain::Continuous});
    if (!c.rhs.is_zero()) dual.objective.expr.terms.push_back({u, c.rhs});
  }
  for (const auto& v : primal.variables) {
    Constraint row;
    row.name = v.name;
    row.sense = Sense::Ge;
    row.rhs = primal.objective.expr.coefficient(v.name);
    for (const auto& c : primal.constraints) {
      Scalar a = c.lhs.coefficient(v.name);
      if (!a.is_zero()) row.lhs.terms.push_back({"u_" + c.name, a});
    }
    dual.constraints.push_back(std::move(row));
  }
  validate(dual);
  return dual;
}

LpModel scale_objective(const LpModel& model, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw Error(ErrorCode::NonPositiveFactor, "objective scale factor must be positive and finite");
  LpModel out = model;
  for (auto& term : out.objective.expr.terms) term.coefficient *= factor;
  out.objective.expr.constant *= factor;
  return out;
}

LpModel instantiate(const LpModel& model, const ParameterValues& overrides) {
  ParameterValues values = model.parameter_values();
  for (const auto& [name, value] : overrides) {
    if (!values.count(name)) throw Error(ErrorCode::UnknownParameter, "unknown parameter '" + name + "'");
    values[name] = value;
  }
  LpModel out = model;
  for (auto& p : out.parameters) p.value = values.at(p.name);
  for (auto& c : out.constraints) {
    c.lhs = resolved(c.lhs, values);
    c.rhs = resolved(c.rhs, values);
  }
  out.objective.expr = resolved(out.objective.expr, values);
  return out;
}

}  // namespace optmut
