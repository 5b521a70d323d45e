#include "optmut/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "expr.hpp"
#include "optmut/error.hpp"

namespace optmut {

namespace {

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

[[noreturn]] void violation(const std::string& pointer, const std::string& message) {
  const std::string where = pointer.empty() ? "/" : pointer;
  throw Error(ErrorCode::SchemaViolation, message, where);
}

std::string index_ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

// Strict object reader: every field must be consumed before done().
class Obj {
 public:
  Obj(const Json& json, std::string pointer) : json_(json), ptr_(std::move(pointer)) {
    if (!json_.is_object()) violation(ptr_, "expected an object");
  }

  std::string ptr(const std::string& key) const { return ptr_ + "/" + escape_pointer(key); }
  const std::string& ptr() const { return ptr_; }

  const Json& req(const std::string& key) {
    seen_.insert(key);
    auto it = json_.find(key);
    if (it == json_.end()) violation(ptr(key), "missing required field '" + key + "'");
    return *it;
  }

  const Json* opt(const std::string& key) {
    seen_.insert(key);
    auto it = json_.find(key);
    return it == json_.end() ? nullptr : &*it;
  }

  void done() const {
    for (auto it = json_.begin(); it != json_.end(); ++it)
      if (!seen_.count(it.key())) violation(ptr(it.key()), "unknown field '" + it.key() + "'");
  }

  const Json& json() const { return json_; }

 private:
  const Json& json_;
  std::string ptr_;
  std::set<std::string> seen_;
};

std::string as_string(const Json& j, const std::string& ptr) {
  if (!j.is_string()) violation(ptr, "expected a string");
  return j.get<std::string>();
}

std::string as_identifier(const Json& j, const std::string& ptr) {
  std::string s = as_string(j, ptr);
  if (!detail::is_identifier(s)) violation(ptr, "'" + s + "' is not a valid identifier");
  return s;
}

double as_number(const Json& j, const std::string& ptr) {
  if (!j.is_number()) violation(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) violation(ptr, "expected a finite number");
  return v;
}

double as_bound(const Json& j, const std::string& ptr) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    violation(ptr, "expected a number, \"inf\" or \"-inf\"");
  }
  return as_number(j, ptr);
}

bool as_bool(const Json& j, const std::string& ptr) {
  if (!j.is_boolean()) violation(ptr, "expected a boolean");
  return j.get<bool>();
}

std::size_t as_count(const Json& j, const std::string& ptr) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    violation(ptr, "expected a non-negative integer");
  return j.get<std::size_t>();
}

const Json& as_array(const Json& j, const std::string& ptr) {
  if (!j.is_array()) violation(ptr, "expected an array");
  return j;
}

Json bound_json(double v) {
  if (v == kInfinity) return "inf";
  if (v == -kInfinity) return "-inf";
  return v;
}

void header(Obj& o, std::string_view kind) {
  const Json& version = o.req("schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion)
    violation(o.ptr("schema_version"), "unsupported schema_version (expected 1)");
  const std::string k = as_string(o.req("kind"), o.ptr("kind"));
  if (k != kind) violation(o.ptr("kind"), "expected kind '" + std::string(kind) + "', found '" + k + "'");
}

Json with_header(std::string_view kind) {
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["kind"] = std::string(kind);
  return j;
}

std::map<std::string, double> number_map(const Json& j, const std::string& ptr, bool identifiers = true) {
  if (!j.is_object()) violation(ptr, "expected an object");
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string p = ptr + "/" + escape_pointer(it.key());
    if (identifiers && !detail::is_identifier(it.key())) violation(p, "'" + it.key() + "' is not a valid identifier");
    out[it.key()] = as_number(*it, p);
  }
  return out;
}

// Scalar: a plain number, or {"constant": c, "parameters": {name: scale}}.
Json scalar_json(const Scalar& s) {
  if (s.is_constant()) return s.constant();
  Json params = Json::object();
  for (const auto& [name, scale] : s.parameters()) params[name] = scale;
  return Json{{"constant", s.constant()}, {"parameters", params}};
}

Scalar scalar_from(const Json& j, const std::string& ptr) {
  if (j.is_number()) return Scalar(as_number(j, ptr));
  Obj o(j, ptr);
  Scalar s(as_number(o.req("constant"), o.ptr("constant")));
  for (const auto& [name, scale] : number_map(o.req("parameters"), o.ptr("parameters"))) s += Scalar::parameter(name, scale);
  o.done();
  return s;
}

Json expr_json(const LinearExpr& e) {
  Json terms = Json::array();
  for (const auto& t : e.terms) terms.push_back({{"variable", t.variable}, {"coefficient", scalar_json(t.coefficient)}});
  return Json{{"terms", terms}, {"constant", scalar_json(e.constant)}};
}

LinearExpr expr_from(const Json& j, const std::string& ptr) {
  Obj o(j, ptr);
  LinearExpr e;
  const Json& terms = as_array(o.req("terms"), o.ptr("terms"));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Obj t(terms[i], index_ptr(o.ptr("terms"), i));
    const std::string var = as_identifier(t.req("variable"), t.ptr("variable"));
    e.add(var, scalar_from(t.req("coefficient"), t.ptr("coefficient")));
    t.done();
  }
  if (const Json* c = o.opt("constant")) e.constant = scalar_from(*c, o.ptr("constant"));
  o.done();
  return e;
}

std::optional<Sense> parse_sense(std::string_view s) {
  for (auto v : {Sense::Le, Sense::Ge, Sense::Eq})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

Sense sense_from(const Json& j, const std::string& ptr) {
  const std::string s = as_string(j, ptr);
  if (auto v = parse_sense(s)) return *v;
  violation(ptr, "invalid sense '" + s + "' (expected \"<=\", \">=\" or \"==\")");
}

template <typename Enum, typename Parse>
Enum enum_from(const Json& j, const std::string& ptr, Parse parse, const std::string& what) {
  const std::string s = as_string(j, ptr);
  if (auto v = parse(s)) return *v;
  violation(ptr, "invalid " + what + " '" + s + "'");
}

std::optional<SolveStatus> status_parse(std::string_view s) { return parse_solve_status(s); }

Json assertion_json(const Assertion& a) {
  Json j = Json::object();
  j["kind"] = std::string(assertion_kind(a));
  if (auto* s = std::get_if<StatusIs>(&a)) {
    j["status"] = std::string(to_string(s->status));
  } else if (auto* k = std::get_if<KpiCompare>(&a)) {
    j["kpi"] = k->kpi;
    j["op"] = std::string(to_string(k->op));
    j["value"] = k->value;
    j["tol"] = k->tol;
  } else if (auto* q = std::get_if<QuantityCompare>(&a)) {
    j["quantity"] = q->quantity;
    j["op"] = std::string(to_string(q->op));
    j["value"] = q->value;
    j["tol"] = q->tol;
  } else if (auto* f = std::get_if<PointFeasible>(&a)) {
    j["point"] = f->point;
    j["tol"] = f->tol;
  } else if (auto* d = std::get_if<PointDominated>(&a)) {
    j["point"] = d->point;
    j["tol"] = d->tol;
    j["relative"] = d->relative;
  }
  return j;
}

double tol_from(Obj& o) {
  const Json* t = o.opt("tol");
  if (!t) return kDefaultTolerance;
  const double v = as_number(*t, o.ptr("tol"));
  if (v < 0.0) violation(o.ptr("tol"), "tolerance must be non-negative");
  return v;
}

Assertion assertion_from(const Json& j, const std::string& ptr) {
  Obj o(j, ptr);
  const std::string kind = as_string(o.req("kind"), o.ptr("kind"));
  Assertion out;
  auto op = [&] { return enum_from<CompareOp>(o.req("op"), o.ptr("op"), parse_compare_op, "comparison operator"); };
  if (kind == "status_is") {
    out = StatusIs{enum_from<SolveStatus>(o.req("status"), o.ptr("status"), status_parse, "status")};
  } else if (kind == "kpi_compare") {
    KpiCompare a;
    const Json& name = o.req("kpi");
    a.kpi = as_string(name, o.ptr("kpi"));
    if (a.kpi != "objective" && !detail::is_identifier(a.kpi)) violation(o.ptr("kpi"), "invalid kpi name");
    a.op = op();
    a.value = as_number(o.req("value"), o.ptr("value"));
    a.tol = tol_from(o);
    out = a;
  } else if (kind == "quantity_compare") {
    QuantityCompare a;
    a.quantity = as_identifier(o.req("quantity"), o.ptr("quantity"));
    a.op = op();
    a.value = as_number(o.req("value"), o.ptr("value"));
    a.tol = tol_from(o);
    out = a;
  } else if (kind == "point_feasible") {
    PointFeasible a;
    a.point = number_map(o.req("point"), o.ptr("point"));
    a.tol = tol_from(o);
    out = a;
  } else if (kind == "point_dominated") {
    PointDominated a;
    a.point = number_map(o.req("point"), o.ptr("point"));
    a.tol = tol_from(o);
    if (const Json* r = o.opt("relative")) a.relative = as_bool(*r, o.ptr("relative"));
    out = a;
  } else {
    violation(o.ptr("kind"), "unknown assertion kind '" + kind + "'");
  }
  o.done();
  return out;
}

Json verdict_json(const MutantVerdict& v) {
  Json j = Json::object();
  j["status"] = std::string(to_string(v.status));
  j["failing_cases"] = v.failing_cases;
  j["harness_error"] = v.harness_error;
  j["potentially_equivalent"] = v.potentially_equivalent;
  j["diagnostic"] = v.diagnostic;
  if (v.reason) j["reason"] = std::string(to_string(*v.reason));
  return j;
}

MutantVerdict verdict_from(const Json& j, const std::string& ptr, const std::string& id) {
  Obj o(j, ptr);
  MutantVerdict v;
  v.mutant_id = id;
  v.status = enum_from<MutantStatus>(o.req("status"), o.ptr("status"), parse_mutant_status, "mutant status");
  const Json& cases = as_array(o.req("failing_cases"), o.ptr("failing_cases"));
  for (std::size_t i = 0; i < cases.size(); ++i) v.failing_cases.push_back(as_string(cases[i], index_ptr(o.ptr("failing_cases"), i)));
  v.harness_error = as_bool(o.req("harness_error"), o.ptr("harness_error"));
  v.potentially_equivalent = as_bool(o.req("potentially_equivalent"), o.ptr("potentially_equivalent"));
  v.diagnostic = as_string(o.req("diagnostic"), o.ptr("diagnostic"));
  if (const Json* r = o.opt("reason"))
    v.reason = enum_from<StillbornReason>(*r, o.ptr("reason"), parse_stillborn_reason, "stillborn reason");
  if ((v.status == MutantStatus::Stillborn) != v.reason.has_value())
    violation(o.ptr("reason"), "reason is required exactly for stillborn mutants");
  o.done();
  return v;
}

Json entry_json(const MutantEntry& e) {
  return Json{{"id", e.id}, {"mutation", to_json(e.kind)}, {"description", e.description}, {"verdict", verdict_json(e.verdict)}};
}

MutantEntry entry_from(const Json& j, const std::string& ptr) {
  Obj o(j, ptr);
  MutantEntry e;
  e.id = as_identifier(o.req("id"), o.ptr("id"));
  e.kind = mutation_from_json(o.req("mutation"), o.ptr("mutation"));
  e.description = as_string(o.req("description"), o.ptr("description"));
  e.verdict = verdict_from(o.req("verdict"), o.ptr("verdict"), e.id);
  o.done();
  return e;
}

std::vector<MutantEntry> entries_from(const Json& j, const std::string& ptr) {
  const Json& arr = as_array(j, ptr);
  std::vector<MutantEntry> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(entry_from(arr[i], index_ptr(ptr, i)));
    if (!ids.insert(out.back().id).second) violation(index_ptr(ptr, i) + "/id", "duplicate mutant id");
  }
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string canonical_dump(const Json& json) { return json.dump(2) + "\n"; }

Json to_json(const LpModel& model) {
  Json j = with_header("model");
  j["name"] = model.name;
  Json params = Json::array();
  for (const auto& p : model.parameters) params.push_back({{"name", p.name}, {"value", p.value}});
  j["parameters"] = params;
  Json vars = Json::array();
  for (const auto& v : model.variables)
    vars.push_back({{"name", v.name},
                    {"lower", bound_json(v.lower)},
                    {"upper", bound_json(v.upper)},
                    {"domain", std::string(to_string(v.domain))}});
  j["variables"] = vars;
  j["objective"] = {{"sense", std::string(to_string(model.objective.sense))}, {"expr", expr_json(model.objective.expr)}};
  Json rows = Json::array();
  for (const auto& c : model.constraints)
    rows.push_back({{"name", c.name},
                    {"lhs", expr_json(c.lhs)},
                    {"sense", std::string(to_string(c.sense))},
                    {"rhs", scalar_json(c.rhs)}});
  j["constraints"] = rows;
  return j;
}

LpModel model_from_json(const Json& json) {
  Obj o(json, "");
  header(o, "model");
  LpModel m;
  m.name = as_identifier(o.req("name"), o.ptr("name"));
  const Json& params = as_array(o.req("parameters"), o.ptr("parameters"));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Obj p(params[i], index_ptr(o.ptr("parameters"), i));
    m.parameters.push_back({as_identifier(p.req("name"), p.ptr("name")), as_number(p.req("value"), p.ptr("value"))});
    p.done();
  }
  const Json& vars = as_array(o.req("variables"), o.ptr("variables"));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Obj v(vars[i], index_ptr(o.ptr("variables"), i));
    Variable var;
    var.name = as_identifier(v.req("name"), v.ptr("name"));
    if (const Json* lo = v.opt("lower")) var.lower = as_bound(*lo, v.ptr("lower"));
    if (const Json* hi = v.opt("upper")) var.upper = as_bound(*hi, v.ptr("upper"));
    if (const Json* d = v.opt("domain")) {
      const std::string s = as_string(*d, v.ptr("domain"));
      if (s == "integer")
        var.domain = Domain::Integer;
      else if (s != "continuous")
        violation(v.ptr("domain"), "invalid domain '" + s + "'");
    }
    v.done();
    m.variables.push_back(var);
  }
  {
    Obj obj(o.req("objective"), o.ptr("objective"));
    const std::string s = as_string(obj.req("sense"), obj.ptr("sense"));
    if (s == "maximize")
      m.objective.sense = ObjectiveSense::Maximize;
    else if (s != "minimize")
      violation(obj.ptr("sense"), "invalid objective sense '" + s + "'");
    m.objective.expr = expr_from(obj.req("expr"), obj.ptr("expr"));
    obj.done();
  }
  const Json& rows = as_array(o.req("constraints"), o.ptr("constraints"));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Obj r(rows[i], index_ptr(o.ptr("constraints"), i));
    Constraint c;
    c.name = as_identifier(r.req("name"), r.ptr("name"));
    c.lhs = expr_from(r.req("lhs"), r.ptr("lhs"));
    c.sense = sense_from(r.req("sense"), r.ptr("sense"));
    c.rhs = scalar_from(r.req("rhs"), r.ptr("rhs"));
    r.done();
    m.constraints.push_back(std::move(c));
  }
  o.done();
  validate(m);
  return m;
}

Json to_json(const BusinessInterface& bi) {
  Json j = with_header("interface");
  j["name"] = bi.name;
  Json qs = Json::array();
  for (const auto& q : bi.quantities) qs.push_back({{"name", q.name}, {"description", q.description}, {"units", q.units}});
  j["quantities"] = qs;
  Json ks = Json::array();
  for (const auto& k : bi.kpis) ks.push_back({{"name", k.name}, {"expr", k.expr}});
  j["kpis"] = ks;
  Json ps = Json::array();
  for (const auto& p : bi.parameters)
    ps.push_back({{"name", p.name}, {"default", p.default_value}, {"description", p.description}});
  j["parameters"] = ps;
  return j;
}

BusinessInterface interface_from_json(const Json& json) {
  Obj o(json, "");
  header(o, "interface");
  BusinessInterface bi;
  bi.name = as_identifier(o.req("name"), o.ptr("name"));
  const Json& qs = as_array(o.req("quantities"), o.ptr("quantities"));
  for (std::size_t i = 0; i < qs.size(); ++i) {
    Obj q(qs[i], index_ptr(o.ptr("quantities"), i));
    Quantity quantity;
    quantity.name = as_identifier(q.req("name"), q.ptr("name"));
    if (const Json* d = q.opt("description")) quantity.description = as_string(*d, q.ptr("description"));
    if (const Json* u = q.opt("units")) quantity.units = as_string(*u, q.ptr("units"));
    q.done();
    bi.quantities.push_back(std::move(quantity));
  }
  const Json& ks = as_array(o.req("kpis"), o.ptr("kpis"));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Obj k(ks[i], index_ptr(o.ptr("kpis"), i));
    bi.kpis.push_back({as_identifier(k.req("name"), k.ptr("name")), as_string(k.req("expr"), k.ptr("expr"))});
    k.done();
  }
  const Json& ps = as_array(o.req("parameters"), o.ptr("parameters"));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Obj p(ps[i], index_ptr(o.ptr("parameters"), i));
    InterfaceParameter param;
    param.name = as_identifier(p.req("name"), p.ptr("name"));
    param.default_value = as_number(p.req("default"), p.ptr("default"));
    if (const Json* d = p.opt("description")) param.description = as_string(*d, p.ptr("description"));
    p.done();
    bi.parameters.push_back(std::move(param));
  }
  o.done();
  validate(bi);
  return bi;
}

Json to_json(const TestSuite& suite) {
  Json j = with_header("testsuite");
  j["interface"] = suite.interface_name;
  Json cases = Json::array();
  for (const auto& c : suite.cases) {
    Json assertions = Json::array();
    for (const auto& a : c.assertions) assertions.push_back(assertion_json(a));
    Json scenario = Json::object();
    for (const auto& [k, v] : c.scenario) scenario[k] = v;
    cases.push_back({{"name", c.name}, {"scenario", scenario}, {"assertions", assertions}});
  }
  j["cases"] = cases;
  return j;
}

TestSuite suite_from_json(const Json& json) {
  Obj o(json, "");
  header(o, "testsuite");
  TestSuite suite;
  suite.interface_name = as_identifier(o.req("interface"), o.ptr("interface"));
  const Json& cases = as_array(o.req("cases"), o.ptr("cases"));
  std::set<std::string> names;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    Obj c(cases[i], index_ptr(o.ptr("cases"), i));
    TestCase tc;
    tc.name = as_identifier(c.req("name"), c.ptr("name"));
    if (!names.insert(tc.name).second) violation(c.ptr("name"), "duplicate case name '" + tc.name + "'");
    if (const Json* s = c.opt("scenario")) tc.scenario = number_map(*s, c.ptr("scenario"));
    const Json& as = as_array(c.req("assertions"), c.ptr("assertions"));
    if (as.empty()) violation(c.ptr("assertions"), "a case needs at least one assertion");
    for (std::size_t k = 0; k < as.size(); ++k) tc.assertions.push_back(assertion_from(as[k], index_ptr(c.ptr("assertions"), k)));
    c.done();
    suite.cases.push_back(std::move(tc));
  }
  o.done();
  return suite;
}

Json to_json(const InterfaceBinding& binding) {
  Json j = with_header("binding");
  Json q = Json::object(), p = Json::object();
  for (const auto& [k, v] : binding.quantities) q[k] = v;
  for (const auto& [k, v] : binding.parameters) p[k] = v;
  j["quantities"] = q;
  j["parameters"] = p;
  return j;
}

InterfaceBinding binding_from_json(const Json& json) {
  Obj o(json, "");
  header(o, "binding");
  InterfaceBinding b;
  auto read_map = [&](const char* key, std::map<std::string, std::string>& out, bool identifier_values) {
    const Json& m = o.req(key);
    if (!m.is_object()) violation(o.ptr(key), "expected an object");
    for (auto it = m.begin(); it != m.end(); ++it) {
      const std::string p = o.ptr(key) + "/" + escape_pointer(it.key());
      if (!detail::is_identifier(it.key())) violation(p, "'" + it.key() + "' is not a valid identifier");
      out[it.key()] = identifier_values ? as_identifier(*it, p) : as_string(*it, p);
    }
  };
  read_map("quantities", b.quantities, false);
  read_map("parameters", b.parameters, true);
  o.done();
  return b;
}

Json to_json(const MutationKind& kind) {
  Json j = Json::object();
  j["operator"] = std::string(to_string(operator_of(kind)));
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RhsDelta>) {
          j["constraint"] = k.constraint;
          j["delta"] = k.delta;
        } else if constexpr (std::is_same_v<T, CoefDelta>) {
          j["constraint"] = k.constraint;
          j["variable"] = k.variable;
          j["delta"] = k.delta;
        } else if constexpr (std::is_same_v<T, SenseFlip>) {
          j["constraint"] = k.constraint;
          j["sense"] = std::string(to_string(k.new_sense));
        } else if constexpr (std::is_same_v<T, ObjectiveScale>) {
          j["factor"] = k.factor;
        } else if constexpr (std::is_same_v<T, ObjectiveCoefDelta>) {
          j["variable"] = k.variable;
          j["delta"] = k.delta;
        } else if constexpr (std::is_same_v<T, BoundDrop>) {
          j["variable"] = k.variable;
          j["bound"] = std::string(to_string(k.which));
        } else if constexpr (std::is_same_v<T, DomainRelax>) {
          j["variable"] = k.variable;
        } else if constexpr (std::is_same_v<T, ConstraintDrop>) {
          j["constraint"] = k.constraint;
        }
      },
      kind);
  return j;
}

MutationKind mutation_from_json(const Json& json, const std::string& pointer) {
  Obj o(json, pointer);
  const std::string op_text = as_string(o.req("operator"), o.ptr("operator"));
  std::optional<MutationOperator> op;
  for (auto candidate : kAllOperators)
    if (to_string(candidate) == op_text) op = candidate;
  if (!op) violation(o.ptr("operator"), "unknown mutation operator '" + op_text + "'");
  auto id = [&](const char* key) { return as_identifier(o.req(key), o.ptr(key)); };
  auto num = [&](const char* key) { return as_number(o.req(key), o.ptr(key)); };
  MutationKind kind;
  switch (*op) {
    case MutationOperator::RhsDelta: kind = RhsDelta{id("constraint"), num("delta")}; break;
    case MutationOperator::CoefDelta: {
      CoefDelta k;
      k.constraint = id("constraint");
      k.variable = id("variable");
      k.delta = num("delta");
      kind = k;
      break;
    }
    case MutationOperator::SenseFlip: kind = SenseFlip{id("constraint"), sense_from(o.req("sense"), o.ptr("sense"))}; break;
    case MutationOperator::ObjectiveScale: kind = ObjectiveScale{num("factor")}; break;
    case MutationOperator::ObjectiveCoefDelta: kind = ObjectiveCoefDelta{id("variable"), num("delta")}; break;
    case MutationOperator::BoundDrop: {
      BoundDrop k;
      k.variable = id("variable");
      const std::string b = as_string(o.req("bound"), o.ptr("bound"));
      if (b == "lower")
        k.which = Bound::Lower;
      else if (b == "upper")
        k.which = Bound::Upper;
      else
        violation(o.ptr("bound"), "invalid bound '" + b + "'");
      kind = k;
      break;
    }
    case MutationOperator::DomainRelax: kind = DomainRelax{id("variable")}; break;
    case MutationOperator::ConstraintDrop: kind = ConstraintDrop{id("constraint")}; break;
  }
  o.done();
  return kind;
}

Json mutants_to_json(const std::string& base_model, const std::vector<MutantEntry>& mutants,
                     const std::optional<CoverageReport>& coverage) {
  Json j = with_header("mutants");
  j["base_model"] = base_model;
  Json arr = Json::array();
  for (const auto& m : mutants) arr.push_back(entry_json(m));
  j["mutants"] = arr;
  if (coverage) {
    j["coverage"] = {{"killed", coverage->killed},
                     {"survived", coverage->survived},
                     {"stillborn", coverage->stillborn},
                     {"mc_percent", coverage->mc_percent},
                     {"ratio", coverage->ratio},
                     {"coverage", round2(coverage->ratio)}};
  } else {
    j["coverage"] = nullptr;
  }
  return j;
}

std::vector<MutantEntry> mutants_from_json(const Json& json) {
  Obj o(json, "");
  header(o, "mutants");
  as_identifier(o.req("base_model"), o.ptr("base_model"));
  auto out = entries_from(o.req("mutants"), o.ptr("mutants"));
  o.req("coverage");
  o.done();
  return out;
}

Json to_json(const CampaignReport& r) {
  Json j = with_header("campaign_report");
  j["problem_id"] = r.problem_id;
  j["iterations"] = r.iterations;
  j["budget"] = r.budget;
  j["verdict"] = std::string(to_string(r.verdict));
  j["killed"] = r.killed;
  j["survived"] = r.survived;
  j["stillborn"] = r.stillborn;
  const auto ratio = r.ratio();
  j["ratio"] = optional_number(ratio);
  j["coverage"] = ratio ? Json(round2(*ratio)) : Json(nullptr);
  j["mc_percent"] = ratio ? Json(100.0 * static_cast<double>(r.killed) / static_cast<double>(r.total())) : Json(nullptr);
  Json arr = Json::array();
  for (const auto& m : r.mutants) arr.push_back(entry_json(m));
  j["mutants"] = arr;
  j["objective"] = optional_number(r.objective);
  j["reference_objective"] = optional_number(r.reference_objective);
  return j;
}

CampaignReport campaign_report_from_json(const Json& json) {
  Obj o(json, "");
  header(o, "campaign_report");
  CampaignReport r;
  r.problem_id = as_string(o.req("problem_id"), o.ptr("problem_id"));
  if (r.problem_id.empty()) violation(o.ptr("problem_id"), "problem id must not be empty");
  r.iterations = as_count(o.req("iterations"), o.ptr("iterations"));
  r.budget = as_count(o.req("budget"), o.ptr("budget"));
  r.verdict = enum_from<Verdict>(o.req("verdict"), o.ptr("verdict"), parse_verdict, "verdict");
  r.killed = as_count(o.req("killed"), o.ptr("killed"));
  r.survived = as_count(o.req("survived"), o.ptr("survived"));
  r.stillborn = as_count(o.req("stillborn"), o.ptr("stillborn"));
  for (const char* derived : {"ratio", "coverage", "mc_percent"}) {
    const Json& v = o.req(derived);
    if (!v.is_null()) as_number(v, o.ptr(derived));
  }
  r.mutants = entries_from(o.req("mutants"), o.ptr("mutants"));
  auto opt_num = [&](const char* key) -> std::optional<double> {
    const Json* v = o.opt(key);
    if (!v || v->is_null()) return std::nullopt;
    return as_number(*v, o.ptr(key));
  };
  r.objective = opt_num("objective");
  r.reference_objective = opt_num("reference_objective");
  o.done();
  if (!r.mutants.empty()) {
    std::size_t k = 0, s = 0, b = 0;
    for (const auto& m : r.mutants) {
      k += m.verdict.status == MutantStatus::Killed;
      s += m.verdict.status == MutantStatus::Survived;
      b += m.verdict.status == MutantStatus::Stillborn;
    }
    if (k != r.killed || s != r.survived || b != r.stillborn)
      violation("/mutants", "mutant verdicts disagree with the reported counts");
  }
  return r;
}

Json to_json(const AggregateReport& r) {
  Json j = with_header("aggregate_report");
  Json problems = Json::array();
  for (const auto& p : r.problems) {
    const std::size_t total = p.killed + p.survived;
    std::optional<double> ratio;
    if (total) ratio = static_cast<double>(p.killed) / static_cast<double>(total);
    problems.push_back({{"problem_id", p.problem_id},
                        {"runs", p.runs},
                        {"mean_iterations", p.mean_iterations},
                        {"passed_runs", p.passed_runs},
                        {"killed", p.killed},
                        {"survived", p.survived},
                        {"stillborn", p.stillborn},
                        {"ratio", optional_number(ratio)},
                        {"coverage", total ? Json(round2(static_cast<double>(p.killed) / static_cast<double>(total))) : Json(nullptr)}});
  }
  j["problems"] = problems;
  j["killed"] = r.killed;
  j["survived"] = r.survived;
  j["stillborn"] = r.stillborn;
  j["ratio"] = optional_number(r.ratio);
  j["coverage"] = r.ratio ? Json(round2(*r.ratio)) : Json(nullptr);
  j["mean_iterations"] = r.mean_iterations;
  Json bins = Json::array();
  for (const auto& b : r.histogram) bins.push_back({{"center", b.center}, {"count", b.count}});
  j["histogram"] = bins;
  return j;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("malformed JSON: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot replace '" + path.string() + "'");
  }
}

Bundle read_json_bundle(const std::filesystem::path& path) {
  const Json j = parse_json(read_text_file(path));
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) violation("/kind", "document has no kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "model") return model_from_json(j);
  if (kind == "testsuite") return suite_from_json(j);
  if (kind == "interface") return interface_from_json(j);
  if (kind == "binding") return binding_from_json(j);
  if (kind == "campaign_report") return campaign_report_from_json(j);
  violation("/kind", "unsupported bundle kind '" + kind + "'");
}

void write_json_bundle(const Bundle& bundle, const std::filesystem::path& path) {
  const Json j = std::visit([](const auto& v) { return to_json(v); }, bundle);
  write_file_atomic(path, canonical_dump(j));
}

}  // namespace optmut
