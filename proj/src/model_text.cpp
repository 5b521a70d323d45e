#include "optmut/model_text.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "expr.hpp"

namespace optmut {

using detail::ExprNode;
using detail::Tok;
using detail::Token;

std::string Diagnostic::to_string() const {
  return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + std::string(optmut::to_string(code)) +
         ": " + message;
}

std::string format_number(double value) {
  if (value == kInfinity) return "inf";
  if (value == -kInfinity) return "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

enum class SymbolKind { Variable, Parameter };

struct Affine {
  std::vector<std::pair<std::string, Scalar>> terms;
  Scalar constant;

  bool pure_number() const { return terms.empty() && constant.is_constant(); }
  bool numeric_coefficients() const {
    if (!constant.is_constant()) return false;
    for (const auto& t : terms)
      if (!t.second.is_constant()) return false;
    return true;
  }
  void add_term(const std::string& var, const Scalar& coef) {
    for (auto& t : terms) {
      if (t.first == var) {
        t.second += coef;
        return;
      }
    }
    terms.emplace_back(var, coef);
  }
  Affine& operator+=(const Affine& o) {
    for (const auto& t : o.terms) add_term(t.first, t.second);
    constant += o.constant;
    return *this;
  }
  Affine& scale(double f) {
    for (auto& t : terms) t.second *= f;
    constant *= f;
    return *this;
  }
  // Multiply numeric coefficients by a parameter-valued scalar.
  Affine& scale(const Scalar& s) {
    for (auto& t : terms) t.second = s * t.second.constant();
    constant = s * constant.constant();
    return *this;
  }
};

class AffineBuilder {
 public:
  AffineBuilder(const std::map<std::string, SymbolKind>& symbols, std::vector<Diagnostic>& diagnostics)
      : symbols_(symbols), diagnostics_(diagnostics) {}

  std::optional<Affine> eval(const ExprNode& node) {
    switch (node.kind) {
      case ExprNode::Kind::Number: {
        Affine a;
        a.constant = Scalar(node.value);
        return a;
      }
      case ExprNode::Kind::Symbol: {
        auto it = symbols_.find(node.name);
        if (it == symbols_.end()) {
          diagnostics_.push_back({ErrorCode::UnknownSymbol, "unknown symbol '" + node.name + "'", node.span});
          return std::nullopt;
        }
        Affine a;
        if (it->second == SymbolKind::Variable)
          a.terms.emplace_back(node.name, Scalar(1.0));
        else
          a.constant = Scalar::parameter(node.name);
        return a;
      }
      case ExprNode::Kind::Neg: {
        auto a = eval(*node.lhs);
        if (a) a->scale(-1.0);
        return a;
      }
      case ExprNode::Kind::Add:
      case ExprNode::Kind::Sub: {
        auto a = eval(*node.lhs);
        auto b = eval(*node.rhs);
        if (!a || !b) return std::nullopt;
        if (node.kind == ExprNode::Kind::Sub) b->scale(-1.0);
        *a += *b;
        return a;
      }
      case ExprNode::Kind::Mul: {
        auto a = eval(*node.lhs);
        auto b = eval(*node.rhs);
        if (!a || !b) return std::nullopt;
        if (a->pure_number()) return b->scale(a->constant.constant()), b;
        if (b->pure_number()) return a->scale(b->constant.constant()), a;
        if (a->terms.empty() && b->numeric_coefficients()) return b->scale(a->constant), b;
        if (b->terms.empty() && a->numeric_coefficients()) return a->scale(b->constant), a;
        diagnostics_.push_back({ErrorCode::SyntaxError, "nonlinear term", node.span});
        return std::nullopt;
      }
      case ExprNode::Kind::Div: {
        auto a = eval(*node.lhs);
        auto b = eval(*node.rhs);
        if (!a || !b) return std::nullopt;
        if (!b->pure_number()) {
          diagnostics_.push_back({ErrorCode::SyntaxError, "divisor must be a number", node.rhs->span});
          return std::nullopt;
        }
        const double d = b->constant.constant();
        if (d == 0.0) {
          diagnostics_.push_back({ErrorCode::SyntaxError, "division by zero", node.rhs->span});
          return std::nullopt;
        }
        a->scale(1.0 / d);
        return a;
      }
    }
    return std::nullopt;
  }

 private:
  const std::map<std::string, SymbolKind>& symbols_;
  std::vector<Diagnostic>& diagnostics_;
};

bool finite_scalar(const Scalar& s) {
  if (!std::isfinite(s.constant())) return false;
  for (const auto& p : s.parameters())
    if (!std::isfinite(p.second)) return false;
  return true;
}

struct ParsedVar {
  Variable var;
  SourceSpan span;
};

struct ParsedParam {
  Parameter param;
  SourceSpan span;
};

struct ParsedConstraint {
  std::string name;
  bool named = false;
  SourceSpan name_span;
  SourceSpan span;
  detail::ExprPtr lhs;
  detail::ExprPtr rhs;
  Sense sense = Sense::Le;
};

struct ParsedObjective {
  ObjectiveSense sense;
  detail::ExprPtr expr;
  SourceSpan span;
};

enum class Section { None, Params, Vars, Constraints };

constexpr std::size_t kMaxDiagnostics = 64;

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : text_(text) {}

  ParseResult run() {
    tokens_ = detail::tokenize(text_, diags_);
    std::size_t begin = 0;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].kind == Tok::Newline || tokens_[i].kind == Tok::End) {
        if (i > begin) statement(begin, i);
        begin = i + 1;
        if (diags_.size() >= kMaxDiagnostics) break;
      }
    }
    ParseResult result;
    if (diags_.empty()) build(result);
    result.diagnostics = std::move(diags_);
    if (!result.diagnostics.empty()) result.document.reset();
    return result;
  }

 private:
  const Token& tok(std::size_t i) const { return tokens_[i]; }

  void error(ErrorCode code, std::string message, SourceSpan span) {
    diags_.push_back({code, std::move(message), span});
  }

  bool is_word(std::size_t i, std::string_view w) const {
    return tokens_[i].kind == Tok::Ident && tokens_[i].text == w;
  }

  bool check_name(const Token& t) {
    if (t.kind != Tok::Ident) {
      error(ErrorCode::SyntaxError, "expected a name", t.span);
      return false;
    }
    if (detail::is_keyword(t.text)) {
      error(ErrorCode::SyntaxError, "'" + t.text + "' is a reserved word", t.span);
      return false;
    }
    return true;
  }

  void statement(std::size_t b, std::size_t e) {
    const Token& head = tok(b);
    const bool lone = e - b == 1 || (e - b == 2 && tok(b + 1).kind == Tok::Colon);
    if (is_word(b, "model")) {
      if (e - b != 2 || !check_name(tok(b + 1))) {
        if (e - b != 2) error(ErrorCode::SyntaxError, "expected 'model <name>'", detail::span_of(tokens_, b, e));
        return;
      }
      if (model_name_seen_) error(ErrorCode::DuplicateName, "model name given twice", head.span);
      model_name_seen_ = true;
      model_name_ = tok(b + 1).text;
      return;
    }
    if (lone && is_word(b, "params")) return void(section_ = Section::Params);
    if (lone && is_word(b, "vars")) return void(section_ = Section::Vars);
    if (lone && is_word(b, "subject_to")) return void(section_ = Section::Constraints);
    if (is_word(b, "maximize") || is_word(b, "minimize")) return objective(b, e);
    switch (section_) {
      case Section::None:
        error(ErrorCode::SyntaxError, "statement outside of a params, vars or subject_to section", head.span);
        return;
      case Section::Params: return parameter(b, e);
      case Section::Vars: return variables(b, e);
      case Section::Constraints: return constraint(b, e);
    }
  }

  void objective(std::size_t b, std::size_t e) {
    if (objective_) {
      error(ErrorCode::DuplicateName, "second objective", tok(b).span);
      return;
    }
    ParsedObjective obj;
    obj.sense = is_word(b, "maximize") ? ObjectiveSense::Maximize : ObjectiveSense::Minimize;
    obj.span = detail::span_of(tokens_, b, e);
    obj.expr = detail::parse_expression(tokens_, b + 1, e, diags_);
    if (obj.expr) objective_ = std::move(obj);
  }

  std::optional<double> signed_number(std::size_t& i, std::size_t e, bool allow_inf) {
    double sign = 1.0;
    if (i < e && (tok(i).kind == Tok::Minus || tok(i).kind == Tok::Plus)) {
      if (tok(i).kind == Tok::Minus) sign = -1.0;
      ++i;
    }
    if (i < e && tok(i).kind == Tok::Number) return sign * tok(i++).number;
    if (allow_inf && i < e && is_word(i, "inf")) {
      ++i;
      return sign * kInfinity;
    }
    error(ErrorCode::SyntaxError, allow_inf ? "expected a number or 'inf'" : "expected a number",
          i < tokens_.size() ? tok(i).span : SourceSpan{});
    return std::nullopt;
  }

  void parameter(std::size_t b, std::size_t e) {
    if (!check_name(tok(b))) return;
    if (b + 1 >= e || tok(b + 1).kind != Tok::Assign) {
      error(ErrorCode::SyntaxError, "expected '<name> = <number>'", detail::span_of(tokens_, b, e));
      return;
    }
    std::size_t i = b + 2;
    auto value = signed_number(i, e, false);
    if (!value) return;
    if (i != e) {
      error(ErrorCode::SyntaxError, "unexpected " + std::string(detail::describe(tok(i).kind)), tok(i).span);
      return;
    }
    params_.push_back({{tok(b).text, *value}, tok(b).span});
  }

  void variables(std::size_t b, std::size_t e) {
    std::vector<std::size_t> names;
    std::size_t i = b;
    while (true) {
      if (i >= e || !check_name(tok(i))) {
        if (i >= e) error(ErrorCode::SyntaxError, "expected a variable name", tok(i).span);
        return;
      }
      names.push_back(i++);
      if (i < e && tok(i).kind == Tok::Comma) {
        ++i;
        continue;
      }
      break;
    }
    Variable proto;
    while (i < e) {
      const Token& t = tok(i);
      if (t.kind == Tok::Ge || t.kind == Tok::Le) {
        ++i;
        auto v = signed_number(i, e, true);
        if (!v) return;
        (t.kind == Tok::Ge ? proto.lower : proto.upper) = *v;
      } else if (is_word(i, "in")) {
        ++i;
        if (i >= e || tok(i).kind != Tok::LBracket) {
          error(ErrorCode::SyntaxError, "expected '[' after 'in'", tok(i).span);
          return;
        }
        ++i;
        auto lo = signed_number(i, e, true);
        if (!lo) return;
        if (i >= e || tok(i).kind != Tok::Comma) {
          error(ErrorCode::SyntaxError, "expected ','", tok(i).span);
          return;
        }
        ++i;
        auto hi = signed_number(i, e, true);
        if (!hi) return;
        if (i >= e || tok(i).kind != Tok::RBracket) {
          error(ErrorCode::SyntaxError, "expected ']'", tok(i).span);
          return;
        }
        ++i;
        proto.lower = *lo;
        proto.upper = *hi;
      } else if (is_word(i, "free")) {
        ++i;
        proto.lower = -kInfinity;
        proto.upper = kInfinity;
      } else if (is_word(i, "int") || is_word(i, "integer")) {
        ++i;
        proto.domain = Domain::Integer;
      } else if (is_word(i, "binary")) {
        ++i;
        proto.domain = Domain::Integer;
        proto.lower = 0.0;
        proto.upper = 1.0;
      } else if (is_word(i, "continuous")) {
        ++i;
        proto.domain = Domain::Continuous;
      } else {
        error(ErrorCode::SyntaxError,
              "unexpected " + std::string(detail::describe(t.kind)) + (t.text.empty() ? "" : " '" + t.text + "'") +
                  " in variable declaration",
              t.span);
        return;
      }
    }
    for (std::size_t n : names) {
      ParsedVar pv{proto, tok(n).span};
      pv.var.name = tok(n).text;
      if (pv.var.lower == kInfinity || pv.var.upper == -kInfinity || pv.var.lower > pv.var.upper) {
        error(ErrorCode::SyntaxError, "inconsistent bounds for variable '" + pv.var.name + "'", pv.span);
        return;
      }
      vars_.push_back(std::move(pv));
    }
  }

  void constraint(std::size_t b, std::size_t e) {
    ParsedConstraint pc;
    pc.span = detail::span_of(tokens_, b, e);
    std::size_t i = b;
    if (e - b >= 2 && tok(b).kind == Tok::Ident && tok(b + 1).kind == Tok::Colon) {
      if (!check_name(tok(b))) return;
      pc.name = tok(b).text;
      pc.named = true;
      pc.name_span = tok(b).span;
      i = b + 2;
    }
    std::optional<std::size_t> sense_at;
    for (std::size_t k = i; k < e; ++k) {
      const Tok kind = tok(k).kind;
      if (kind == Tok::Le || kind == Tok::Ge || kind == Tok::EqEq) {
        if (sense_at) {
          error(ErrorCode::SyntaxError, "more than one comparison in constraint", tok(k).span);
          return;
        }
        sense_at = k;
      } else if (kind == Tok::Assign || kind == Tok::Lt || kind == Tok::Gt) {
        error(ErrorCode::SyntaxError, "expected '<=', '>=' or '==' instead of '" + tok(k).text + "'", tok(k).span);
        return;
      }
    }
    if (!sense_at) {
      error(ErrorCode::SyntaxError, "constraint needs '<=', '>=' or '=='", pc.span);
      return;
    }
    const Tok kind = tok(*sense_at).kind;
    pc.sense = kind == Tok::Le ? Sense::Le : (kind == Tok::Ge ? Sense::Ge : Sense::Eq);
    pc.lhs = detail::parse_expression(tokens_, i, *sense_at, diags_);
    if (!pc.lhs) return;
    pc.rhs = detail::parse_expression(tokens_, *sense_at + 1, e, diags_);
    if (!pc.rhs) return;
    if (!pc.named) pc.name_span = pc.span;
    constraints_.push_back(std::move(pc));
  }

  void build(ParseResult& result) {
    std::map<std::string, SymbolKind> symbols;
    ModelDocument doc;
    doc.source = std::string(text_);
    LpModel& model = doc.model;
    model.name = model_name_seen_ ? model_name_ : "model";
    for (const auto& p : params_) {
      if (!symbols.emplace(p.param.name, SymbolKind::Parameter).second) {
        error(ErrorCode::DuplicateName, "duplicate parameter '" + p.param.name + "'", p.span);
        continue;
      }
      model.parameters.push_back(p.param);
    }
    for (const auto& v : vars_) {
      auto [it, inserted] = symbols.emplace(v.var.name, SymbolKind::Variable);
      if (!inserted) {
        error(ErrorCode::DuplicateName,
              "'" + v.var.name + "' is already declared" +
                  (it->second == SymbolKind::Parameter ? " as a parameter" : ""),
              v.span);
        continue;
      }
      model.variables.push_back(v.var);
      doc.variable_spans[v.var.name] = v.span;
    }
    AffineBuilder builder(symbols, diags_);
    if (objective_) {
      model.objective.sense = objective_->sense;
      if (auto a = builder.eval(*objective_->expr)) {
        if (!check_finite(*a, objective_->span)) return;
        for (auto& [var, coef] : a->terms) model.objective.expr.add(var, coef);
        model.objective.expr.constant = a->constant;
      }
      doc.objective_span = objective_->span;
    }
    std::set<std::string> explicit_names;
    for (const auto& pc : constraints_)
      if (pc.named) explicit_names.insert(pc.name);
    std::set<std::string> row_names;
    std::size_t index = 0;
    for (const auto& pc : constraints_) {
      ++index;
      std::string name = pc.named ? pc.name : "c" + std::to_string(index);
      if (!row_names.insert(name).second) {
        error(ErrorCode::DuplicateName, "duplicate constraint name '" + name + "'", pc.name_span);
        continue;
      }
      if (!pc.named && explicit_names.count(name)) {
        error(ErrorCode::DuplicateName, "implicit constraint name '" + name + "' collides with a named constraint",
              pc.span);
        continue;
      }
      auto lhs = builder.eval(*pc.lhs);
      auto rhs = builder.eval(*pc.rhs);
      if (!lhs || !rhs) continue;
      rhs->scale(-1.0);
      *lhs += *rhs;
      if (!check_finite(*lhs, pc.span)) continue;
      Constraint c;
      c.name = name;
      c.sense = pc.sense;
      for (auto& [var, coef] : lhs->terms) c.lhs.add(var, coef);
      c.rhs = -lhs->constant;
      model.constraints.push_back(std::move(c));
      doc.constraint_spans[name] = pc.span;
    }
    if (!diags_.empty()) return;
    try {
      model = normalize(model);
    } catch (const Error& err) {
      error(err.code(), err.what(), SourceSpan{});
      return;
    }
    result.document = std::move(doc);
  }

  bool check_finite(const Affine& a, const SourceSpan& span) {
    bool ok = finite_scalar(a.constant);
    for (const auto& t : a.terms) ok = ok && finite_scalar(t.second);
    if (!ok) error(ErrorCode::SyntaxError, "expression overflows to a non-finite value", span);
    return ok;
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::vector<Diagnostic> diags_;
  Section section_ = Section::None;
  std::string model_name_;
  bool model_name_seen_ = false;
  std::vector<ParsedParam> params_;
  std::vector<ParsedVar> vars_;
  std::vector<ParsedConstraint> constraints_;
  std::optional<ParsedObjective> objective_;
};

// Splits a Scalar into sign and magnitude text for use as a coefficient of
// `suffix` (a variable name, or empty for a bare constant).
std::pair<bool, std::string> signed_coefficient(const Scalar& s, const std::string& suffix) {
  const auto with_suffix = [&](std::string body) {
    if (suffix.empty()) return body;
    return body.empty() ? suffix : body + " " + suffix;
  };
  if (s.is_constant()) {
    const double c = s.constant();
    const double mag = std::fabs(c);
    if (mag == 1.0 && !suffix.empty()) return {c < 0, suffix};
    return {c < 0, with_suffix(format_number(mag))};
  }
  if (s.constant() == 0.0 && s.parameters().size() == 1) {
    const auto& [name, scale] = s.parameters().front();
    const double mag = std::fabs(scale);
    std::string body = mag == 1.0 ? name : format_number(mag) + " " + name;
    return {scale < 0, with_suffix(body)};
  }
  std::string inner;
  bool first = true;
  for (const auto& [name, scale] : s.parameters()) {
    auto [neg, body] = signed_coefficient(Scalar::parameter(name, scale), "");
    inner += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    inner += body;
    first = false;
  }
  if (s.constant() != 0.0) {
    inner += s.constant() < 0 ? " - " : " + ";
    inner += format_number(std::fabs(s.constant()));
  }
  if (suffix.empty()) return {false, inner};
  return {false, "(" + inner + ") " + suffix};
}

std::string format_sum(const std::vector<std::pair<Scalar, std::string>>& parts) {
  std::string out;
  bool first = true;
  for (const auto& [coef, suffix] : parts) {
    if (coef.is_zero()) continue;
    auto [neg, body] = signed_coefficient(coef, suffix);
    if (first)
      out += neg ? "-" + body : body;
    else
      out += (neg ? " - " : " + ") + body;
    first = false;
  }
  return first ? "0" : out;
}

std::string format_expr_with_constant(const LinearExpr& expr) {
  std::vector<std::pair<Scalar, std::string>> parts;
  for (const auto& t : expr.terms) parts.emplace_back(t.coefficient, t.variable);
  // Parameter terms of a constant print before its numeric part.
  for (const auto& [name, scale] : expr.constant.parameters()) parts.emplace_back(Scalar::parameter(name, scale), "");
  parts.emplace_back(Scalar(expr.constant.constant()), "");
  return format_sum(parts);
}

std::string format_scalar(const Scalar& s) {
  LinearExpr e;
  e.constant = s;
  return format_expr_with_constant(e);
}

std::string format_bounds(const Variable& v) {
  const bool lo = std::isfinite(v.lower);
  const bool hi = std::isfinite(v.upper);
  if (v.domain == Domain::Integer && v.lower == 0.0 && v.upper == 1.0) return "binary";
  std::string out;
  if (lo && hi)
    out = "in [" + format_number(v.lower) + ", " + format_number(v.upper) + "]";
  else if (lo)
    out = ">= " + format_number(v.lower);
  else if (hi)
    out = ">= -inf <= " + format_number(v.upper);
  else
    out = "free";
  if (v.domain == Domain::Integer) out += " int";
  return out;
}

}  // namespace

ParseResult parse_model(std::string_view text) { return ModelParser(text).run(); }

LpModel parse_model_or_throw(std::string_view text) {
  ParseResult r = parse_model(text);
  if (!r.ok()) {
    const Diagnostic& d = r.diagnostics.front();
    throw Error(d.code, d.message, std::to_string(d.span.line) + ":" + std::to_string(d.span.column));
  }
  return std::move(r.document->model);
}

std::string serialize_model(const LpModel& model) {
  // The parser supplies "model" when the header is absent.
  std::string out = model.name == "model" ? "" : "model " + model.name + "\n";
  if (!model.parameters.empty()) {
    out += "params\n";
    for (const auto& p : model.parameters) out += "  " + p.name + " = " + format_number(p.value) + "\n";
  }
  out += "vars\n";
  for (const auto& v : model.variables) out += "  " + v.name + " " + format_bounds(v) + "\n";
  out += std::string(to_string(model.objective.sense)) + " " + format_expr_with_constant(model.objective.expr) + "\n";
  out += "subject_to\n";
  for (const auto& c : model.constraints) {
    LinearExpr lhs = c.lhs;
    lhs.constant = Scalar();
    out += "  " + c.name + ": " + format_expr_with_constant(lhs) + " " + std::string(to_string(c.sense)) + " " +
           format_scalar(c.rhs - c.lhs.constant) + "\n";
  }
  return out;
}

LinearExpr parse_linear_expr(std::string_view text, const LpModel& model) {
  std::vector<Diagnostic> diags;
  auto tokens = detail::tokenize(text, diags);
  detail::ExprPtr ast;
  if (diags.empty()) ast = detail::parse_expression(tokens, 0, tokens.size() - 1, diags);
  std::optional<Affine> affine;
  if (ast) {
    std::map<std::string, SymbolKind> symbols;
    for (const auto& p : model.parameters) symbols.emplace(p.name, SymbolKind::Parameter);
    for (const auto& v : model.variables) symbols[v.name] = SymbolKind::Variable;
    affine = AffineBuilder(symbols, diags).eval(*ast);
  }
  if (!diags.empty() || !affine) {
    const Diagnostic d = diags.empty() ? Diagnostic{} : diags.front();
    throw Error(d.code, "in expression '" + std::string(text) + "': " + d.message,
                std::to_string(d.span.line) + ":" + std::to_string(d.span.column));
  }
  LinearExpr out;
  for (auto& [var, coef] : affine->terms)
    if (!coef.is_zero()) out.add(var, coef);
  out.constant = affine->constant;
  return out;
}

std::string format_linear_expr(const LinearExpr& expr) { return format_expr_with_constant(expr); }

}  // namespace optmut
