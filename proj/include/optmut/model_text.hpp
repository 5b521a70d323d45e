#pragma once

// The `.optmod` modeling language: a line-oriented declarative format with
// `model`, `params`, `vars`, `maximize|minimize` and `subject_to` statements.
// See docs/optmod-grammar.md for the grammar.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optmut/error.hpp"
#include "optmut/model.hpp"

namespace optmut {

struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 1;
  int column = 1;

  bool operator==(const SourceSpan&) const = default;
};

struct Diagnostic {
  ErrorCode code = ErrorCode::SyntaxError;
  std::string message;
  SourceSpan span;

  // "line:column: Code: message"
  std::string to_string() const;
};

struct ModelDocument {
  std::string source;
  LpModel model;
  std::map<std::string, SourceSpan> variable_spans;
  std::map<std::string, SourceSpan> constraint_spans;
  std::optional<SourceSpan> objective_span;
};

struct ParseResult {
  std::optional<ModelDocument> document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
};

// Never throws on malformed input; every problem becomes a positioned
// diagnostic. The returned model is normalized.
ParseResult parse_model(std::string_view text);

// Convenience wrapper: throws Error carrying the first diagnostic.
LpModel parse_model_or_throw(std::string_view text);

// Canonical text; declaration order preserved, shortest round-trip numbers.
std::string serialize_model(const LpModel& model);

// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);

// Parses a linear expression over the variables and parameters of `model`,
// as used by interface bindings ("x", "2 x + y", "x - 1").
LinearExpr parse_linear_expr(std::string_view text, const LpModel& model);
std::string format_linear_expr(const LinearExpr& expr);

}  // namespace optmut
