#pragma once

// Tokenizer and arithmetic-expression AST shared by the .optmod parser, the
// binding expression parser and the KPI evaluator. Internal header.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "optmut/model_text.hpp"

namespace optmut::detail {

enum class Tok {
  Ident,
  Number,
  Plus,
  Minus,
  Star,
  Slash,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Le,
  Ge,
  EqEq,
  Assign,
  Lt,
  Gt,
  Newline,  // also ';'
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

// Lexing errors are appended to `diagnostics`; the offending bytes are skipped.
std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diagnostics);

std::string_view describe(Tok kind);

struct ExprNode {
  enum class Kind { Number, Symbol, Neg, Add, Sub, Mul, Div };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string name;
  SourceSpan span;
  std::unique_ptr<ExprNode> lhs;
  std::unique_ptr<ExprNode> rhs;
};

using ExprPtr = std::unique_ptr<ExprNode>;

// Recursive-descent parser over tokens[begin, end). Juxtaposition means
// multiplication ("2 x", "cap x"). Returns nullptr after reporting a
// diagnostic when the range is not a single well-formed expression.
ExprPtr parse_expression(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
                         std::vector<Diagnostic>& diagnostics);

// Span covering tokens[begin, end).
SourceSpan span_of(const std::vector<Token>& tokens, std::size_t begin, std::size_t end);

bool is_keyword(std::string_view word);

// Lexically an identifier and not a reserved word.
bool is_identifier(std::string_view word);

}  // namespace optmut::detail
