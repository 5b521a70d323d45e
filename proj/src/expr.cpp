#include "expr.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace optmut::detail {

namespace {

constexpr std::size_t kMaxDepth = 128;

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<Diagnostic>& diagnostics) : text_(text), diagnostics_(diagnostics) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        advance(1);
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (c == '\n' || c == ';') {
        out.push_back(make(Tok::Newline, 1));
      } else if (ident_start(c)) {
        std::size_t n = 1;
        while (pos_ + n < text_.size() && ident_char(text_[pos_ + n])) ++n;
        out.push_back(make(Tok::Ident, n));
      } else if (digit(c) || (c == '.' && pos_ + 1 < text_.size() && digit(text_[pos_ + 1]))) {
        lex_number(out);
      } else {
        lex_punct(out);
      }
    }
    Token end;
    end.kind = Tok::End;
    end.span = {pos_, 0, line_, column_};
    out.push_back(end);
    return out;
  }

 private:
  Token make(Tok kind, std::size_t n) {
    Token t;
    t.kind = kind;
    t.text = std::string(text_.substr(pos_, n));
    t.span = {pos_, n, line_, column_};
    advance(n);
    return t;
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  void lex_number(std::vector<Token>& out) {
    std::size_t n = 0;
    while (pos_ + n < text_.size() && digit(text_[pos_ + n])) ++n;
    if (pos_ + n < text_.size() && text_[pos_ + n] == '.') {
      ++n;
      while (pos_ + n < text_.size() && digit(text_[pos_ + n])) ++n;
    }
    if (pos_ + n < text_.size() && (text_[pos_ + n] == 'e' || text_[pos_ + n] == 'E')) {
      std::size_t m = n + 1;
      if (pos_ + m < text_.size() && (text_[pos_ + m] == '+' || text_[pos_ + m] == '-')) ++m;
      if (pos_ + m < text_.size() && digit(text_[pos_ + m])) {
        while (pos_ + m < text_.size() && digit(text_[pos_ + m])) ++m;
        n = m;
      }
    }
    Token t = make(Tok::Number, n);
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, t.number);
    if (ec != std::errc() || ptr != last || !std::isfinite(t.number)) {
      diagnostics_.push_back({ErrorCode::SyntaxError, "number '" + t.text + "' is out of range", t.span});
      t.number = 0.0;
    }
    out.push_back(std::move(t));
  }

  void lex_punct(std::vector<Token>& out) {
    const char c = text_[pos_];
    const char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    switch (c) {
      case '+': out.push_back(make(Tok::Plus, 1)); return;
      case '-': out.push_back(make(Tok::Minus, 1)); return;
      case '*': out.push_back(make(Tok::Star, 1)); return;
      case '/': out.push_back(make(Tok::Slash, 1)); return;
      case '(': out.push_back(make(Tok::LParen, 1)); return;
      case ')': out.push_back(make(Tok::RParen, 1)); return;
      case '[': out.push_back(make(Tok::LBracket, 1)); return;
      case ']': out.push_back(make(Tok::RBracket, 1)); return;
      case ',': out.push_back(make(Tok::Comma, 1)); return;
      case ':': out.push_back(make(Tok::Colon, 1)); return;
      case '<': out.push_back(next == '=' ? make(Tok::Le, 2) : make(Tok::Lt, 1)); return;
      case '>': out.push_back(next == '=' ? make(Tok::Ge, 2) : make(Tok::Gt, 1)); return;
      case '=': out.push_back(next == '=' ? make(Tok::EqEq, 2) : make(Tok::Assign, 1)); return;
      default: break;
    }
    const auto uc = static_cast<unsigned char>(c);
    std::string shown = (uc >= 0x20 && uc < 0x7f) ? std::string(1, c) : "\\x" + hex(uc);
    diagnostics_.push_back({ErrorCode::SyntaxError, "unexpected character '" + shown + "'", {pos_, 1, line_, column_}});
    advance(1);
  }

  static std::string hex(unsigned char c) {
    static constexpr char digits[] = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 0xf]};
  }

  std::string_view text_;
  std::vector<Diagnostic>& diagnostics_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::size_t begin, std::size_t end, std::vector<Diagnostic>& diagnostics)
      : tokens_(tokens), pos_(begin), end_(end), diagnostics_(diagnostics) {}

  ExprPtr run() {
    if (pos_ >= end_) {
      error("expected an expression", here());
      return nullptr;
    }
    ExprPtr e = expression(0);
    if (!e) return nullptr;
    if (pos_ < end_) {
      error("unexpected " + std::string(describe(tokens_[pos_].kind)) + " '" + tokens_[pos_].text + "'",
            tokens_[pos_].span);
      return nullptr;
    }
    return e;
  }

 private:
  bool at(Tok kind) const { return pos_ < end_ && tokens_[pos_].kind == kind; }

  SourceSpan here() const {
    if (pos_ < tokens_.size()) return tokens_[pos_].span;
    return {};
  }

  void error(std::string message, SourceSpan span) {
    if (!failed_) diagnostics_.push_back({ErrorCode::SyntaxError, std::move(message), span});
    failed_ = true;
  }

  ExprPtr binary(ExprNode::Kind kind, ExprPtr lhs, ExprPtr rhs) {
    auto node = std::make_unique<ExprNode>();
    node->kind = kind;
    node->span = lhs->span;
    const std::size_t stop = rhs->span.offset + rhs->span.length;
    node->span.length = stop > node->span.offset ? stop - node->span.offset : node->span.length;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  ExprPtr expression(std::size_t depth) {
    ExprPtr lhs = term(depth);
    while (lhs && (at(Tok::Plus) || at(Tok::Minus))) {
      const auto kind = at(Tok::Plus) ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
      ++pos_;
      ExprPtr rhs = term(depth);
      if (!rhs) return nullptr;
      lhs = binary(kind, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  bool starts_factor() const { return at(Tok::Number) || at(Tok::Ident) || at(Tok::LParen); }

  ExprPtr term(std::size_t depth) {
    ExprPtr lhs = unary(depth);
    while (lhs) {
      ExprNode::Kind kind;
      if (at(Tok::Star)) {
        kind = ExprNode::Kind::Mul;
        ++pos_;
      } else if (at(Tok::Slash)) {
        kind = ExprNode::Kind::Div;
        ++pos_;
      } else if (starts_factor()) {
        kind = ExprNode::Kind::Mul;
      } else {
        break;
      }
      ExprPtr rhs = unary(depth);
      if (!rhs) return nullptr;
      lhs = binary(kind, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr unary(std::size_t depth) {
    if (depth > kMaxDepth) {
      error("expression nested too deeply", here());
      return nullptr;
    }
    if (at(Tok::Minus) || at(Tok::Plus)) {
      const bool negate = at(Tok::Minus);
      const SourceSpan start = tokens_[pos_].span;
      ++pos_;
      ExprPtr inner = unary(depth + 1);
      if (!inner) return nullptr;
      if (!negate) return inner;
      auto node = std::make_unique<ExprNode>();
      node->kind = ExprNode::Kind::Neg;
      node->span = start;
      node->span.length = inner->span.offset + inner->span.length - start.offset;
      node->lhs = std::move(inner);
      return node;
    }
    return primary(depth);
  }

  ExprPtr primary(std::size_t depth) {
    if (pos_ >= end_) {
      error("expected a number, name or '('", here());
      return nullptr;
    }
    const Token& t = tokens_[pos_];
    if (t.kind == Tok::Number) {
      ++pos_;
      auto node = std::make_unique<ExprNode>();
      node->kind = ExprNode::Kind::Number;
      node->value = t.number;
      node->span = t.span;
      return node;
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      auto node = std::make_unique<ExprNode>();
      node->kind = ExprNode::Kind::Symbol;
      node->name = t.text;
      node->span = t.span;
      return node;
    }
    if (t.kind == Tok::LParen) {
      const SourceSpan open = t.span;
      ++pos_;
      ExprPtr inner = expression(depth + 1);
      if (!inner) return nullptr;
      if (!at(Tok::RParen)) {
        error("expected ')' to close '(' at " + std::to_string(open.line) + ":" + std::to_string(open.column),
              here());
        return nullptr;
      }
      ++pos_;
      return inner;
    }
    error("unexpected " + std::string(describe(t.kind)) + (t.text.empty() ? "" : " '" + t.text + "'"), t.span);
    return nullptr;
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_;
  std::size_t end_;
  std::vector<Diagnostic>& diagnostics_;
  bool failed_ = false;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diagnostics) {
  return Lexer(text, diagnostics).run();
}

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "name";
    case Tok::Number: return "number";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Assign: return "'='";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Newline: return "end of statement";
    case Tok::End: return "end of input";
  }
  return "token";
}

ExprPtr parse_expression(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
                         std::vector<Diagnostic>& diagnostics) {
  return Parser(tokens, begin, end, diagnostics).run();
}

SourceSpan span_of(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  if (begin >= end || begin >= tokens.size()) return begin < tokens.size() ? tokens[begin].span : SourceSpan{};
  SourceSpan span = tokens[begin].span;
  const SourceSpan& last = tokens[end - 1].span;
  span.length = last.offset + last.length - span.offset;
  return span;
}

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 14> keywords = {
      "model", "params", "vars", "maximize", "minimize", "subject_to", "int",
      "integer", "binary", "continuous", "free", "in", "inf", "objective"};
  for (auto k : keywords)
    if (k == word) return true;
  return false;
}

bool is_identifier(std::string_view word) {
  if (word.empty() || !ident_start(word.front())) return false;
  for (char c : word)
    if (!ident_char(c)) return false;
  return !is_keyword(word);
}

}  // namespace optmut::detail
