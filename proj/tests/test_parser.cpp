#include <gtest/gtest.h>

#include <random>

#include "optmut/error.hpp"
#include "optmut/model_text.hpp"
#include "support.hpp"

using namespace optmut;

TEST(Parser, ReadsTwoVariableModel) {
  const ParseResult r = parse_model("vars\n  x, y\nmaximize 120 x + 90 y\nsubject_to\n  x + y <= 8\n  2 x + y <= 10\n");
  ASSERT_TRUE(r.ok()) << r.diagnostics.front().to_string();
  const LpModel& m = r.document->model;
  EXPECT_EQ(m.variables.size(), 2u);
  EXPECT_EQ(m.constraints.size(), 2u);
  EXPECT_EQ(m.variables[0].lower, 0.0);
  EXPECT_EQ(m.variables[0].upper, kInfinity);
  EXPECT_EQ(m.constraints[1].lhs.coefficient("x"), Scalar(2.0));
  EXPECT_EQ(m.objective.sense, ObjectiveSense::Maximize);
}

TEST(Parser, EmptyConstraintSection) {
  const ParseResult r = parse_model("vars\n  x <= 4\nmaximize x\nsubject_to\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.document->model.constraints.empty());
}

TEST(Parser, UndeclaredSymbolHasSpan) {
  const ParseResult r = parse_model("vars\n  x\nmaximize x\nsubject_to\n  c: x + z <= 1\n");
  ASSERT_FALSE(r.ok());
  const Diagnostic& d = r.diagnostics.front();
  EXPECT_EQ(d.code, ErrorCode::UnknownSymbol);
  EXPECT_EQ(d.span.line, 5);
  EXPECT_EQ(d.span.column, 10);
  EXPECT_EQ(d.span.length, 1u);
}

TEST(Parser, DuplicateDeclaration) {
  const ParseResult r = parse_model("vars\n  x\n  x\nmaximize x\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics.front().code, ErrorCode::DuplicateName);
  EXPECT_EQ(r.diagnostics.front().span.line, 3);
}

TEST(Parser, BoundsDomainsAndParameters) {
  const ParseResult r = parse_model(R"(model m
params
  cap = 4.5
vars
  a in [1, 3] int
  b free
  c binary
  d >= -2 <= 7
minimize a - b + cap c
subject_to
  r1: a + b + c + d >= cap - 1
  r2: 2 (a + b) == 3
)");
  ASSERT_TRUE(r.ok()) << r.diagnostics.front().to_string();
  const LpModel& m = r.document->model;
  EXPECT_EQ(m.variables[0].domain, Domain::Integer);
  EXPECT_EQ(m.variables[0].lower, 1.0);
  EXPECT_EQ(m.variables[0].upper, 3.0);
  EXPECT_EQ(m.variables[1].lower, -kInfinity);
  EXPECT_EQ(m.variables[2].upper, 1.0);
  EXPECT_EQ(m.variables[2].domain, Domain::Integer);
  EXPECT_EQ(m.variables[3].lower, -2.0);
  EXPECT_EQ(m.objective.expr.coefficient("c"), Scalar::parameter("cap"));
  EXPECT_EQ(m.constraints[0].rhs, Scalar::parameter("cap") + Scalar(-1.0));
  EXPECT_EQ(m.constraints[1].lhs.coefficient("b"), Scalar(2.0));
  EXPECT_EQ(m.constraints[1].sense, Sense::Eq);
  EXPECT_TRUE(r.document->constraint_spans.count("r2"));
  EXPECT_EQ(r.document->constraint_spans.at("r2").line, 12);
}

TEST(Parser, RejectsProductsOfVariables) {
  const ParseResult r = parse_model("vars\n  x, y\nmaximize x y\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics.front().span.line, 3);
}

TEST(Parser, SyntaxErrorsArePositioned) {
  const ParseResult r = parse_model("vars\n  x\nmaximize 3 x +\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics.front().code, ErrorCode::SyntaxError);
  EXPECT_EQ(r.diagnostics.front().span.line, 3);
  EXPECT_NE(r.diagnostics.front().to_string().find("3:"), std::string::npos);
}

TEST(Serialize, RoundTripsFactoryModel) {
  const LpModel m = parse_model_or_throw(testing_support::kFactory);
  const std::string text = serialize_model(m);
  EXPECT_EQ(parse_model_or_throw(text), normalize(m));
  EXPECT_EQ(serialize_model(parse_model_or_throw(text)), text);
}

TEST(Serialize, RoundTripsEveryFixtureModel) {
  for (const char* rel : {"factory/model.optmod", "external/gearbox/model.optmod", "external/flipped/model.optmod",
                          "external/crates_relaxed/model.optmod", "external/unbindable/model.optmod"}) {
    const LpModel m = testing_support::load_model(rel);
    EXPECT_EQ(parse_model_or_throw(serialize_model(m)), m) << rel;
  }
}

TEST(Serialize, ShortestNumbers) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(780.0), "780");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  EXPECT_EQ(format_number(1e-7), "1e-07");
  const LpModel m = parse_model_or_throw("vars\n  x\nmaximize 0.1 x\nsubject_to\n  c: x <= 1\n");
  EXPECT_NE(serialize_model(m).find("0.1 x"), std::string::npos);
  EXPECT_EQ(serialize_model(m).find("0.10000000000000001"), std::string::npos);
}

TEST(Serialize, InfiniteAndIntegerBounds) {
  const LpModel m = parse_model_or_throw("vars\n  a free\n  b in [2, 5] int\nminimize a + b\nsubject_to\n  c: a >= -3\n");
  EXPECT_EQ(parse_model_or_throw(serialize_model(m)), m);
}

TEST(LinearExprText, ParsesBindingExpressions) {
  const LpModel m = parse_model_or_throw(testing_support::kFactory);
  const LinearExpr e = parse_linear_expr("2 x + y - 1", m);
  EXPECT_EQ(e.coefficient("x"), Scalar(2.0));
  EXPECT_EQ(e.constant, Scalar(-1.0));
  EXPECT_EQ(format_linear_expr(e), "2 x + y - 1");
  EXPECT_THROW(parse_linear_expr("q", m), Error);
}

TEST(ParserFuzz, RandomBytesNeverThrow) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "vars params subject_to maximize minimize model int free in [],:=<>+-*/()0123456789.eE \n\tabcxyz_";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const std::size_t len = rng() % 200;
    for (std::size_t k = 0; k < len; ++k)
      text += (rng() % 4 == 0) ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()];
    ParseResult r;
    ASSERT_NO_THROW(r = parse_model(text));
    if (!r.ok()) {
      ASSERT_FALSE(r.diagnostics.empty());
      EXPECT_GE(r.diagnostics.front().span.line, 1);
    }
  }
}
