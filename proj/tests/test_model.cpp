#include <gtest/gtest.h>

#include "optmut/error.hpp"
#include "optmut/model.hpp"
#include "optmut/model_text.hpp"
#include "optmut/solver.hpp"
#include "oracle/oracle.hpp"
#include "support.hpp"

using namespace optmut;

namespace {

LpModel two_product() {
  return parse_model_or_throw(R"(model two_product
vars
  x, y
maximize 120 x + 90 y
subject_to
  c1: x + y <= 8
  c2: 2 x + y <= 10
)");
}

LpModel raw(const std::vector<Variable>& vars, const std::vector<Constraint>& rows) {
  LpModel m;
  m.variables = vars;
  m.constraints = rows;
  m.objective.sense = ObjectiveSense::Maximize;
  return m;
}

}  // namespace

TEST(Scalar, AffineArithmeticMergesParameters) {
  Scalar s = Scalar::parameter("cap", 2.0) + 3.0;
  s += Scalar::parameter("cap", -2.0);
  EXPECT_TRUE(s.is_constant());
  EXPECT_EQ(s.constant(), 3.0);

  Scalar t = Scalar::parameter("b") * 4.0 + Scalar::parameter("a");
  ASSERT_EQ(t.parameters().size(), 2u);
  EXPECT_EQ(t.parameters()[0].first, "a");
  EXPECT_DOUBLE_EQ(t.evaluate({{"a", 1.0}, {"b", 2.0}}), 9.0);
  EXPECT_THROW(t.evaluate({{"a", 1.0}}), Error);
}

TEST(Normalize, FoldsConstantsIntoRhs) {
  Constraint c{"row", {}, Sense::Le, 10.0};
  c.lhs.add("x", 1.0);
  c.lhs.add("y", 1.0);
  c.lhs.constant = 2.0;
  const LpModel n = normalize(raw({{"x"}, {"y"}}, {c}));
  EXPECT_EQ(n.constraints[0].rhs, Scalar(8.0));
  EXPECT_TRUE(n.constraints[0].lhs.constant.is_zero());
  EXPECT_EQ(n.constraints[0].lhs.terms.size(), 2u);
}

TEST(Normalize, DropsZeroTerms) {
  Constraint c{"row", {}, Sense::Le, 3.0};
  c.lhs.terms.push_back({"x", 0.0});
  c.lhs.terms.push_back({"y", 1.0});
  const LpModel n = normalize(raw({{"x"}, {"y"}}, {c}));
  ASSERT_EQ(n.constraints[0].lhs.terms.size(), 1u);
  EXPECT_EQ(n.constraints[0].lhs.terms[0].variable, "y");
}

TEST(Normalize, LeavesNormalModelUnchangedAndIsIdempotent) {
  const LpModel m = two_product();
  EXPECT_EQ(normalize(m), m);
  EXPECT_EQ(normalize(normalize(m)), normalize(m));
}

TEST(Normalize, RejectsUnknownVariable) {
  Constraint c{"row", {}, Sense::Le, 3.0};
  c.lhs.add("ghost", 1.0);
  try {
    normalize(raw({{"x"}}, {c}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownVariable);
  }
}

TEST(Validate, RejectsDuplicateNamesAndInvertedBounds) {
  try {
    validate(raw({{"x"}, {"x"}}, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateName);
  }
  Variable v{"x", 5.0, 1.0};
  EXPECT_THROW(validate(raw({v}, {})), Error);
}

TEST(Dualize, ProducesTransposedMinimization) {
  const LpModel d = dualize(two_product());
  EXPECT_EQ(d.objective.sense, ObjectiveSense::Minimize);
  ASSERT_EQ(d.variables.size(), 2u);
  EXPECT_EQ(d.variables[0].name, "u_c1");
  EXPECT_EQ(d.variables[1].name, "u_c2");
  EXPECT_EQ(d.objective.expr.coefficient("u_c1"), Scalar(8.0));
  EXPECT_EQ(d.objective.expr.coefficient("u_c2"), Scalar(10.0));
  ASSERT_EQ(d.constraints.size(), 2u);
  const Constraint& rx = d.constraints[0];
  EXPECT_EQ(rx.sense, Sense::Ge);
  EXPECT_EQ(rx.lhs.coefficient("u_c1"), Scalar(1.0));
  EXPECT_EQ(rx.lhs.coefficient("u_c2"), Scalar(2.0));
  EXPECT_EQ(rx.rhs, Scalar(120.0));
  EXPECT_EQ(d.constraints[1].rhs, Scalar(90.0));
  EXPECT_NE(serialize_model(d).find("8 u_c1 + 10 u_c2"), std::string::npos);
}

TEST(Dualize, OneVariable) {
  const LpModel d = dualize(parse_model_or_throw("vars\n  x\nmaximize x\nsubject_to\n  cap: x <= 5\n"));
  EXPECT_EQ(d.objective.expr.coefficient("u_cap"), Scalar(5.0));
  EXPECT_EQ(d.constraints[0].sense, Sense::Ge);
  EXPECT_EQ(d.constraints[0].rhs, Scalar(1.0));
}

TEST(Dualize, StrongDualityAgainstOracle) {
  const LpModel p = two_product();
  const auto primal = oracle::enumerate_vertices(p);
  const auto dual = oracle::enumerate_vertices(dualize(p));
  ASSERT_EQ(primal.status, SolveStatus::Optimal);
  ASSERT_EQ(dual.status, SolveStatus::Optimal);
  EXPECT_NEAR(primal.objective, 780.0, 1e-9);
  EXPECT_NEAR(dual.objective, 780.0, 1e-9);
}

TEST(Dualize, RejectsNonStandardForms) {
  const char* bad[] = {
      "vars\n  x int\nmaximize x\nsubject_to\n  c: x <= 5\n",
      "vars\n  x\nmaximize x\nsubject_to\n  c: x == 5\n",
      "vars\n  x free\nmaximize x\nsubject_to\n  c: x <= 5\n",
      "vars\n  x <= 3\nmaximize x\nsubject_to\n  c: x <= 5\n",
      "vars\n  x\nminimize x\nsubject_to\n  c: x <= 5\n",
  };
  for (const char* text : bad) {
    try {
      dualize(parse_model_or_throw(text));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotInStandardForm) << text;
    }
  }
}

TEST(ScaleObjective, MultipliesObjectiveOnly) {
  const LpModel s = scale_objective(two_product(), 10.0);
  EXPECT_EQ(s.objective.expr.coefficient("x"), Scalar(1200.0));
  EXPECT_EQ(s.objective.expr.coefficient("y"), Scalar(900.0));
  EXPECT_EQ(s.constraints, two_product().constraints);
  EXPECT_EQ(scale_objective(two_product(), 1.0), two_product());
  const Solution a = solve_lp(two_product()), b = solve_lp(s);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NEAR(*b.objective, 10.0 * *a.objective, 1e-9);
}

TEST(ScaleObjective, RejectsNonPositiveFactor) {
  for (double f : {0.0, -1.0}) {
    try {
      scale_objective(two_product(), f);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NonPositiveFactor);
    }
  }
}

TEST(Instantiate, SubstitutesOverrides) {
  const LpModel m = parse_model_or_throw(testing_support::kFactory);
  const LpModel i = instantiate(m, {{"machine_cap", 9.0}});
  EXPECT_EQ(i.find_constraint("machining")->rhs, Scalar(9.0));
  EXPECT_EQ(i.find_constraint("assembly")->rhs, Scalar(8.0));
  EXPECT_EQ(i.find_parameter("machine_cap")->value, 9.0);
  EXPECT_EQ(instantiate(m), instantiate(m, {}));
}

TEST(Instantiate, MovedOptimumMatchesOracle) {
  const LpModel m = parse_model_or_throw(testing_support::kFactory);
  const LpModel i = instantiate(m, {{"profit_housing", 140.0}, {"profit_bracket", 60.0}});
  const auto ref = oracle::enumerate_vertices(i);
  ASSERT_EQ(ref.status, SolveStatus::Optimal);
  EXPECT_NEAR(ref.objective, 700.0, 1e-9);
  EXPECT_NEAR(ref.x[0], 5.0, 1e-9);
  EXPECT_NEAR(ref.x[1], 0.0, 1e-9);
  const Solution s = solve_lp(i);
  EXPECT_NEAR(*s.objective, 700.0, 1e-9);
  EXPECT_NEAR(s.values[0], 5.0, 1e-9);
}

// Stand-in for a wrong assembly row: x + 2 y <= 5 replaces x + y <= 8. The
// second profit function keeps its optimum, the first one loses it.
TEST(Instantiate, WrongRowOnlyHidesFromOneProfitFunction) {
  LpModel m = parse_model_or_throw(testing_support::kFactory);
  Constraint& row = m.constraints[0];
  row.lhs = parse_linear_expr("x + 2 y", m);
  row.rhs = Scalar(5.0);
  const auto first = oracle::enumerate_vertices(instantiate(m));
  const auto second = oracle::enumerate_vertices(instantiate(m, {{"profit_housing", 140.0}, {"profit_bracket", 60.0}}));
  EXPECT_NEAR(first.objective, 600.0, 1e-9);
  EXPECT_NEAR(second.objective, 700.0, 1e-9);
  EXPECT_NEAR(*solve_lp(instantiate(m)).objective, 600.0, 1e-9);
}

TEST(Instantiate, RejectsUnknownParameter) {
  try {
    instantiate(parse_model_or_throw(testing_support::kFactory), {{"nope", 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownParameter);
  }
}

TEST(Instantiate, CommutesWithNormalize) {
  const LpModel m = parse_model_or_throw(testing_support::kFactory);
  const ParameterValues o{{"assembly_cap", 6.5}};
  EXPECT_EQ(normalize(instantiate(m, o)), instantiate(normalize(m), o));
}
