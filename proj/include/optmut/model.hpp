#pragma once

// Symbolic LP/MILP representation and the equivalence-preserving transforms
// defined over it (normalization, dual construction, objective scaling,
// parameter instantiation). Every transform takes its input by const
// reference and returns a fresh model.

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace optmut {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using ParameterValues = std::map<std::string, double>;

// A real number that is affine in the model parameters:
//   constant + sum_k scale_k * param_k
// Coefficients and right-hand sides are Scalars so that scenario overrides
// survive folding, transposition and mutation.
class Scalar {
 public:
  Scalar() = default;
  Scalar(double constant) : constant_(constant) {}  // NOLINT(implicit)

  static Scalar parameter(const std::string& name, double scale = 1.0);

  double constant() const { return constant_; }
  // Sorted by parameter name, no zero scales.
  const std::vector<std::pair<std::string, double>>& parameters() const { return params_; }

  bool is_constant() const { return params_.empty(); }
  bool is_zero() const { return params_.empty() && constant_ == 0.0; }

  // Throws Error(UnknownParameter) if a referenced parameter is missing.
  double evaluate(const ParameterValues& values) const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& other);
  Scalar& operator-=(const Scalar& other);
  Scalar& operator*=(double factor);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, double f) { return a *= f; }
  friend Scalar operator*(double f, Scalar a) { return a *= f; }

  bool operator==(const Scalar&) const = default;

 private:
  void add_parameter(const std::string& name, double scale);

  double constant_ = 0.0;
  std::vector<std::pair<std::string, double>> params_;
};

enum class Domain { Continuous, Integer };
enum class Sense { Le, Ge, Eq };
enum class ObjectiveSense { Minimize, Maximize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  Domain domain = Domain::Continuous;

  bool operator==(const Variable&) const = default;
};

struct Term {
  std::string variable;
  Scalar coefficient;

  bool operator==(const Term&) const = default;
};

// Terms keep first-appearance order; add() merges repeated variables.
struct LinearExpr {
  std::vector<Term> terms;
  Scalar constant;

  void add(const std::string& variable, const Scalar& coefficient);
  // Coefficient of `variable`, zero when absent.
  Scalar coefficient(const std::string& variable) const;
  bool has_term(const std::string& variable) const;

  bool operator==(const LinearExpr&) const = default;
};

struct Constraint {
  std::string name;
  LinearExpr lhs;
  Sense sense = Sense::Le;
  Scalar rhs;

  bool operator==(const Constraint&) const = default;
};

struct Objective {
  ObjectiveSense sense = ObjectiveSense::Minimize;
  LinearExpr expr;

  bool operator==(const Objective&) const = default;
};

struct Parameter {
  std::string name;
  double value = 0.0;

  bool operator==(const Parameter&) const = default;
};

struct LpModel {
  std::string name = "model";
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  Objective objective;
  std::vector<Parameter> parameters;

  const Variable* find_variable(const std::string& name) const;
  const Constraint* find_constraint(const std::string& name) const;
  const Parameter* find_parameter(const std::string& name) const;
  std::optional<std::size_t> variable_index(const std::string& name) const;

  ParameterValues parameter_values() const;
  bool has_integer_variables() const;

  bool operator==(const LpModel&) const = default;
};

std::string_view to_string(Sense sense);
std::string_view to_string(Domain domain);
std::string_view to_string(ObjectiveSense sense);

// Checks every LpModel invariant: unique non-empty names, consistent bounds,
// finite coefficients, and that all referenced variables and parameters exist.
void validate(const LpModel& model);

// Folds lhs constants into the rhs, merges repeated terms and drops explicit
// zero terms. Declaration order is preserved; the operation is idempotent.
LpModel normalize(const LpModel& model);

// max c'x, Ax <= b, x >= 0  ->  min b'u, A'u >= c, u >= 0.
// Dual variables are named u_<constraint>, dual rows after primal variables.
LpModel dualize(const LpModel& model);

LpModel scale_objective(const LpModel& model, double factor);

// Resolves every parameter reference, using `overrides` where given and the
// model's defaults elsewhere. The returned model keeps the parameter list with
// the effective values but contains only constant Scalars.
LpModel instantiate(const LpModel& model, const ParameterValues& overrides = {});

}  // namespace optmut
