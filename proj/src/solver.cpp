#include "optmut/solver.hpp"

#include <algorithm>
#include <cmath>

#include "optmut/error.hpp"

namespace optmut {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

std::optional<SolveStatus> parse_solve_status(std::string_view text) {
  for (auto s : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded, SolveStatus::IterationLimit})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

double value_of(const LpModel& model, const Solution& solution, const std::string& variable) {
  auto index = model.variable_index(variable);
  if (!index || *index >= solution.values.size())
    throw Error(ErrorCode::UnknownVariable, "no value for variable '" + variable + "'");
  return solution.values[*index];
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kZeroTol = 1e-13;

// Numeric snapshot of a model: parameters resolved, dense rows.
struct NumericLp {
  std::vector<double> lower, upper;
  std::vector<bool> integer;
  std::vector<std::vector<double>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;
  std::vector<double> cost;  // as stated in the model
  bool maximize = false;
  double constant = 0.0;
};

NumericLp numeric(const LpModel& model) {
  const LpModel m = instantiate(normalize(model));
  NumericLp lp;
  const std::size_t n = m.variables.size();
  for (const auto& v : m.variables) {
    lp.lower.push_back(v.lower);
    lp.upper.push_back(v.upper);
    lp.integer.push_back(v.domain == Domain::Integer);
  }
  lp.cost.assign(n, 0.0);
  for (const auto& t : m.objective.expr.terms) lp.cost[*m.variable_index(t.variable)] += t.coefficient.constant();
  lp.constant = m.objective.expr.constant.constant();
  lp.maximize = m.objective.sense == ObjectiveSense::Maximize;
  for (const auto& c : m.constraints) {
    std::vector<double> row(n, 0.0);
    for (const auto& t : c.lhs.terms) row[*m.variable_index(t.variable)] += t.coefficient.constant();
    lp.rows.push_back(std::move(row));
    lp.senses.push_back(c.sense);
    lp.rhs.push_back(c.rhs.constant());
  }
  return lp;
}

struct LpOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;  // in the model's own sense, including constant
  std::size_t pivots = 0;
};

class Tableau {
 public:
  Tableau(const NumericLp& lp, const std::vector<double>& lower, const std::vector<double>& upper,
          const SolverConfig& cfg)
      : lp_(lp), lower_(lower), upper_(upper), cfg_(cfg) {}

  LpOutcome solve() {
    LpOutcome out;
    const std::size_t n = lp_.cost.size();
    for (std::size_t j = 0; j < n; ++j) {
      if (lower_[j] > upper_[j] + cfg_.feas_tol) return out;
    }
    build();
    const std::size_t total = width_;

    // Phase 1: minimize the sum of artificial variables.
    std::vector<double> phase1(total, 0.0);
    for (std::size_t j = first_artificial_; j < total; ++j) phase1[j] = 1.0;
    reduced_costs(phase1);
    SolveStatus s = iterate(total, 1.0);
    if (s == SolveStatus::IterationLimit) return limit(out);
    if (-d_[total] > cfg_.feas_tol) {
      out.pivots = pivots_;
      return out;
    }
    drive_out_artificials();

    std::vector<double> phase2(total, 0.0);
    double scale = 1.0;
    for (std::size_t j = 0; j < first_slack_; ++j) {
      phase2[j] = column_cost_[j];
      scale = std::max(scale, std::fabs(column_cost_[j]));
    }
    reduced_costs(phase2);
    s = iterate(first_artificial_, scale);
    out.pivots = pivots_;
    if (s != SolveStatus::Optimal) {
      out.status = s;
      return out;
    }
    out.status = SolveStatus::Optimal;
    out.x = primal_values();
    out.objective = lp_.constant;
    for (std::size_t j = 0; j < n; ++j) out.objective += lp_.cost[j] * out.x[j];
    return out;
  }

 private:
  enum class Map { Shift, Reflect, Split };

  LpOutcome& limit(LpOutcome& out) {
    out.status = SolveStatus::IterationLimit;
    out.pivots = pivots_;
    return out;
  }

  void build() {
    const std::size_t n = lp_.cost.size();
    const double sign = lp_.maximize ? -1.0 : 1.0;
    // Structural columns.
    for (std::size_t j = 0; j < n; ++j) {
      const bool lo = std::isfinite(lower_[j]);
      const bool hi = std::isfinite(upper_[j]);
      maps_.push_back(lo ? Map::Shift : (hi ? Map::Reflect : Map::Split));
      columns_.push_back(column_cost_.size());
      if (maps_.back() == Map::Split) {
        column_cost_.push_back(sign * lp_.cost[j]);
        column_cost_.push_back(-sign * lp_.cost[j]);
      } else {
        column_cost_.push_back(maps_.back() == Map::Shift ? sign * lp_.cost[j] : -sign * lp_.cost[j]);
      }
    }
    first_slack_ = column_cost_.size();

    struct Row {
      std::vector<double> a;
      Sense sense;
      double b;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < lp_.rows.size(); ++i) {
      Row r{std::vector<double>(first_slack_, 0.0), lp_.senses[i], lp_.rhs[i]};
      for (std::size_t j = 0; j < n; ++j) {
        const double a = lp_.rows[i][j];
        if (a == 0.0) continue;
        const std::size_t c = columns_[j];
        switch (maps_[j]) {
          case Map::Shift:
            r.a[c] += a;
            r.b -= a * lower_[j];
            break;
          case Map::Reflect:
            r.a[c] -= a;
            r.b -= a * upper_[j];
            break;
          case Map::Split:
            r.a[c] += a;
            r.a[c + 1] -= a;
            break;
        }
      }
      rows.push_back(std::move(r));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (maps_[j] == Map::Shift && std::isfinite(upper_[j])) {
        Row r{std::vector<double>(first_slack_, 0.0), Sense::Le, upper_[j] - lower_[j]};
        r.a[columns_[j]] = 1.0;
        rows.push_back(std::move(r));
      }
    }
    for (auto& r : rows) {
      if (r.b < 0.0) {
        for (auto& v : r.a) v = -v;
        r.b = -r.b;
        if (r.sense == Sense::Le)
          r.sense = Sense::Ge;
        else if (r.sense == Sense::Ge)
          r.sense = Sense::Le;
      }
    }
    std::size_t slacks = 0, artificials = 0;
    for (const auto& r : rows) {
      if (r.sense != Sense::Eq) ++slacks;
      if (r.sense != Sense::Le) ++artificials;
    }
    first_artificial_ = first_slack_ + slacks;
    width_ = first_artificial_ + artificials;
    std::size_t next_slack = first_slack_, next_art = first_artificial_;
    for (const auto& r : rows) {
      std::vector<double> t(width_ + 1, 0.0);
      std::copy(r.a.begin(), r.a.end(), t.begin());
      t[width_] = r.b;
      if (r.sense == Sense::Le) {
        t[next_slack] = 1.0;
        basis_.push_back(next_slack++);
      } else {
        if (r.sense == Sense::Ge) t[next_slack++] = -1.0;
        t[next_art] = 1.0;
        basis_.push_back(next_art++);
      }
      t_.push_back(std::move(t));
    }
  }

  void reduced_costs(const std::vector<double>& cost) {
    d_.assign(width_ + 1, 0.0);
    for (std::size_t j = 0; j < width_; ++j) d_[j] = cost[j];
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= width_; ++j) d_[j] -= cb * t_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    auto& row = t_[r];
    const double p = row[s];
    for (auto& v : row) v /= p;
    row[s] = 1.0;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r) continue;
      const double f = t_[i][s];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= width_; ++j) {
        t_[i][j] -= f * row[j];
        if (std::fabs(t_[i][j]) < kZeroTol) t_[i][j] = 0.0;
      }
      t_[i][s] = 0.0;
    }
    const double f = d_[s];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= width_; ++j) {
        d_[j] -= f * row[j];
        if (std::fabs(d_[j]) < kZeroTol) d_[j] = 0.0;
      }
      d_[s] = 0.0;
    }
    basis_[r] = s;
    ++pivots_;
  }

  // Bland's rule: lowest-index improving column, ratio ties to the
  // lowest-index basic variable. Only columns < `allowed` may enter.
  SolveStatus iterate(std::size_t allowed, double cost_scale) {
    const double threshold = cfg_.opt_tol * cost_scale;
    while (true) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (d_[j] < -threshold) {
          entering = j;
          break;
        }
      }
      if (!entering) return SolveStatus::Optimal;
      const std::size_t s = *entering;
      std::optional<std::size_t> leave;
      double best = 0.0;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        const double a = t_[i][s];
        if (a <= kPivotTol) continue;
        const double ratio = t_[i][width_] / a;
        if (!leave) {
          leave = i;
          best = ratio;
          continue;
        }
        const double tie = 1e-12 * std::max(1.0, std::fabs(best));
        if (ratio < best - tie || (std::fabs(ratio - best) <= tie && basis_[i] < basis_[*leave])) {
          leave = i;
          best = std::min(best, ratio);
        }
      }
      if (!leave) return SolveStatus::Unbounded;
      if (pivots_ >= cfg_.max_pivots) return SolveStatus::IterationLimit;
      pivot(*leave, s);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < t_.size();) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::fabs(t_[i][j]) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col) {
        pivot(i, *col);
        ++i;
      } else {
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  std::vector<double> primal_values() const {
    std::vector<double> col(width_, 0.0);
    for (std::size_t i = 0; i < t_.size(); ++i) col[basis_[i]] = t_[i][width_];
    std::vector<double> x(lp_.cost.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const std::size_t c = columns_[j];
      switch (maps_[j]) {
        case Map::Shift: x[j] = lower_[j] + col[c]; break;
        case Map::Reflect: x[j] = upper_[j] - col[c]; break;
        case Map::Split: x[j] = col[c] - col[c + 1]; break;
      }
    }
    return x;
  }

  const NumericLp& lp_;
  const std::vector<double>& lower_;
  const std::vector<double>& upper_;
  const SolverConfig& cfg_;
  std::vector<Map> maps_;
  std::vector<std::size_t> columns_;
  std::vector<double> column_cost_;
  std::size_t first_slack_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t width_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<std::size_t> basis_;
  std::vector<double> d_;
  std::size_t pivots_ = 0;
};

LpOutcome solve_relaxation(const NumericLp& lp, const std::vector<double>& lower, const std::vector<double>& upper,
                           const SolverConfig& cfg) {
  return Tableau(lp, lower, upper, cfg).solve();
}

Solution to_solution(const LpOutcome& r) {
  Solution s;
  s.status = r.status;
  s.pivots = r.pivots;
  if (r.status == SolveStatus::Optimal) {
    s.values = r.x;
    s.objective = r.objective;
  }
  return s;
}

void check_config(const SolverConfig& cfg) {
  if (!(cfg.feas_tol > 0.0) || !(cfg.opt_tol > 0.0) || cfg.max_pivots == 0 || cfg.max_nodes == 0)
    throw Error(ErrorCode::PreconditionFailed, "solver tolerances and budgets must be positive");
}

}  // namespace

Solution solve_lp(const LpModel& model, const SolverConfig& cfg) {
  check_config(cfg);
  const NumericLp lp = numeric(model);
  Solution s = to_solution(solve_relaxation(lp, lp.lower, lp.upper, cfg));
  s.nodes = 1;
  return s;
}

Solution solve_milp(const LpModel& model, const SolverConfig& cfg) {
  check_config(cfg);
  const NumericLp lp = numeric(model);
  if (std::find(lp.integer.begin(), lp.integer.end(), true) == lp.integer.end()) return solve_lp(model, cfg);

  struct Node {
    std::vector<double> lower, upper;
    LpOutcome lp;
    std::size_t id;
  };
  const auto better = [&](double a, double b) { return lp.maximize ? a > b : a < b; };

  std::vector<double> lower = lp.lower, upper = lp.upper;
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!lp.integer[j]) continue;
    if (std::isfinite(lower[j])) lower[j] = std::ceil(lower[j] - cfg.feas_tol);
    if (std::isfinite(upper[j])) upper[j] = std::floor(upper[j] + cfg.feas_tol);
  }

  std::size_t nodes = 0, pivots = 0, next_id = 0;
  std::vector<Node> open;
  auto finish = [&](SolveStatus status) {
    Solution s;
    s.status = status;
    s.nodes = nodes;
    s.pivots = pivots;
    return s;
  };
  auto solve_node = [&](std::vector<double> lo, std::vector<double> hi) -> std::optional<SolveStatus> {
    ++nodes;
    Node node{std::move(lo), std::move(hi), {}, next_id++};
    node.lp = solve_relaxation(lp, node.lower, node.upper, cfg);
    pivots += node.lp.pivots;
    if (node.lp.status == SolveStatus::Optimal) {
      open.push_back(std::move(node));
      return std::nullopt;
    }
    if (node.lp.status == SolveStatus::Infeasible) return std::nullopt;
    return node.lp.status;
  };

  if (auto bad = solve_node(lower, upper)) return finish(*bad);
  if (open.empty()) return finish(SolveStatus::Infeasible);

  while (!open.empty()) {
    auto best_it = open.begin();
    for (auto it = open.begin() + 1; it != open.end(); ++it) {
      if (better(it->lp.objective, best_it->lp.objective) ||
          (it->lp.objective == best_it->lp.objective && it->id < best_it->id))
        best_it = it;
    }
    Node node = std::move(*best_it);
    open.erase(best_it);

    // Most fractional integer variable, ties by declaration order.
    std::optional<std::size_t> branch;
    double best_frac = 0.0;
    for (std::size_t j = 0; j < node.lp.x.size(); ++j) {
      if (!lp.integer[j]) continue;
      const double v = node.lp.x[j];
      const double f = std::min(v - std::floor(v), std::ceil(v) - v);
      if (f > cfg.feas_tol && f > best_frac) {
        best_frac = f;
        branch = j;
      }
    }
    if (!branch) {
      Solution s;
      s.status = SolveStatus::Optimal;
      s.values = node.lp.x;
      for (std::size_t j = 0; j < s.values.size(); ++j)
        if (lp.integer[j]) s.values[j] = std::round(s.values[j]);
      double obj = lp.constant;
      for (std::size_t j = 0; j < s.values.size(); ++j) obj += lp.cost[j] * s.values[j];
      s.objective = obj;
      s.nodes = nodes;
      s.pivots = pivots;
      return s;
    }
    if (nodes + 2 > cfg.max_nodes) return finish(SolveStatus::IterationLimit);
    const std::size_t j = *branch;
    const double v = node.lp.x[j];
    std::vector<double> down_hi = node.upper;
    down_hi[j] = std::floor(v);
    std::vector<double> up_lo = node.lower;
    up_lo[j] = std::ceil(v);
    if (auto bad = solve_node(node.lower, down_hi)) return finish(*bad);
    if (auto bad = solve_node(up_lo, node.upper)) return finish(*bad);
  }
  return finish(SolveStatus::Infeasible);
}

double evaluate_objective(const LpModel& model, const std::vector<double>& values) {
  const NumericLp lp = numeric(model);
  if (values.size() != lp.cost.size())
    throw Error(ErrorCode::MissingVariable, "value vector does not cover every variable");
  double obj = lp.constant;
  for (std::size_t j = 0; j < values.size(); ++j) obj += lp.cost[j] * values[j];
  return obj;
}

FeasibilityReport check_feasible(const LpModel& model, const Point& point, double tol) {
  for (const auto& [name, value] : point)
    if (!model.find_variable(name)) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + name + "'");
  std::vector<double> x;
  for (const auto& v : model.variables) {
    auto it = point.find(v.name);
    if (it == point.end()) throw Error(ErrorCode::MissingVariable, "point does not assign '" + v.name + "'");
    x.push_back(it->second);
  }
  const LpModel m = instantiate(normalize(model));
  const NumericLp lp = numeric(m);
  FeasibilityReport report;
  auto record = [&](std::string name, double slack) {
    if (slack < -tol) report.violations.push_back({std::move(name), slack});
  };
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += lp.rows[i][j] * x[j];
    double slack = 0.0;
    switch (lp.senses[i]) {
      case Sense::Le: slack = lp.rhs[i] - lhs; break;
      case Sense::Ge: slack = lhs - lp.rhs[i]; break;
      case Sense::Eq: slack = -std::fabs(lhs - lp.rhs[i]); break;
    }
    record(m.constraints[i].name, slack);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const std::string& name = m.variables[j].name;
    if (std::isfinite(lp.lower[j])) record(name + ".lower", x[j] - lp.lower[j]);
    if (std::isfinite(lp.upper[j])) record(name + ".upper", lp.upper[j] - x[j]);
    if (lp.integer[j]) record(name + ".integer", -std::fabs(x[j] - std::round(x[j])));
  }
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.slack < b.slack; });
  report.feasible = report.violations.empty();
  return report;
}

}  // namespace optmut
