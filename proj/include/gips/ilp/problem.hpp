#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gips::ilp {

enum class Sense { Minimize, Maximize };
enum class Relation { Le, Eq, Ge };
enum class Status { Optimal, Infeasible, Unbounded };

std::string_view to_string(Sense s);
std::string_view to_string(Relation r);
std::string_view to_string(Status s);

struct Term {
  std::size_t var = 0;
  double coeff = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct LinearConstraint {
  std::string name;  // optional; the LP writer falls back to c<k>
  std::vector<Term> terms;
  Relation relation = Relation::Le;
  double rhs = 0.0;

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

// Bivalent linear program: every variable is binary. Variables are identified
// by their VarId string and addressed internally by index.
class IlpProblem {
 public:
  // Throws NameCollision on a duplicate id.
  std::size_t add_var(std::string id);
  std::size_t var_count() const { return vars_.size(); }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::string& var(std::size_t index) const { return vars_.at(index); }
  // Throws NotFound.
  std::size_t var_index(std::string_view id) const;
  bool has_var(std::string_view id) const;

  Sense sense() const { return sense_; }
  void set_sense(Sense sense) { sense_ = sense; }

  // Dense objective vector c, one entry per variable.
  const std::vector<double>& objective() const { return objective_; }
  void set_objective(std::size_t var, double coeff);
  void add_objective(std::size_t var, double coeff);
  double objective_offset() const { return offset_; }
  void set_objective_offset(double offset) { offset_ = offset; }

  // Merges repeated terms, drops zero coefficients and rejects unknown
  // variables or non-finite numbers (TypeError).
  void add_constraint(LinearConstraint constraint);
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  friend bool operator==(const IlpProblem&, const IlpProblem&) = default;

 private:
  std::vector<std::string> vars_;
  std::map<std::string, std::size_t, std::less<>> index_;
  Sense sense_ = Sense::Minimize;
  std::vector<double> objective_;
  double offset_ = 0.0;
  std::vector<LinearConstraint> constraints_;
};

struct LpSolution {
  Status status = Status::Infeasible;
  std::vector<double> values;  // aligned with IlpProblem::vars()
  double objective_value = 0.0;
};

struct IlpSolution {
  Status status = Status::Infeasible;
  std::vector<int> values;  // 0/1, aligned with IlpProblem::vars()
  double objective_value = 0.0;
  std::size_t node_count = 0;

  int value(const IlpProblem& problem, std::string_view id) const {
    return values.at(problem.var_index(id));
  }
};

// Primal feasibility tolerance used by the LP solver.
inline constexpr double kFeasibilityTol = 1e-7;
// Absolute tolerance of branch-and-bound pruning.
inline constexpr double kPruneTol = 1e-9;
// Tolerance for accepting a 0/1 assignment as feasible.
inline constexpr double kIntegerFeasibilityTol = 1e-6;

// Continuous relaxation over the box [0,1]^n.
LpSolution solve_lp(const IlpProblem& problem);

// Same, with per-variable bounds (lower[i] <= x_i <= upper[i]).
LpSolution solve_lp(const IlpProblem& problem, std::span<const double> lower,
                    std::span<const double> upper);

// Exact 0/1 optimum by depth-first branch-and-bound on the LP relaxation.
IlpSolution solve_ilp(const IlpProblem& problem);

// Correctly rounded sum (independent of term order).
double exact_sum(std::span<const double> terms);

// c^T x + offset, summed exactly.
double objective_value(const IlpProblem& problem, std::span<const double> values);
double objective_value(const IlpProblem& problem, std::span<const int> values);

// Largest amount by which any constraint is violated (0 if all hold).
double max_violation(const IlpProblem& problem, std::span<const double> values);
double max_violation(const IlpProblem& problem, std::span<const int> values);

// CPLEX LP text. Throws NameCollision if two ids sanitize to the same name.
std::string write_lp(const IlpProblem& problem);
std::string sanitize_lp_name(std::string_view id);

}  // namespace gips::ilp
