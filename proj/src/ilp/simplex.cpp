#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gips/errors.hpp"
#include "gips/ilp/problem.hpp"

namespace gips::ilp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Dense bounded-variable primal simplex in tableau form, Bland's rule.
// Columns: structural, then one slack per inequality row, then artificials.
class Tableau {
 public:
  Tableau(const IlpProblem& p, std::span<const double> lo, std::span<const double> up) : n_(p.var_count()) {
    // Rows with no terms are checked directly.
    std::vector<const LinearConstraint*> rows;
    for (const auto& c : p.constraints()) {
      if (c.terms.empty()) {
        const bool ok = c.relation == Relation::Le   ? 0.0 <= c.rhs + kFeasibilityTol
                        : c.relation == Relation::Ge ? 0.0 >= c.rhs - kFeasibilityTol
                                                     : std::fabs(c.rhs) <= kFeasibilityTol;
        if (!ok) trivially_infeasible_ = true;
        continue;
      }
      rows.push_back(&c);
    }
    m_ = rows.size();
    std::size_t slacks = 0;
    for (auto* r : rows) slacks += r->relation != Relation::Eq;

    // Residuals with every structural variable at its lower bound decide
    // where artificials are needed.
    std::vector<double> resid(m_);
    std::vector<int> kind(m_);  // 0 = slack basic, 1 = artificial
    std::size_t arts = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      double r = rows[i]->rhs;
      for (const auto& t : rows[i]->terms) r -= t.coeff * lo[t.var];
      resid[i] = r;
      const Relation rel = rows[i]->relation;
      if ((rel == Relation::Le && r >= 0.0) || (rel == Relation::Ge && r <= 0.0)) {
        kind[i] = 0;
      } else {
        kind[i] = 1;
        ++arts;
      }
    }
    first_art_ = n_ + slacks;
    cols_ = first_art_ + arts;
    t_.assign(m_ * cols_, 0.0);
    lower_.assign(cols_, 0.0);
    upper_.assign(cols_, kInf);
    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = lo[j];
      upper_[j] = up[j];
    }
    rhs_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    xb_.assign(m_, 0.0);
    at_upper_.assign(cols_, false);
    basic_.assign(cols_, false);
    init_basic_.assign(m_, 0);

    std::size_t next_slack = n_;
    std::size_t next_art = first_art_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto* r = rows[i];
      double sign = 1.0;
      std::size_t slack = cols_;
      double slack_coeff = 0.0;
      if (r->relation != Relation::Eq) {
        slack = next_slack++;
        slack_coeff = r->relation == Relation::Le ? 1.0 : -1.0;
      }
      if (kind[i] == 0) {
        // Orient the row so that the slack column is +e_i.
        sign = slack_coeff;
      } else {
        sign = resid[i] >= 0.0 ? 1.0 : -1.0;
      }
      for (const auto& t : r->terms) at(i, t.var) += sign * t.coeff;
      if (slack != cols_) at(i, slack) = sign * slack_coeff;
      rhs_[i] = sign * r->rhs;
      std::size_t b = slack;
      if (kind[i] == 1) {
        b = next_art++;
        at(i, b) = 1.0;
      }
      basis_[i] = b;
      init_basic_[i] = b;
      basic_[b] = true;
    }
    recompute_basics();
  }

  bool trivially_infeasible() const { return trivially_infeasible_; }

  Status run() {
    if (trivially_infeasible_) return Status::Infeasible;
    if (first_art_ < cols_) {
      std::vector<double> cost(cols_, 0.0);
      for (std::size_t j = first_art_; j < cols_; ++j) cost[j] = 1.0;
      set_costs(cost);
      if (iterate() != Status::Optimal) throw NumericalFailure("phase one did not terminate at an optimum");
      recompute_basics();
      double infeas = 0.0;
      double scale = 1.0;
      for (double b : rhs_) scale = std::max(scale, std::fabs(b));
      for (std::size_t j = first_art_; j < cols_; ++j) infeas += value(j);
      if (infeas > kFeasibilityTol * scale) return Status::Infeasible;
      for (std::size_t j = first_art_; j < cols_; ++j) {
        upper_[j] = 0.0;
        at_upper_[j] = false;
      }
    }
    set_costs(phase2_);
    const Status s = iterate();
    recompute_basics();
    return s;
  }

  void set_phase2(std::vector<double> c) {
    c.resize(cols_, 0.0);
    phase2_ = std::move(c);
  }

  double value(std::size_t j) const {
    if (basic_[j]) {
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] == j) return xb_[i];
    }
    return at_upper_[j] ? upper_[j] : lower_[j];
  }

  std::vector<double> structural_values() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      x[j] = at_upper_[j] ? upper_[j] : lower_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = xb_[i];
    }
    for (std::size_t j = 0; j < n_; ++j) x[j] = std::clamp(x[j], lower_[j], upper_[j]);
    return x;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * cols_ + j]; }

  double nonbasic_value(std::size_t j) const { return at_upper_[j] ? upper_[j] : lower_[j]; }

  // x_B = B^-1 b - sum over nonbasic j of T_j x_j. B^-1 sits in the columns
  // of the initial basis.
  void recompute_basics() {
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += at(i, init_basic_[k]) * rhs_[k];
      for (std::size_t j = 0; j < cols_; ++j) {
        if (basic_[j]) continue;
        const double xj = nonbasic_value(j);
        if (xj != 0.0) v -= at(i, j) * xj;
      }
      xb_[i] = v;
    }
  }

  void set_costs(const std::vector<double>& c) {
    cost_ = c;
    d_ = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * at(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  Status iterate() {
    const std::size_t limit = 50000 + 200 * (m_ + cols_);
    for (std::size_t iter = 0; iter < limit; ++iter) {
      // Entering column: lowest index with an improving reduced cost.
      std::size_t q = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (basic_[j] || upper_[j] - lower_[j] <= kPivotTol) continue;
        if ((!at_upper_[j] && d_[j] < -kCostTol) || (at_upper_[j] && d_[j] > kCostTol)) {
          q = j;
          break;
        }
      }
      if (q == cols_) return Status::Optimal;
      const double dir = at_upper_[q] ? -1.0 : 1.0;

      double step = upper_[q] - lower_[q];
      std::size_t p = m_;
      bool leave_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = at(i, q) * dir;
        const std::size_t b = basis_[i];
        double lim;
        bool to_upper;
        if (alpha > kPivotTol) {
          lim = (xb_[i] - lower_[b]) / alpha;
          to_upper = false;
        } else if (alpha < -kPivotTol && upper_[b] < kInf) {
          lim = (upper_[b] - xb_[i]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        lim = std::max(lim, 0.0);
        // Ties go to the bound flip, then to the lowest basic column.
        const bool better = lim < step - 1e-12 || (p != m_ && lim <= step + 1e-12 && b < basis_[p]);
        if (better) {
          step = lim;
          p = i;
          leave_upper = to_upper;
        }
      }
      if (step == kInf) return Status::Unbounded;

      for (std::size_t i = 0; i < m_; ++i) xb_[i] -= dir * step * at(i, q);
      if (p == m_) {
        at_upper_[q] = !at_upper_[q];
        continue;
      }
      const double entering = nonbasic_value(q) + dir * step;
      const std::size_t leaving = basis_[p];
      pivot(p, q);
      basic_[leaving] = false;
      at_upper_[leaving] = leave_upper;
      basic_[q] = true;
      at_upper_[q] = false;
      basis_[p] = q;
      xb_[p] = entering;
    }
    throw NumericalFailure("simplex iteration limit reached");
  }

  void pivot(std::size_t p, std::size_t q) {
    const double piv = at(p, q);
    double* prow = &t_[p * cols_];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] /= piv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      const double f = at(i, q);
      if (f == 0.0) continue;
      double* row = &t_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) {
        if (prow[j] != 0.0) row[j] -= f * prow[j];
      }
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (prow[j] != 0.0) d_[j] -= f * prow[j];
      }
      d_[q] = 0.0;
    }
  }

  std::size_t n_;
  std::size_t m_ = 0;
  std::size_t cols_ = 0;
  std::size_t first_art_ = 0;
  bool trivially_infeasible_ = false;
  std::vector<double> t_;
  std::vector<double> rhs_;
  std::vector<double> lower_, upper_;
  std::vector<std::size_t> basis_, init_basic_;
  std::vector<double> xb_;
  std::vector<bool> at_upper_, basic_;
  std::vector<double> cost_, d_, phase2_;
};

}  // namespace

LpSolution solve_lp(const IlpProblem& problem, std::span<const double> lower,
                    std::span<const double> upper) {
  const std::size_t n = problem.var_count();
  if (lower.size() != n || upper.size() != n) throw TypeError("bound vectors do not match variable count");
  LpSolution out;
  for (std::size_t j = 0; j < n; ++j) {
    if (lower[j] > upper[j]) return out;
  }
  Tableau tab(problem, lower, upper);
  std::vector<double> c(problem.objective());
  if (problem.sense() == Sense::Maximize) {
    for (double& v : c) v = -v;
  }
  tab.set_phase2(std::move(c));
  out.status = tab.run();
  if (out.status == Status::Optimal) {
    out.values = tab.structural_values();
    out.objective_value = objective_value(problem, std::span<const double>(out.values));
  }
  return out;
}

LpSolution solve_lp(const IlpProblem& problem) {
  const std::vector<double> lo(problem.var_count(), 0.0);
  const std::vector<double> up(problem.var_count(), 1.0);
  return solve_lp(problem, lo, up);
}

IlpSolution solve_ilp(const IlpProblem& problem) {
  const std::size_t n = problem.var_count();
  const bool minimize = problem.sense() == Sense::Minimize;
  // Work in minimization form: smaller key is better.
  auto key = [&](double obj) { return minimize ? obj : -obj; };

  struct Node {
    std::vector<double> lo, up;
  };
  std::vector<Node> stack;
  stack.push_back({std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)});

  IlpSolution best;
  bool have = false;
  double best_key = 0.0;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    ++best.node_count;
    const LpSolution lp = solve_lp(problem, node.lo, node.up);
    if (lp.status == Status::Unbounded) throw NumericalFailure("unbounded relaxation of a bounded problem");
    if (lp.status != Status::Optimal) continue;
    if (have && key(lp.objective_value) >= best_key - kPruneTol) continue;

    std::size_t branch = n;
    double best_frac = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double f = lp.values[j] - std::floor(lp.values[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist > kIntegerFeasibilityTol && dist > best_frac) {
        best_frac = dist;
        branch = j;
      }
    }
    if (branch == n) {
      std::vector<int> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = lp.values[j] >= 0.5 ? 1 : 0;
      if (max_violation(problem, std::span<const int>(x)) > kIntegerFeasibilityTol) {
        // Rounding broke feasibility; split on the first free variable instead.
        for (std::size_t j = 0; j < n && branch == n; ++j) {
          if (node.lo[j] != node.up[j]) branch = j;
        }
        if (branch == n) continue;
      } else {
        const double obj = objective_value(problem, std::span<const int>(x));
        if (!have || key(obj) < best_key - kPruneTol) {
          have = true;
          best_key = key(obj);
          best.values = std::move(x);
          best.objective_value = obj;
        }
        continue;
      }
    }
    Node zero = node;
    zero.up[branch] = 0.0;
    Node one = std::move(node);
    one.lo[branch] = 1.0;
    // The child pushed last is explored first.
    if (minimize) {
      stack.push_back(std::move(one));
      stack.push_back(std::move(zero));
    } else {
      stack.push_back(std::move(zero));
      stack.push_back(std::move(one));
    }
  }
  best.status = have ? Status::Optimal : Status::Infeasible;
  if (!have) best.values.clear();
  return best;
}

}  // namespace gips::ilp
