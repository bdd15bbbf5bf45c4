#include <algorithm>
#include <cmath>

#include "gips/errors.hpp"
#include "gips/ilp/problem.hpp"

namespace gips::ilp {

std::string_view to_string(Sense s) {
  return s == Sense::Minimize ? "minimize" : "maximize";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Le: return "<=";
    case Relation::Eq: return "=";
    case Relation::Ge: return ">=";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
  }
  return "?";
}

std::size_t IlpProblem::add_var(std::string id) {
  if (index_.count(id)) throw NameCollision("duplicate variable '" + id + "'");
  const std::size_t i = vars_.size();
  index_.emplace(id, i);
  vars_.push_back(std::move(id));
  objective_.push_back(0.0);
  return i;
}

std::size_t IlpProblem::var_index(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw NotFound("no variable '" + std::string(id) + "'");
  return it->second;
}

bool IlpProblem::has_var(std::string_view id) const { return index_.count(id) > 0; }

void IlpProblem::set_objective(std::size_t var, double coeff) {
  if (!std::isfinite(coeff)) throw TypeError("non-finite objective coefficient");
  objective_.at(var) = coeff;
}

void IlpProblem::add_objective(std::size_t var, double coeff) {
  set_objective(var, objective_.at(var) + coeff);
}

void IlpProblem::add_constraint(LinearConstraint constraint) {
  if (!std::isfinite(constraint.rhs)) throw TypeError("non-finite right-hand side");
  std::vector<Term> merged;
  for (const auto& t : constraint.terms) {
    if (t.var >= vars_.size()) throw TypeError("constraint references an undeclared variable");
    if (!std::isfinite(t.coeff)) throw TypeError("non-finite constraint coefficient");
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Term& m) { return m.var == t.var; });
    if (it == merged.end()) {
      merged.push_back(t);
    } else {
      it->coeff += t.coeff;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  constraint.terms = std::move(merged);
  constraints_.push_back(std::move(constraint));
}

double exact_sum(std::span<const double> terms) {
  // Shewchuk's non-overlapping partials, rounded once at the end.
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  double hi = 0.0;
  if (!partials.empty()) {
    std::size_t n = partials.size();
    hi = partials[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      const double yr = x - hi;
      if (y == yr) hi = x;
    }
  }
  return hi;
}

namespace {

template <class T>
double objective_impl(const IlpProblem& p, std::span<const T> values) {
  std::vector<double> terms;
  terms.reserve(values.size() + 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != T{0}) terms.push_back(p.objective()[i] * static_cast<double>(values[i]));
  }
  terms.push_back(p.objective_offset());
  return exact_sum(terms);
}

template <class T>
double violation_impl(const IlpProblem& p, std::span<const T> values) {
  double worst = 0.0;
  for (const auto& c : p.constraints()) {
    std::vector<double> terms;
    for (const auto& t : c.terms) terms.push_back(t.coeff * static_cast<double>(values[t.var]));
    const double lhs = exact_sum(terms);
    double v = 0.0;
    switch (c.relation) {
      case Relation::Le: v = lhs - c.rhs; break;
      case Relation::Ge: v = c.rhs - lhs; break;
      case Relation::Eq: v = std::fabs(lhs - c.rhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

double objective_value(const IlpProblem& p, std::span<const double> values) {
  return objective_impl(p, values);
}
double objective_value(const IlpProblem& p, std::span<const int> values) {
  return objective_impl(p, values);
}
double max_violation(const IlpProblem& p, std::span<const double> values) {
  return violation_impl(p, values);
}
double max_violation(const IlpProblem& p, std::span<const int> values) {
  return violation_impl(p, values);
}

}  // namespace gips::ilp
