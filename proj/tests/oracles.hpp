#pragma once

// Independent reference implementations used by unit and acceptance tests.
// They share no code with the library beyond the data types.

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gips/graph/model.hpp"
#include "gips/ilp/problem.hpp"
#include "gips/match/pattern.hpp"

namespace oracle {

using gips::graph::Model;
using gips::graph::Node;

inline double number(const gips::Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return double(*i);
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  return 0.0;
}

// Evaluates a comparison over numbers/bools by plain recursion.
inline double eval(const gips::Expr& e, const std::function<gips::Value(const gips::AttrRef&)>& look) {
  using K = gips::Expr::Kind;
  switch (e.kind()) {
    case K::Literal: return number(e.value());
    case K::Attr: return number(look(e.ref()));
    case K::Neg: return -eval(e.lhs(), look);
    case K::Binary: {
      const double a = eval(e.lhs(), look), b = eval(e.rhs(), look);
      switch (e.op()) {
        case gips::BinaryOp::Add: return a + b;
        case gips::BinaryOp::Sub: return a - b;
        case gips::BinaryOp::Mul: return a * b;
        case gips::BinaryOp::Div: return a / b;
      }
      return 0;
    }
    case K::Call: {
      double r = eval(e.args()[0], look);
      for (std::size_t i = 1; i < e.args().size(); ++i) {
        const double x = eval(e.args()[i], look);
        r = e.fn() == "min" ? std::min(r, x) : std::max(r, x);
      }
      return r;
    }
  }
  return 0;
}

inline bool cmp(double a, gips::CmpOp op, double b) {
  switch (op) {
    case gips::CmpOp::Lt: return a < b;
    case gips::CmpOp::Le: return a <= b;
    case gips::CmpOp::Eq: return a == b;
    case gips::CmpOp::Ne: return a != b;
    case gips::CmpOp::Ge: return a >= b;
    case gips::CmpOp::Gt: return a > b;
  }
  return false;
}

// Exhaustive injective assignment over all nodes; returns sorted fingerprints.
inline std::vector<std::string> brute_force_matches(const gips::match::Pattern& p, const Model& m) {
  std::vector<std::string> out;
  if (p.nodes.empty()) return out;
  std::vector<const Node*> all;
  for (const auto& [id, n] : m.nodes()) all.push_back(&n);
  std::vector<const Node*> pick(p.nodes.size(), nullptr);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == p.nodes.size()) {
      auto node_of = [&](const std::string& var) -> const Node* {
        for (std::size_t i = 0; i < p.nodes.size(); ++i)
          if (p.nodes[i].var == var) return pick[i];
        return nullptr;
      };
      for (const auto& pe : p.edges) {
        const Node* s = node_of(pe.src);
        const Node* t = node_of(pe.tgt);
        bool found = false;
        for (const auto& [eid, e] : m.edges()) {
          if (e.type == pe.type && e.src == s->id && e.tgt == t->id) found = true;
        }
        if (!found) return;
      }
      auto look = [&](const gips::AttrRef& r) { return node_of(r.var)->attrs.at(r.attr); };
      for (const auto& c : p.conditions) {
        if (!cmp(eval(c.lhs, look), c.op, eval(c.rhs, look))) return;
      }
      std::vector<std::pair<std::string, std::string>> kv;
      for (std::size_t i = 0; i < p.nodes.size(); ++i) kv.emplace_back(p.nodes[i].var, pick[i]->id);
      std::sort(kv.begin(), kv.end());
      std::string fp = p.name + "(";
      for (std::size_t i = 0; i < kv.size(); ++i) fp += (i ? "," : "") + kv[i].first + "=" + kv[i].second;
      out.push_back(fp + ")");
      return;
    }
    for (const Node* n : all) {
      if (n->type != p.nodes[k].type) continue;
      if (std::find(pick.begin(), pick.begin() + k, n) != pick.begin() + k) continue;
      pick[k] = n;
      rec(k + 1);
    }
    pick[k] = nullptr;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

struct EnumResult {
  bool feasible = false;
  double best = 0;
  std::vector<int> argbest;
};

// Checks all 2^n assignments; feasibility with the same 1e-6 slack the solver uses.
inline EnumResult enumerate(const gips::ilp::IlpProblem& p) {
  const std::size_t n = p.var_count();
  EnumResult r;
  std::vector<int> x(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t j = 0; j < n; ++j) x[j] = int((mask >> j) & 1);
    bool ok = true;
    for (const auto& c : p.constraints()) {
      double lhs = 0;
      for (const auto& t : c.terms) lhs += t.coeff * x[t.var];
      if ((c.relation == gips::ilp::Relation::Le && lhs > c.rhs + 1e-6) ||
          (c.relation == gips::ilp::Relation::Ge && lhs < c.rhs - 1e-6) ||
          (c.relation == gips::ilp::Relation::Eq && std::abs(lhs - c.rhs) > 1e-6)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    // dyadic data: plain double summation is exact here
    double obj = p.objective_offset();
    for (std::size_t j = 0; j < n; ++j) obj += p.objective()[j] * x[j];
    const bool better = p.sense() == gips::ilp::Sense::Minimize ? obj < r.best : obj > r.best;
    if (!r.feasible || better) {
      r.feasible = true;
      r.best = obj;
      r.argbest = x;
    }
  }
  return r;
}

// Random bivalent problem with small dyadic data so that feasibility and
// objective values are computed exactly in double arithmetic.
inline gips::ilp::IlpProblem random_problem(std::mt19937_64& rng, std::size_t max_vars = 16,
                                            std::size_t max_rows = 12) {
  using namespace gips::ilp;
  IlpProblem p;
  const std::size_t n = 1 + rng() % max_vars;
  const std::size_t m = rng() % (max_rows + 1);
  for (std::size_t j = 0; j < n; ++j) p.add_var("x" + std::to_string(j));
  p.set_sense(rng() % 2 ? Sense::Minimize : Sense::Maximize);
  for (std::size_t j = 0; j < n; ++j) p.set_objective(j, double(int(rng() % 21) - 10) / double(1u << (rng() % 3)));
  std::vector<int> hidden(n);
  for (auto& h : hidden) h = int(rng() % 2);
  for (std::size_t i = 0; i < m; ++i) {
    LinearConstraint c;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng() % 3 == 0) c.terms.push_back({j, double(int(rng() % 13) - 6)});
    }
    const int rel = int(rng() % 5);
    c.relation = rel < 2 ? Relation::Le : rel < 4 ? Relation::Ge : Relation::Eq;
    double v = 0;
    for (const auto& t : c.terms) v += double(hidden[t.var]) * t.coeff;
    const double slack = double(rng() % 3);
    if (rng() % 6 == 0) {
      double s = 0;
      for (const auto& t : c.terms) s += std::abs(t.coeff);
      const int span = int(s) + 1;
      c.rhs = double(int(rng() % (2 * span + 1)) - span);
    } else {
      // satisfied by the hidden assignment
      c.rhs = c.relation == Relation::Le ? v + slack : c.relation == Relation::Ge ? v - slack : v;
    }
    p.add_constraint(std::move(c));
  }
  return p;
}

}  // namespace oracle
