#include "gips/match/pattern.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "gips/errors.hpp"

namespace gips::match {

using graph::Model;
using graph::Node;

const PatternNode* Pattern::find_var(std::string_view var) const {
  for (const auto& n : nodes) {
    if (n.var == var) return &n;
  }
  return nullptr;
}

void add_link(Pattern& pattern, std::string link_var, std::string link_type, std::string from,
              std::string to, SourceSpan span) {
  pattern.nodes.push_back({link_var, std::move(link_type), span});
  pattern.edges.push_back({"source", link_var, std::move(from), span});
  pattern.edges.push_back({"target", std::move(link_var), std::move(to), span});
}

std::vector<std::string> pattern_errors(const Pattern& pattern, const graph::Metamodel& mm) {
  std::vector<std::string> errors;
  std::set<std::string> vars;
  for (const auto& n : pattern.nodes) {
    if (!vars.insert(n.var).second) {
      errors.push_back("pattern " + pattern.name + ": duplicate variable '" + n.var + "'");
    }
    if (!mm.find_node_type(n.type)) {
      errors.push_back("pattern " + pattern.name + ": unknown node type '" + n.type + "'");
    }
  }
  auto type_of = [&](const std::string& var) -> const graph::NodeTypeDef* {
    const PatternNode* n = pattern.find_var(var);
    return n ? mm.find_node_type(n->type) : nullptr;
  };
  for (const auto& e : pattern.edges) {
    const PatternNode* src = pattern.find_var(e.src);
    const PatternNode* tgt = pattern.find_var(e.tgt);
    if (!src || !tgt) {
      errors.push_back("pattern " + pattern.name + ": edge " + e.type +
                       " uses undeclared variable '" + (!src ? e.src : e.tgt) + "'");
      continue;
    }
    const graph::EdgeTypeDef* def = mm.find_edge_type(src->type, e.type);
    if (!def) {
      errors.push_back("pattern " + pattern.name + ": no edge type '" + e.type + "' from " +
                       src->type);
    } else if (def->target_type != tgt->type) {
      errors.push_back("pattern " + pattern.name + ": edge " + e.type + " targets " +
                       def->target_type + ", not " + tgt->type);
    }
  }
  for (const auto& c : pattern.conditions) {
    try {
      auto ref_kind = [&](const AttrRef& ref, const SourceSpan&) -> AttrKind {
        if (ref.context) throw TypeError("context reference " + to_string(ref) + " in a pattern");
        const graph::NodeTypeDef* t = type_of(ref.var);
        if (!pattern.find_var(ref.var)) throw TypeError("undeclared variable '" + ref.var + "'");
        if (!t) throw TypeError("variable '" + ref.var + "' has an unknown type");
        const graph::AttrDef* a = t->find_attr(ref.attr);
        if (!a) throw TypeError("type " + t->name + " has no attribute '" + ref.attr + "'");
        return a->kind;
      };
      const AttrKind l = infer_kind(c.lhs, ref_kind);
      const AttrKind r = infer_kind(c.rhs, ref_kind);
      check_comparable(l, c.op, r);
    } catch (const TypeError& e) {
      errors.push_back("pattern " + pattern.name + ": " + e.what());
    }
  }
  return errors;
}

Match::Match(std::string pattern, Binding binding)
    : pattern_(std::move(pattern)), binding_(std::move(binding)) {
  fingerprint_ = pattern_ + "(";
  bool first = true;
  for (const auto& [var, id] : binding_) {
    if (!first) fingerprint_ += ",";
    first = false;
    fingerprint_ += var + "=" + id;
  }
  fingerprint_ += ")";
}

const graph::NodeId& Match::at(std::string_view var) const {
  auto it = binding_.find(var);
  if (it == binding_.end()) {
    throw UnboundRef("match " + fingerprint_ + " binds no variable '" + std::string(var) + "'");
  }
  return it->second;
}

namespace {

Value read_attr(const Node& n, const std::string& attr) {
  auto it = n.attrs.find(attr);
  if (it == n.attrs.end()) {
    throw MissingAttribute("node '" + n.id + "' has no attribute '" + attr + "'");
  }
  return it->second;
}

// Backtracking search with smallest-candidate-set-first variable order,
// recomputed at every level; ties go to declaration order.
class Search {
 public:
  Search(const Pattern& pattern, const Model& model) : p_(pattern), m_(model) {
    auto errors = pattern_errors(pattern, model.metamodel());
    if (!errors.empty()) throw TypeError(errors.front());

    const std::size_t n = p_.nodes.size();
    for (std::size_t i = 0; i < n; ++i) index_[p_.nodes[i].var] = i;
    adj_.resize(n);
    for (const auto& e : p_.edges) {
      const std::size_t s = index_.at(e.src);
      const std::size_t t = index_.at(e.tgt);
      adj_[s].push_back({t, &e.type, true});
      adj_[t].push_back({s, &e.type, false});
    }
    std::vector<std::vector<std::size_t>> unary(n);
    multi_.resize(n);
    cond_vars_.resize(p_.conditions.size());
    for (std::size_t c = 0; c < p_.conditions.size(); ++c) {
      std::set<std::size_t> vs;
      auto collect = [&](const AttrRef& r, const SourceSpan&) { vs.insert(index_.at(r.var)); };
      p_.conditions[c].lhs.for_each_ref(collect);
      p_.conditions[c].rhs.for_each_ref(collect);
      cond_vars_[c].assign(vs.begin(), vs.end());
      if (vs.empty()) {
        constants_.push_back(c);
      } else if (vs.size() == 1) {
        unary[*vs.begin()].push_back(c);
      } else {
        for (std::size_t v : vs) multi_[v].push_back(c);
      }
    }
    bound_.assign(n, nullptr);
    domain_.resize(n);
    in_domain_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& id : m_.nodes_of_type(p_.nodes[v].type)) {
        const Node* node = m_.find_node(id);
        bound_[v] = node;
        bool ok = std::all_of(unary[v].begin(), unary[v].end(),
                              [&](std::size_t c) { return condition_holds(c); });
        bound_[v] = nullptr;
        if (ok) {
          domain_[v].push_back(node);
          in_domain_[v].insert(node);
        }
      }
    }
  }

  std::vector<Match> run(std::string_view seed = {}) {
    results_.clear();
    for (std::size_t c : constants_) {
      if (!condition_holds(c)) return {};
    }
    if (p_.nodes.empty()) return {};
    if (seed.empty()) {
      extend();
    } else {
      const Node* node = m_.find_node(seed);
      if (!node) return {};
      for (std::size_t v = 0; v < p_.nodes.size(); ++v) {
        if (in_domain_[v].count(node) && bind(v, node)) {
          extend();
          unbind(v);
        }
      }
    }
    std::sort(results_.begin(), results_.end());
    results_.erase(std::unique(results_.begin(), results_.end()), results_.end());
    return std::move(results_);
  }

 private:
  struct Adj {
    std::size_t other;
    const std::string* type;
    bool outgoing;  // this var is the edge source
  };

  bool condition_holds(std::size_t c) const {
    const auto& cond = p_.conditions[c];
    auto resolve = [&](const AttrRef& ref) -> Value {
      return read_attr(*bound_[index_.at(ref.var)], ref.attr);
    };
    return compare(evaluate(cond.lhs, resolve), cond.op, evaluate(cond.rhs, resolve));
  }

  bool edges_hold(std::size_t v, const Node* node) const {
    for (const auto& a : adj_[v]) {
      const Node* other = bound_[a.other];
      if (!other) continue;
      const bool ok = a.outgoing ? m_.has_edge(*a.type, node->id, other->id)
                                 : m_.has_edge(*a.type, other->id, node->id);
      if (!ok) return false;
    }
    return true;
  }

  // Binds v and checks everything that became decidable. Leaves v unbound on
  // failure.
  bool bind(std::size_t v, const Node* node) {
    if (used_.count(node) || !edges_hold(v, node)) return false;
    bound_[v] = node;
    for (std::size_t c : multi_[v]) {
      const auto& vs = cond_vars_[c];
      if (std::all_of(vs.begin(), vs.end(), [&](std::size_t x) { return bound_[x]; }) &&
          !condition_holds(c)) {
        bound_[v] = nullptr;
        return false;
      }
    }
    used_.insert(node);
    return true;
  }

  void unbind(std::size_t v) {
    used_.erase(bound_[v]);
    bound_[v] = nullptr;
  }

  std::vector<const Node*> candidates(std::size_t v) const {
    std::vector<const Node*> out;
    for (const auto& a : adj_[v]) {
      const Node* other = bound_[a.other];
      if (!other) continue;
      std::set<const Node*> seen;
      const auto& edge_ids = a.outgoing ? m_.in_edges(other->id) : m_.out_edges(other->id);
      for (const auto& eid : edge_ids) {
        const graph::Edge* e = m_.find_edge(eid);
        if (e->type != *a.type) continue;
        const Node* n = m_.find_node(a.outgoing ? e->src : e->tgt);
        if (n && in_domain_[v].count(n) && !used_.count(n) && seen.insert(n).second &&
            edges_hold(v, n)) {
          out.push_back(n);
        }
      }
      return out;
    }
    for (const Node* n : domain_[v]) {
      if (!used_.count(n)) out.push_back(n);
    }
    return out;
  }

  void extend() {
    std::size_t best = p_.nodes.size();
    std::vector<const Node*> best_candidates;
    for (std::size_t v = 0; v < p_.nodes.size(); ++v) {
      if (bound_[v]) continue;
      auto c = candidates(v);
      if (best == p_.nodes.size() || c.size() < best_candidates.size()) {
        best = v;
        best_candidates = std::move(c);
        if (best_candidates.empty()) return;
      }
    }
    if (best == p_.nodes.size()) {
      Binding b;
      for (std::size_t v = 0; v < p_.nodes.size(); ++v) b.emplace(p_.nodes[v].var, bound_[v]->id);
      results_.emplace_back(p_.name, std::move(b));
      return;
    }
    for (const Node* n : best_candidates) {
      if (bind(best, n)) {
        extend();
        unbind(best);
      }
    }
  }

  const Pattern& p_;
  const Model& m_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<Adj>> adj_;
  std::vector<std::vector<std::size_t>> multi_;
  std::vector<std::vector<std::size_t>> cond_vars_;
  std::vector<std::size_t> constants_;
  std::vector<std::vector<const Node*>> domain_;
  std::vector<std::unordered_set<const Node*>> in_domain_;
  std::vector<const Node*> bound_;
  std::unordered_set<const Node*> used_;
  std::vector<Match> results_;
};

}  // namespace

std::vector<Match> find_matches(const Pattern& pattern, const Model& model) {
  return Search(pattern, model).run();
}

std::vector<Match> find_matches_through(const Pattern& pattern, const Model& model,
                                        std::string_view seed_node) {
  if (seed_node.empty()) return {};
  return Search(pattern, model).run(seed_node);
}

bool holds(const Pattern& pattern, const Model& model, const Binding& binding) {
  if (binding.size() != pattern.nodes.size()) return false;
  std::map<std::string, const Node*, std::less<>> nodes;
  std::set<std::string> used;
  for (const auto& pn : pattern.nodes) {
    auto it = binding.find(pn.var);
    if (it == binding.end()) return false;
    const Node* n = model.find_node(it->second);
    if (!n || n->type != pn.type || !used.insert(n->id).second) return false;
    nodes[pn.var] = n;
  }
  for (const auto& e : pattern.edges) {
    if (!model.has_edge(e.type, nodes.at(e.src)->id, nodes.at(e.tgt)->id)) return false;
  }
  auto resolve = [&](const AttrRef& ref) -> Value {
    auto it = nodes.find(ref.var);
    if (ref.context || it == nodes.end()) {
      throw UnboundRef("unbound reference " + to_string(ref));
    }
    return read_attr(*it->second, ref.attr);
  };
  for (const auto& c : pattern.conditions) {
    if (!compare(evaluate(c.lhs, resolve), c.op, evaluate(c.rhs, resolve))) return false;
  }
  return true;
}

}  // namespace gips::match
