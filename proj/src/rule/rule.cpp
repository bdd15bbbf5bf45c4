#include "gips/rule/rule.hpp"

#include <map>
#include <set>

#include "gips/errors.hpp"

namespace gips::rule {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::vector<std::string> rule_errors(const GtRule& rule, const graph::Metamodel& mm) {
  std::vector<std::string> errors;
  std::map<std::string, std::string> var_types;
  for (const auto& n : rule.lhs.nodes) var_types[n.var] = n.type;
  const std::string where = "rule " + rule.name + ": ";

  auto ref_kind = [&](const AttrRef& ref, const SourceSpan&) -> AttrKind {
    if (ref.context) throw TypeError("context reference " + to_string(ref) + " in a rule");
    auto it = var_types.find(ref.var);
    if (it == var_types.end()) throw TypeError("unknown variable '" + ref.var + "'");
    const graph::NodeTypeDef* t = mm.find_node_type(it->second);
    const graph::AttrDef* a = t ? t->find_attr(ref.attr) : nullptr;
    if (!a) throw TypeError("type " + it->second + " has no attribute '" + ref.attr + "'");
    return a->kind;
  };
  auto check_value = [&](const std::string& type, const std::string& attr, const Expr& value) {
    const graph::NodeTypeDef* t = mm.find_node_type(type);
    const graph::AttrDef* a = t ? t->find_attr(attr) : nullptr;
    if (!a) {
      errors.push_back(where + "type " + type + " has no attribute '" + attr + "'");
      return;
    }
    try {
      const AttrKind k = infer_kind(value, ref_kind);
      if (k != a->kind && !(k == AttrKind::Int && a->kind == AttrKind::Real)) {
        errors.push_back(where + "kind mismatch: " + type + "." + attr + " is " +
                         std::string(kind_name(a->kind)) + ", value is " +
                         std::string(kind_name(k)));
      }
    } catch (const TypeError& e) {
      errors.push_back(where + e.what());
    }
  };
  auto check_edge = [&](const std::string& type, const std::string& src, const std::string& tgt) {
    auto s = var_types.find(src);
    auto t = var_types.find(tgt);
    if (s == var_types.end() || t == var_types.end()) {
      errors.push_back(where + "edge " + type + " uses unknown variable '" +
                       (s == var_types.end() ? src : tgt) + "'");
      return;
    }
    const graph::EdgeTypeDef* def = mm.find_edge_type(s->second, type);
    if (!def) {
      errors.push_back(where + "no edge type '" + type + "' from " + s->second);
    } else if (def->target_type != t->second) {
      errors.push_back(where + "edge " + type + " targets " + def->target_type + ", not " +
                       t->second);
    }
  };

  for (const auto& a : rule.actions) {
    std::visit(Overloaded{
                   [&](const action::CreateNode& c) {
                     if (var_types.count(c.var)) {
                       errors.push_back(where + "variable '" + c.var + "' already bound");
                       return;
                     }
                     if (!mm.find_node_type(c.type)) {
                       errors.push_back(where + "unknown node type '" + c.type + "'");
                       return;
                     }
                     for (const auto& init : c.attrs) check_value(c.type, init.attr, init.value);
                     var_types[c.var] = c.type;
                   },
                   [&](const action::CreateEdge& c) { check_edge(c.type, c.src, c.tgt); },
                   [&](const action::DeleteEdge& c) { check_edge(c.type, c.src, c.tgt); },
                   [&](const action::DeleteNode& c) {
                     if (!var_types.count(c.var)) {
                       errors.push_back(where + "unknown variable '" + c.var + "'");
                     }
                   },
                   [&](const action::SetAttr& c) {
                     auto it = var_types.find(c.var);
                     if (it == var_types.end()) {
                       errors.push_back(where + "unknown variable '" + c.var + "'");
                       return;
                     }
                     check_value(it->second, c.attr, c.value);
                   }},
               a);
  }
  return errors;
}

std::string created_node_id(const GtRule& rule, const match::Match& match, std::string_view var) {
  return rule.name + "#" + match.fingerprint() + "#" + std::string(var);
}

std::string created_edge_id(const GtRule& rule, const match::Match& match,
                            std::size_t action_index) {
  return rule.name + "#" + match.fingerprint() + "#e" + std::to_string(action_index);
}

bool precheck(const graph::Model& model, const GtRule& rule, const match::Match& match) {
  return match.pattern() == rule.lhs.name && match::holds(rule.lhs, model, match.binding());
}

std::vector<graph::ChangeRecord> apply(graph::Model& model, const GtRule& rule,
                                       const match::Match& match) {
  if (!precheck(model, rule, match)) {
    throw InvalidMatch("rule " + rule.name + ": match " + match.fingerprint() +
                       " no longer holds");
  }
  const std::uint64_t start = model.version();
  std::map<std::string, std::string, std::less<>> ids(match.binding().begin(),
                                                      match.binding().end());
  auto id_of = [&](const std::string& var) -> const std::string& {
    auto it = ids.find(var);
    if (it == ids.end()) throw UnboundRef("rule " + rule.name + ": unbound variable '" + var + "'");
    return it->second;
  };
  auto resolve = [&](const AttrRef& ref) -> Value {
    if (ref.context) throw UnboundRef("context reference " + to_string(ref) + " in a rule");
    const graph::Node& n = model.node(id_of(ref.var));
    auto it = n.attrs.find(ref.attr);
    if (it == n.attrs.end()) {
      throw MissingAttribute("node '" + n.id + "' has no attribute '" + ref.attr + "'");
    }
    return it->second;
  };

  try {
    for (std::size_t i = 0; i < rule.actions.size(); ++i) {
      std::visit(
          Overloaded{
              [&](const action::CreateNode& c) {
                const graph::NodeTypeDef* type = model.metamodel().find_node_type(c.type);
                if (!type) throw TypeError("unknown node type '" + c.type + "'");
                graph::AttrMap attrs;
                for (const auto& def : type->attributes) attrs[def.name] = default_value(def.kind);
                for (const auto& init : c.attrs) attrs[init.attr] = evaluate(init.value, resolve);
                std::string id = created_node_id(rule, match, c.var);
                model.mutate(graph::change::CreateNode{id, c.type, std::move(attrs)});
                ids[c.var] = std::move(id);
              },
              [&](const action::CreateEdge& c) {
                model.mutate(graph::change::CreateEdge{created_edge_id(rule, match, i), c.type,
                                                       id_of(c.src), id_of(c.tgt)});
              },
              [&](const action::DeleteNode& c) {
                model.mutate(graph::change::DeleteNode{id_of(c.var)});
              },
              [&](const action::DeleteEdge& c) {
                const std::string& src = id_of(c.src);
                const std::string& tgt = id_of(c.tgt);
                for (const auto& eid : model.out_edges(src)) {
                  const graph::Edge* e = model.find_edge(eid);
                  if (e->type == c.type && e->tgt == tgt) {
                    model.mutate(graph::change::DeleteEdge{eid});
                    return;
                  }
                }
                throw NotFound("rule " + rule.name + ": no " + c.type + " edge " + src + " -> " +
                               tgt);
              },
              [&](const action::SetAttr& c) {
                model.mutate(
                    graph::change::SetAttr{id_of(c.var), c.attr, evaluate(c.value, resolve)});
              }},
          rule.actions[i]);
    }
  } catch (...) {
    model.rollback_to(start);
    throw;
  }

  const auto& journal = model.journal();
  return {journal.end() - static_cast<std::ptrdiff_t>(model.version() - start), journal.end()};
}

}  // namespace gips::rule
