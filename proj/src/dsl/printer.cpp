#include "gips/dsl/spec.hpp"

namespace gips::dsl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_one(const Expr& e) {
  return e.kind() == Expr::Kind::Literal && e.value() == Value{std::int64_t{1}};
}

void pattern_body(std::string& out, const match::Pattern& p, const std::string& indent) {
  for (const auto& n : p.nodes) out += indent + n.var + ": " + n.type + "\n";
  for (const auto& e : p.edges) out += indent + e.src + " -" + e.type + "-> " + e.tgt + "\n";
  for (const auto& c : p.conditions) {
    out += indent + "require " + to_source(c.lhs) + " " + std::string(op_symbol(c.op)) + " " +
           to_source(c.rhs) + "\n";
  }
}

std::string inits(const std::vector<rule::AttrInit>& xs) {
  if (xs.empty()) return "";
  std::string s = " {";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s += (i ? ", " : " ") + xs[i].attr + " = " + to_source(xs[i].value);
  }
  return s + " }";
}

std::string_view relation_symbol(Relation r) {
  switch (r) {
    case Relation::Le: return "<=";
    case Relation::Eq: return "=";
    case Relation::Ge: return ">=";
  }
  return "?";
}

}  // namespace

std::string pretty_print(const LinearExpr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const auto& t = e.terms[i];
    if (i) out += " + ";
    if (!t.sum) {
      out += to_source(t.coeff);
      continue;
    }
    if (!is_one(t.coeff)) out += to_source(t.coeff) + " * ";
    out += "sum(" + t.sum->mapping;
    for (std::size_t k = 0; k < t.sum->filters.size(); ++k) {
      out += (k ? " and " : " where ") + t.sum->filters[k].var + " == ctx." + t.sum->filters[k].ctx_var;
    }
    out += ")";
  }
  return out;
}

std::string pretty_print(const Spec& spec) {
  std::string out;
  if (spec.metamodel) out += "metamodel \"" + *spec.metamodel + "\"\n\n";
  for (const auto& p : spec.patterns) {
    out += "pattern " + p.name + " {\n";
    pattern_body(out, p, "  ");
    out += "}\n\n";
  }
  for (const auto& d : spec.rules) {
    const auto& r = d.rule;
    out += "rule " + r.name + " {\n";
    if (d.lhs_pattern) {
      out += "  lhs " + *d.lhs_pattern + "\n";
    } else {
      out += "  lhs {\n";
      pattern_body(out, r.lhs, "    ");
      out += "  }\n";
    }
    out += "  do {\n";
    for (const auto& a : r.actions) {
      out += "    ";
      std::visit(Overloaded{
                     [&](const rule::action::CreateNode& c) { out += "create " + c.var + ": " + c.type + inits(c.attrs); },
                     [&](const rule::action::CreateEdge& c) { out += "create " + c.src + " -" + c.type + "-> " + c.tgt; },
                     [&](const rule::action::DeleteNode& c) { out += "delete " + c.var; },
                     [&](const rule::action::DeleteEdge& c) { out += "delete " + c.src + " -" + c.type + "-> " + c.tgt; },
                     [&](const rule::action::SetAttr& c) {
                       out += "set " + c.var + "." + c.attr + " := " + to_source(c.value);
                     }},
                 a);
      out += "\n";
    }
    out += "  }\n}\n\n";
  }
  for (const auto& m : spec.mappings) out += "mapping " + m.name + " to " + m.target + "\n";
  if (!spec.mappings.empty()) out += "\n";
  for (const auto& c : spec.constraints) {
    out += "constraint";
    if (c.for_each) out += " forEach " + *c.for_each;
    out += ": " + pretty_print(c.lhs) + " " + std::string(relation_symbol(c.relation)) + " " + pretty_print(c.rhs) + "\n";
  }
  if (!spec.constraints.empty()) out += "\n";
  if (spec.objective) {
    out += std::string(spec.objective->maximize ? "maximize" : "minimize") + ": " +
           pretty_print(spec.objective->expr) + "\n";
  }
  return out;
}

}  // namespace gips::dsl
