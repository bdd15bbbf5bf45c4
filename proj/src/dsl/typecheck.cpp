#include "gips/dsl/spec.hpp"
#include "gips/errors.hpp"

namespace gips::dsl {

namespace {

class Checker {
 public:
  Checker(const Spec& spec, const graph::Metamodel& mm) : spec_(spec), mm_(mm) {}

  std::vector<Diagnostic> run() {
    for (const auto& p : spec_.patterns) {
      for (const auto& msg : match::pattern_errors(p, mm_)) error(p.span, msg);
    }
    for (const auto& r : spec_.rules) {
      if (!r.lhs_pattern) {
        for (const auto& msg : match::pattern_errors(r.rule.lhs, mm_)) error(r.rule.span, msg);
      }
      for (const auto& msg : rule::rule_errors(r.rule, mm_)) error(r.rule.span, msg);
    }
    for (const auto& c : spec_.constraints) {
      const match::Pattern* ctx = c.for_each ? spec_.target_pattern(*c.for_each) : nullptr;
      linear(c.lhs, ctx);
      linear(c.rhs, ctx);
    }
    if (spec_.objective) linear(spec_.objective->expr, nullptr);
    return std::move(diags_);
  }

 private:
  void error(const SourceSpan& span, std::string msg) { diags_.push_back({Severity::Error, span, std::move(msg)}); }

  const graph::NodeTypeDef* var_type(const match::Pattern* p, std::string_view var) const {
    if (!p) return nullptr;
    const match::PatternNode* n = p->find_var(var);
    return n ? mm_.find_node_type(n->type) : nullptr;
  }

  void linear(const LinearExpr& e, const match::Pattern* ctx) {
    for (const auto& t : e.terms) {
      const match::Pattern* summed = nullptr;
      if (t.sum) {
        if (const MappingDecl* m = spec_.find_mapping(t.sum->mapping)) summed = spec_.target_pattern(m->target);
        for (const auto& f : t.sum->filters) {
          const match::PatternNode* a = summed ? summed->find_var(f.var) : nullptr;
          const match::PatternNode* b = ctx ? ctx->find_var(f.ctx_var) : nullptr;
          if (a && b && a->type != b->type) {
            error(f.span, "filter compares " + f.var + ": " + a->type + " with ctx." + f.ctx_var + ": " + b->type);
          }
        }
      }
      auto ref_kind = [&](const AttrRef& ref, const SourceSpan&) -> AttrKind {
        const graph::NodeTypeDef* type = var_type(ref.context ? ctx : summed, ref.var);
        if (!type) throw TypeError("unresolved reference " + to_string(ref));
        const graph::AttrDef* attr = type->find_attr(ref.attr);
        if (!attr) throw TypeError("type " + type->name + " has no attribute '" + ref.attr + "'");
        return attr->kind;
      };
      try {
        const AttrKind k = infer_kind(t.coeff, ref_kind);
        if (!is_numeric(k)) {
          error(t.span, "coefficient " + to_source(t.coeff) + " is " + std::string(kind_name(k)) +
                            ", expected a number");
        }
      } catch (const TypeError& ex) {
        error(t.span, ex.what());
      }
    }
  }

  const Spec& spec_;
  const graph::Metamodel& mm_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> typecheck(const Spec& spec, const graph::Metamodel& metamodel) {
  return Checker(spec, metamodel).run();
}

}  // namespace gips::dsl
