#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gips/expr.hpp"
#include "gips/graph/model.hpp"
#include "gips/match/pattern.hpp"
#include "gips/rule/rule.hpp"
#include "gips/source_span.hpp"

namespace gips::dsl {

// `var == ctx.ctx_var`: the summed match's `var` must bind the same node as
// the forEach context's `ctx_var`.
struct Filter {
  std::string var;
  std::string ctx_var;
  SourceSpan span;
  friend bool operator==(const Filter&, const Filter&) = default;
};

struct SumRef {
  std::string mapping;
  std::vector<Filter> filters;
  SourceSpan span;
  friend bool operator==(const SumRef&, const SumRef&) = default;
};

// coeff * sum(...) when `sum` is set, otherwise the constant `coeff`.
// Inside a sum term, plain references (`v.attr`) read the summed match and
// `ctx.v.attr` reads the forEach context; constant terms may only use ctx.
struct LinearTerm {
  Expr coeff;
  std::optional<SumRef> sum;
  SourceSpan span;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

struct LinearExpr {
  std::vector<LinearTerm> terms;
  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

enum class Relation { Le, Eq, Ge };

struct MappingDecl {
  std::string name;
  std::string target;  // rule or pattern
  SourceSpan span;
  friend bool operator==(const MappingDecl&, const MappingDecl&) = default;
};

struct ConstraintDecl {
  std::optional<std::string> for_each;  // pattern or rule (its LHS)
  LinearExpr lhs;
  Relation relation = Relation::Le;
  LinearExpr rhs;
  SourceSpan span;
  friend bool operator==(const ConstraintDecl&, const ConstraintDecl&) = default;
};

struct ObjectiveDecl {
  bool maximize = false;
  LinearExpr expr;
  SourceSpan span;
  friend bool operator==(const ObjectiveDecl&, const ObjectiveDecl&) = default;
};

struct RuleDecl {
  rule::GtRule rule;
  // Set when the LHS is a named pattern; rule.lhs then is a copy of it.
  std::optional<std::string> lhs_pattern;
  friend bool operator==(const RuleDecl&, const RuleDecl&) = default;
};

struct Spec {
  std::optional<std::string> metamodel;
  std::vector<match::Pattern> patterns;
  std::vector<RuleDecl> rules;
  std::vector<MappingDecl> mappings;
  std::vector<ConstraintDecl> constraints;
  std::optional<ObjectiveDecl> objective;

  const match::Pattern* find_pattern(std::string_view name) const;
  const RuleDecl* find_rule(std::string_view name) const;
  const MappingDecl* find_mapping(std::string_view name) const;
  // Pattern a mapping or forEach target ranges over: the pattern itself or
  // the rule's LHS.
  const match::Pattern* target_pattern(std::string_view target) const;

  friend bool operator==(const Spec&, const Spec&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;
};

// "line:col: error: message"
std::string format(const Diagnostic& d);

struct ParseResult {
  Spec spec;
  std::vector<Diagnostic> diagnostics;
  bool ok() const;
};

// Syntax plus name resolution. Errors do not stop the scan; the returned
// spec holds everything that could be recovered.
ParseResult parse(std::string_view text);

// Types, attributes and variable references against `metamodel`.
std::vector<Diagnostic> typecheck(const Spec& spec, const graph::Metamodel& metamodel);

// Canonical source text; parse(pretty_print(s)) == s for parsed specs.
std::string pretty_print(const Spec& spec);
std::string pretty_print(const LinearExpr& e);

// Parses and typechecks; throws ParseError or TypeError with all diagnostics.
Spec load_spec(std::string_view text, const graph::Metamodel& metamodel);

}  // namespace gips::dsl
