#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gips/expr.hpp"
#include "gips/graph/model.hpp"

namespace gips::match {

struct PatternNode {
  std::string var;
  std::string type;
  SourceSpan span;

  friend bool operator==(const PatternNode&, const PatternNode&) = default;
};

// Requires an edge named `type` from the node bound to `src` to the node bound
// to `tgt`. The edge type is resolved against the source variable's type.
struct PatternEdge {
  std::string type;
  std::string src;
  std::string tgt;
  SourceSpan span;

  friend bool operator==(const PatternEdge&, const PatternEdge&) = default;
};

struct AttrCondition {
  Expr lhs;
  CmpOp op = CmpOp::Eq;
  Expr rhs;
  SourceSpan span;

  friend bool operator==(const AttrCondition&, const AttrCondition&) = default;
};

// Positive graph pattern. Matching is always injective.
struct Pattern {
  std::string name;
  std::vector<PatternNode> nodes;
  std::vector<PatternEdge> edges;
  std::vector<AttrCondition> conditions;
  SourceSpan span;

  const PatternNode* find_var(std::string_view var) const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Adds `link: type` plus `link -source-> from` and `link -target-> to`, the
// encoding of reified links.
void add_link(Pattern& pattern, std::string link_var, std::string link_type, std::string from,
              std::string to, SourceSpan span = {});

// Problems that make `pattern` unusable against `metamodel`: unknown types,
// edge types or attributes, undeclared or duplicate variables, context
// references, incomparable condition operands.
std::vector<std::string> pattern_errors(const Pattern& pattern, const graph::Metamodel& metamodel);

using Binding = std::map<std::string, graph::NodeId, std::less<>>;

class Match {
 public:
  Match() = default;
  Match(std::string pattern, Binding binding);

  const std::string& pattern() const { return pattern_; }
  const Binding& binding() const { return binding_; }
  // `pattern(var=id,...)` with variables in sorted order.
  const std::string& fingerprint() const { return fingerprint_; }

  const graph::NodeId& at(std::string_view var) const;

  friend bool operator==(const Match& a, const Match& b) { return a.fingerprint_ == b.fingerprint_; }
  friend auto operator<=>(const Match& a, const Match& b) { return a.fingerprint_ <=> b.fingerprint_; }

 private:
  std::string pattern_;
  Binding binding_;
  std::string fingerprint_;
};

// All injective bindings of `pattern` in `model` satisfying every edge and
// condition, sorted by fingerprint. Throws TypeError if the pattern does not
// fit the model's metamodel.
std::vector<Match> find_matches(const Pattern& pattern, const graph::Model& model);

// Matches that bind `seed_node` to some variable of the pattern.
std::vector<Match> find_matches_through(const Pattern& pattern, const graph::Model& model,
                                        std::string_view seed_node);

// Whether `binding` is still a match of `pattern` in `model`.
bool holds(const Pattern& pattern, const graph::Model& model, const Binding& binding);

}  // namespace gips::match
