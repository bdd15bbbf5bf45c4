#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gips/graph/model.hpp"
#include "gips/match/pattern.hpp"

namespace gips::rule {

struct AttrInit {
  std::string attr;
  Expr value;

  friend bool operator==(const AttrInit&, const AttrInit&) = default;
};

namespace action {
// Attributes not listed in `attrs` start at their kind's default.
struct CreateNode {
  std::string var;
  std::string type;
  std::vector<AttrInit> attrs;
  SourceSpan span;
  friend bool operator==(const CreateNode&, const CreateNode&) = default;
};
struct CreateEdge {
  std::string type;
  std::string src;
  std::string tgt;
  SourceSpan span;
  friend bool operator==(const CreateEdge&, const CreateEdge&) = default;
};
// Guarded: fails if the node still has incident edges.
struct DeleteNode {
  std::string var;
  SourceSpan span;
  friend bool operator==(const DeleteNode&, const DeleteNode&) = default;
};
struct DeleteEdge {
  std::string type;
  std::string src;
  std::string tgt;
  SourceSpan span;
  friend bool operator==(const DeleteEdge&, const DeleteEdge&) = default;
};
// `value` is evaluated against the model state when the action runs.
struct SetAttr {
  std::string var;
  std::string attr;
  Expr value;
  SourceSpan span;
  friend bool operator==(const SetAttr&, const SetAttr&) = default;
};
}  // namespace action

using Action = std::variant<action::CreateNode, action::CreateEdge, action::DeleteNode,
                            action::DeleteEdge, action::SetAttr>;

struct GtRule {
  std::string name;
  match::Pattern lhs;
  std::vector<Action> actions;
  SourceSpan span;

  friend bool operator==(const GtRule&, const GtRule&) = default;
};

// Problems with the rule's actions against the metamodel (the LHS is checked
// separately with match::pattern_errors).
std::vector<std::string> rule_errors(const GtRule& rule, const graph::Metamodel& metamodel);

// Id given to the element created by action `action_index` (nodes use the
// created variable name instead): `rule#fingerprint#var` or `rule#fingerprint#e<k>`.
std::string created_node_id(const GtRule& rule, const match::Match& match, std::string_view var);
std::string created_edge_id(const GtRule& rule, const match::Match& match, std::size_t action_index);

// True iff every bound element still exists and every LHS edge and condition
// still holds.
bool precheck(const graph::Model& model, const GtRule& rule, const match::Match& match);

// Runs the rule's actions in order. Throws InvalidMatch (model untouched) if
// the precheck fails; any mutation error rolls back this application and is
// rethrown. Returns the appended journal records.
std::vector<graph::ChangeRecord> apply(graph::Model& model, const GtRule& rule,
                                       const match::Match& match);

}  // namespace gips::rule
