#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gips/value.hpp"

namespace gips::graph {

struct AttrDef {
  std::string name;
  AttrKind kind = AttrKind::Int;

  friend bool operator==(const AttrDef&, const AttrDef&) = default;
};

struct NodeTypeDef {
  std::string name;
  std::vector<AttrDef> attributes;

  const AttrDef* find_attr(std::string_view attr) const;
  friend bool operator==(const NodeTypeDef&, const NodeTypeDef&) = default;
};

// Edge types are identified by (source_type, name).
struct EdgeTypeDef {
  std::string name;
  std::string source_type;
  std::string target_type;

  friend bool operator==(const EdgeTypeDef&, const EdgeTypeDef&) = default;
};

class Metamodel {
 public:
  // Throws TypeError if type names repeat, attribute names repeat within a
  // type, or an edge type references an unknown node type.
  Metamodel(std::vector<NodeTypeDef> node_types, std::vector<EdgeTypeDef> edge_types);

  const std::vector<NodeTypeDef>& node_types() const { return node_types_; }
  const std::vector<EdgeTypeDef>& edge_types() const { return edge_types_; }

  const NodeTypeDef* find_node_type(std::string_view name) const;
  const EdgeTypeDef* find_edge_type(std::string_view source_type, std::string_view name) const;

 private:
  std::vector<NodeTypeDef> node_types_;
  std::vector<EdgeTypeDef> edge_types_;
};

using NodeId = std::string;
using EdgeId = std::string;
using AttrMap = std::map<std::string, Value>;

struct Node {
  NodeId id;
  std::string type;
  AttrMap attrs;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  EdgeId id;
  std::string type;
  NodeId src;
  NodeId tgt;

  friend bool operator==(const Edge&, const Edge&) = default;
};

namespace change {
struct CreateNode {
  NodeId id;
  std::string type;
  AttrMap attrs;
};
struct DeleteNode {
  NodeId id;
};
struct CreateEdge {
  EdgeId id;
  std::string type;
  NodeId src;
  NodeId tgt;
};
struct DeleteEdge {
  EdgeId id;
};
struct SetAttr {
  NodeId node;
  std::string attr;
  Value value;
};
}  // namespace change

using Change = std::variant<change::CreateNode, change::DeleteNode, change::CreateEdge,
                            change::DeleteEdge, change::SetAttr>;

enum class ChangeKind { CreateNode, DeleteNode, CreateEdge, DeleteEdge, SetAttr };
std::string_view to_string(ChangeKind kind);

struct AttrChange {
  NodeId node;
  std::string attr;
  Value old_value;
  Value new_value;

  friend bool operator==(const AttrChange&, const AttrChange&) = default;
};

// One journal entry. Create/Delete records carry the full element so the
// journal can be replayed forwards and undone backwards.
struct ChangeRecord {
  std::uint64_t version = 0;
  ChangeKind kind = ChangeKind::CreateNode;
  std::variant<Node, Edge, AttrChange> payload;

  const std::string& element_id() const;
  friend bool operator==(const ChangeRecord&, const ChangeRecord&) = default;
};

struct Diagnostic {
  std::string element_id;
  std::string reason;
};

// Typed attributed graph with a change journal. Single writer; any number of
// readers between mutations.
class Model {
 public:
  explicit Model(std::shared_ptr<const Metamodel> metamodel);

  const Metamodel& metamodel() const { return *metamodel_; }
  const std::shared_ptr<const Metamodel>& metamodel_ptr() const { return metamodel_; }

  // Applies a checked change, bumps the version by one and appends the record.
  // Throws NotFound, TypeError or DanglingEdge; the model is unchanged then.
  const ChangeRecord& mutate(const Change& change);

  const Node* find_node(std::string_view id) const;
  const Edge* find_edge(std::string_view id) const;
  const Node& node(std::string_view id) const;  // throws NotFound

  const std::map<NodeId, Node, std::less<>>& nodes() const { return nodes_; }
  const std::map<EdgeId, Edge, std::less<>>& edges() const { return edges_; }

  const std::set<NodeId>& nodes_of_type(std::string_view type) const;
  const std::set<EdgeId>& out_edges(std::string_view node) const;
  const std::set<EdgeId>& in_edges(std::string_view node) const;

  // Whether an edge of `type` runs from `src` to `tgt`.
  bool has_edge(std::string_view type, std::string_view src, std::string_view tgt) const;

  std::uint64_t version() const { return version_; }
  const std::vector<ChangeRecord>& journal() const { return journal_; }
  // Records with version <= journal_base() have been dropped.
  std::uint64_t journal_base() const { return journal_base_; }

  // Undoes every record newer than `version`, restoring the exact earlier
  // state including the journal.
  void rollback_to(std::uint64_t version);

  // Drops journal records with version <= `version`. Replay from the empty
  // model is no longer possible afterwards.
  void truncate_journal(std::uint64_t version);

  // Unchecked structural edits without journaling, for loaders and tests that
  // need to construct invalid models. `validate` reports what they break.
  void insert_unchecked(Node node);
  void insert_unchecked(Edge edge);
  void erase_node_unchecked(std::string_view id);

  // Same node and edge sets (ids, types, attributes, endpoints).
  friend bool same_graph(const Model& a, const Model& b);

 private:
  void add_node(Node node);
  void remove_node(std::string_view id);
  void add_edge(Edge edge);
  void remove_edge(std::string_view id);
  void set_attr_raw(std::string_view node, const std::string& attr, Value value);
  void undo(const ChangeRecord& rec);

  std::shared_ptr<const Metamodel> metamodel_;
  std::map<NodeId, Node, std::less<>> nodes_;
  std::map<EdgeId, Edge, std::less<>> edges_;
  std::map<std::string, std::set<NodeId>, std::less<>> by_type_;
  std::map<NodeId, std::set<EdgeId>, std::less<>> out_;
  std::map<NodeId, std::set<EdgeId>, std::less<>> in_;
  std::vector<ChangeRecord> journal_;
  std::uint64_t version_ = 0;
  std::uint64_t journal_base_ = 0;
};

// Total check of every Node/Edge invariant. Empty iff the model is valid.
std::vector<Diagnostic> validate(const Model& model);

// Rebuilds a model by applying `records` to an empty model.
Model replay(std::shared_ptr<const Metamodel> metamodel, std::span<const ChangeRecord> records);

// JSON (de)serialization. See docs/formats.md.
std::shared_ptr<const Metamodel> load_metamodel(std::string_view json_text);
std::string to_json(const Metamodel& metamodel);

// Throws ParseError on malformed JSON and TypeError (naming the element) on
// any invariant violation. The journal holds one create record per element.
Model load_model(std::string_view json_text, std::shared_ptr<const Metamodel> metamodel);
// Parses without checking invariants and without journaling.
Model load_model_unchecked(std::string_view json_text, std::shared_ptr<const Metamodel> metamodel);
std::string to_json(const Model& model);

}  // namespace gips::graph
