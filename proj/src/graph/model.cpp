#include "gips/graph/model.hpp"

#include <algorithm>

#include "gips/errors.hpp"

namespace gips::graph {

namespace {

const std::set<std::string> kEmptySet;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

const AttrDef* NodeTypeDef::find_attr(std::string_view attr) const {
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const AttrDef& a) { return a.name == attr; });
  return it == attributes.end() ? nullptr : &*it;
}

Metamodel::Metamodel(std::vector<NodeTypeDef> node_types, std::vector<EdgeTypeDef> edge_types)
    : node_types_(std::move(node_types)), edge_types_(std::move(edge_types)) {
  std::set<std::string> seen;
  for (const auto& t : node_types_) {
    if (!seen.insert(t.name).second) throw TypeError("duplicate node type '" + t.name + "'");
    std::set<std::string> attrs;
    for (const auto& a : t.attributes) {
      if (!attrs.insert(a.name).second) {
        throw TypeError("duplicate attribute '" + a.name + "' in node type '" + t.name + "'");
      }
    }
  }
  std::set<std::pair<std::string, std::string>> edge_keys;
  for (const auto& e : edge_types_) {
    if (!seen.count(e.source_type) || !seen.count(e.target_type)) {
      throw TypeError("edge type '" + e.name + "' references an unknown node type");
    }
    if (!edge_keys.emplace(e.source_type, e.name).second) {
      throw TypeError("duplicate edge type '" + e.name + "' on '" + e.source_type + "'");
    }
  }
}

const NodeTypeDef* Metamodel::find_node_type(std::string_view name) const {
  for (const auto& t : node_types_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const EdgeTypeDef* Metamodel::find_edge_type(std::string_view source_type,
                                             std::string_view name) const {
  for (const auto& e : edge_types_) {
    if (e.source_type == source_type && e.name == name) return &e;
  }
  return nullptr;
}

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::CreateNode: return "CreateNode";
    case ChangeKind::DeleteNode: return "DeleteNode";
    case ChangeKind::CreateEdge: return "CreateEdge";
    case ChangeKind::DeleteEdge: return "DeleteEdge";
    case ChangeKind::SetAttr: return "SetAttr";
  }
  return "?";
}

const std::string& ChangeRecord::element_id() const {
  return std::visit(Overloaded{[](const Node& n) -> const std::string& { return n.id; },
                               [](const Edge& e) -> const std::string& { return e.id; },
                               [](const AttrChange& a) -> const std::string& { return a.node; }},
                    payload);
}

Model::Model(std::shared_ptr<const Metamodel> metamodel) : metamodel_(std::move(metamodel)) {
  if (!metamodel_) throw TypeError("model needs a metamodel");
}

const Node* Model::find_node(std::string_view id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* Model::find_edge(std::string_view id) const {
  auto it = edges_.find(id);
  return it == edges_.end() ? nullptr : &it->second;
}

const Node& Model::node(std::string_view id) const {
  if (const Node* n = find_node(id)) return *n;
  throw NotFound("no node '" + std::string(id) + "'");
}

const std::set<NodeId>& Model::nodes_of_type(std::string_view type) const {
  auto it = by_type_.find(type);
  return it == by_type_.end() ? kEmptySet : it->second;
}

const std::set<EdgeId>& Model::out_edges(std::string_view node) const {
  auto it = out_.find(node);
  return it == out_.end() ? kEmptySet : it->second;
}

const std::set<EdgeId>& Model::in_edges(std::string_view node) const {
  auto it = in_.find(node);
  return it == in_.end() ? kEmptySet : it->second;
}

bool Model::has_edge(std::string_view type, std::string_view src, std::string_view tgt) const {
  for (const auto& eid : out_edges(src)) {
    const Edge& e = edges_.find(eid)->second;
    if (e.tgt == tgt && e.type == type) return true;
  }
  return false;
}

void Model::add_node(Node node) {
  by_type_[node.type].insert(node.id);
  const std::string id = node.id;
  nodes_.emplace(id, std::move(node));
}

void Model::remove_node(std::string_view id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return;
  auto t = by_type_.find(it->second.type);
  if (t != by_type_.end()) {
    t->second.erase(it->second.id);
    if (t->second.empty()) by_type_.erase(t);
  }
  if (auto o = out_.find(id); o != out_.end() && o->second.empty()) out_.erase(o);
  if (auto i = in_.find(id); i != in_.end() && i->second.empty()) in_.erase(i);
  nodes_.erase(it);
}

void Model::add_edge(Edge edge) {
  out_[edge.src].insert(edge.id);
  in_[edge.tgt].insert(edge.id);
  const std::string id = edge.id;
  edges_.emplace(id, std::move(edge));
}

void Model::remove_edge(std::string_view id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) return;
  const Edge& e = it->second;
  if (auto o = out_.find(e.src); o != out_.end()) {
    o->second.erase(e.id);
    if (o->second.empty()) out_.erase(o);
  }
  if (auto i = in_.find(e.tgt); i != in_.end()) {
    i->second.erase(e.id);
    if (i->second.empty()) in_.erase(i);
  }
  edges_.erase(it);
}

void Model::set_attr_raw(std::string_view node, const std::string& attr, Value value) {
  nodes_.find(node)->second.attrs[attr] = std::move(value);
}

const ChangeRecord& Model::mutate(const Change& change) {
  ChangeRecord rec;
  rec.version = version_ + 1;
  std::visit(
      Overloaded{
          [&](const change::CreateNode& c) {
            if (nodes_.count(c.id)) throw TypeError("node id '" + c.id + "' already exists");
            const NodeTypeDef* type = metamodel_->find_node_type(c.type);
            if (!type) throw TypeError("node '" + c.id + "': unknown type '" + c.type + "'");
            Node n{c.id, c.type, {}};
            for (const auto& [name, value] : c.attrs) {
              const AttrDef* def = type->find_attr(name);
              if (!def) {
                throw TypeError("node '" + c.id + "': type " + c.type + " has no attribute '" +
                                name + "'");
              }
              auto v = coerce(value, def->kind);
              if (!v) {
                throw TypeError("node '" + c.id + "': attribute '" + name + "' must be " +
                                std::string(kind_name(def->kind)));
              }
              n.attrs[name] = std::move(*v);
            }
            for (const auto& def : type->attributes) {
              if (!n.attrs.count(def.name)) {
                throw TypeError("node '" + c.id + "': missing attribute '" + def.name + "'");
              }
            }
            rec.kind = ChangeKind::CreateNode;
            rec.payload = n;
            add_node(std::move(n));
          },
          [&](const change::DeleteNode& c) {
            const Node* n = find_node(c.id);
            if (!n) throw NotFound("no node '" + c.id + "'");
            if (!out_edges(c.id).empty() || !in_edges(c.id).empty()) {
              throw DanglingEdge("node '" + c.id + "' still has incident edges");
            }
            rec.kind = ChangeKind::DeleteNode;
            rec.payload = *n;
            remove_node(c.id);
          },
          [&](const change::CreateEdge& c) {
            if (edges_.count(c.id)) throw TypeError("edge id '" + c.id + "' already exists");
            const Node* src = find_node(c.src);
            const Node* tgt = find_node(c.tgt);
            if (!src) throw NotFound("edge '" + c.id + "': no source node '" + c.src + "'");
            if (!tgt) throw NotFound("edge '" + c.id + "': no target node '" + c.tgt + "'");
            const EdgeTypeDef* type = metamodel_->find_edge_type(src->type, c.type);
            if (!type) {
              throw TypeError("edge '" + c.id + "': no edge type '" + c.type + "' from " +
                              src->type);
            }
            if (type->target_type != tgt->type) {
              throw TypeError("edge '" + c.id + "': target must be " + type->target_type +
                              ", got " + tgt->type);
            }
            Edge e{c.id, c.type, c.src, c.tgt};
            rec.kind = ChangeKind::CreateEdge;
            rec.payload = e;
            add_edge(std::move(e));
          },
          [&](const change::DeleteEdge& c) {
            const Edge* e = find_edge(c.id);
            if (!e) throw NotFound("no edge '" + c.id + "'");
            rec.kind = ChangeKind::DeleteEdge;
            rec.payload = *e;
            remove_edge(c.id);
          },
          [&](const change::SetAttr& c) {
            const Node* n = find_node(c.node);
            if (!n) throw NotFound("no node '" + c.node + "'");
            const AttrDef* def = metamodel_->find_node_type(n->type)->find_attr(c.attr);
            if (!def) {
              throw TypeError("node '" + c.node + "': type " + n->type + " has no attribute '" +
                              c.attr + "'");
            }
            auto v = coerce(c.value, def->kind);
            if (!v) {
              throw TypeError("node '" + c.node + "': attribute '" + c.attr + "' must be " +
                              std::string(kind_name(def->kind)));
            }
            auto old_it = n->attrs.find(c.attr);
            Value old_value = old_it == n->attrs.end() ? default_value(def->kind) : old_it->second;
            rec.kind = ChangeKind::SetAttr;
            rec.payload = AttrChange{c.node, c.attr, std::move(old_value), *v};
            set_attr_raw(c.node, c.attr, std::move(*v));
          }},
      change);
  version_ = rec.version;
  journal_.push_back(std::move(rec));
  return journal_.back();
}

void Model::undo(const ChangeRecord& rec) {
  switch (rec.kind) {
    case ChangeKind::CreateNode: remove_node(std::get<Node>(rec.payload).id); break;
    case ChangeKind::DeleteNode: add_node(std::get<Node>(rec.payload)); break;
    case ChangeKind::CreateEdge: remove_edge(std::get<Edge>(rec.payload).id); break;
    case ChangeKind::DeleteEdge: add_edge(std::get<Edge>(rec.payload)); break;
    case ChangeKind::SetAttr: {
      const auto& a = std::get<AttrChange>(rec.payload);
      set_attr_raw(a.node, a.attr, a.old_value);
      break;
    }
  }
}

void Model::rollback_to(std::uint64_t version) {
  if (version < journal_base_) {
    throw StaleState("cannot roll back below truncated journal base " +
                     std::to_string(journal_base_));
  }
  while (!journal_.empty() && journal_.back().version > version) {
    undo(journal_.back());
    journal_.pop_back();
  }
  version_ = std::min(version_, version);
}

void Model::truncate_journal(std::uint64_t version) {
  version = std::min(version, version_);
  auto keep = std::find_if(journal_.begin(), journal_.end(),
                           [&](const ChangeRecord& r) { return r.version > version; });
  journal_.erase(journal_.begin(), keep);
  journal_base_ = std::max(journal_base_, version);
}

void Model::insert_unchecked(Node node) {
  remove_node(node.id);
  add_node(std::move(node));
}

void Model::insert_unchecked(Edge edge) {
  remove_edge(edge.id);
  add_edge(std::move(edge));
}

void Model::erase_node_unchecked(std::string_view id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return;
  auto t = by_type_.find(it->second.type);
  if (t != by_type_.end()) t->second.erase(it->second.id);
  nodes_.erase(it);
}

bool same_graph(const Model& a, const Model& b) {
  return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
}

std::vector<Diagnostic> validate(const Model& model) {
  std::vector<Diagnostic> out;
  const Metamodel& mm = model.metamodel();
  for (const auto& [id, n] : model.nodes()) {
    const NodeTypeDef* type = mm.find_node_type(n.type);
    if (!type) {
      out.push_back({id, "unknown node type '" + n.type + "'"});
      continue;
    }
    for (const auto& def : type->attributes) {
      auto it = n.attrs.find(def.name);
      if (it == n.attrs.end()) {
        out.push_back({id, "missing attribute '" + def.name + "'"});
      } else if (kind_of(it->second) != def.kind) {
        out.push_back({id, "attribute '" + def.name + "' has kind " +
                               std::string(kind_name(kind_of(it->second))) + ", expected " +
                               std::string(kind_name(def.kind))});
      }
    }
    for (const auto& [name, value] : n.attrs) {
      if (!type->find_attr(name)) out.push_back({id, "undeclared attribute '" + name + "'"});
    }
  }
  for (const auto& [id, e] : model.edges()) {
    const Node* src = model.find_node(e.src);
    const Node* tgt = model.find_node(e.tgt);
    if (!src || !tgt) {
      out.push_back({id, std::string("dangling ") + (!src ? "source '" + e.src + "'"
                                                          : "target '" + e.tgt + "'")});
      continue;
    }
    const EdgeTypeDef* type = mm.find_edge_type(src->type, e.type);
    if (!type) {
      out.push_back({id, "no edge type '" + e.type + "' from " + src->type});
    } else if (type->target_type != tgt->type) {
      out.push_back({id, "target must be " + type->target_type + ", got " + tgt->type});
    }
  }
  return out;
}

Model replay(std::shared_ptr<const Metamodel> metamodel, std::span<const ChangeRecord> records) {
  Model m(std::move(metamodel));
  for (const auto& rec : records) {
    switch (rec.kind) {
      case ChangeKind::CreateNode: {
        const auto& n = std::get<Node>(rec.payload);
        m.mutate(change::CreateNode{n.id, n.type, n.attrs});
        break;
      }
      case ChangeKind::DeleteNode:
        m.mutate(change::DeleteNode{std::get<Node>(rec.payload).id});
        break;
      case ChangeKind::CreateEdge: {
        const auto& e = std::get<Edge>(rec.payload);
        m.mutate(change::CreateEdge{e.id, e.type, e.src, e.tgt});
        break;
      }
      case ChangeKind::DeleteEdge:
        m.mutate(change::DeleteEdge{std::get<Edge>(rec.payload).id});
        break;
      case ChangeKind::SetAttr: {
        const auto& a = std::get<AttrChange>(rec.payload);
        m.mutate(change::SetAttr{a.node, a.attr, a.new_value});
        break;
      }
    }
  }
  return m;
}

}  // namespace gips::graph
