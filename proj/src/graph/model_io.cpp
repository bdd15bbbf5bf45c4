#include <json.hpp>

#include "gips/errors.hpp"
#include "gips/graph/model.hpp"

namespace gips::graph {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

Value value_from_json(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ParseError(where + ": attribute values must be int, real, bool or string");
}

json value_to_json(const Value& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

}  // namespace

std::shared_ptr<const Metamodel> load_metamodel(std::string_view json_text) {
  const json doc = parse_json(json_text);
  std::vector<NodeTypeDef> node_types;
  std::vector<EdgeTypeDef> edge_types;
  const json& nts = field(doc, "nodeTypes", "metamodel");
  if (!nts.is_array()) throw ParseError("metamodel: nodeTypes must be an array");
  for (const auto& nt : nts) {
    NodeTypeDef def{string_field(nt, "name", "node type"), {}};
    if (nt.contains("attrs")) {
      for (const auto& a : nt.at("attrs")) {
        const std::string where = "node type '" + def.name + "'";
        const std::string kind_text = string_field(a, "kind", where);
        auto kind = parse_kind(kind_text);
        if (!kind) throw TypeError(where + ": unknown attribute kind '" + kind_text + "'");
        def.attributes.push_back({string_field(a, "name", where), *kind});
      }
    }
    node_types.push_back(std::move(def));
  }
  if (doc.contains("edgeTypes")) {
    for (const auto& et : doc.at("edgeTypes")) {
      edge_types.push_back({string_field(et, "name", "edge type"),
                            string_field(et, "src", "edge type"),
                            string_field(et, "tgt", "edge type")});
    }
  }
  return std::make_shared<const Metamodel>(std::move(node_types), std::move(edge_types));
}

std::string to_json(const Metamodel& metamodel) {
  json nts = json::array();
  for (const auto& t : metamodel.node_types()) {
    json attrs = json::array();
    for (const auto& a : t.attributes) {
      attrs.push_back({{"name", a.name}, {"kind", std::string(kind_name(a.kind))}});
    }
    nts.push_back({{"name", t.name}, {"attrs", attrs}});
  }
  json ets = json::array();
  for (const auto& e : metamodel.edge_types()) {
    ets.push_back({{"name", e.name}, {"src", e.source_type}, {"tgt", e.target_type}});
  }
  return json{{"nodeTypes", nts}, {"edgeTypes", ets}}.dump(2) + "\n";
}

namespace {

struct RawModel {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

RawModel parse_model(std::string_view json_text, const Metamodel& mm) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) throw ParseError("model: top level must be an object");
  RawModel raw;
  std::set<std::string> ids;
  if (doc.contains("nodes")) {
    for (const auto& jn : doc.at("nodes")) {
      Node n{string_field(jn, "id", "node"), {}, {}};
      const std::string where = "node '" + n.id + "'";
      n.type = string_field(jn, "type", where);
      if (!ids.insert(n.id).second) throw TypeError(where + ": duplicate id");
      const NodeTypeDef* type = mm.find_node_type(n.type);
      if (jn.contains("attrs")) {
        const json& attrs = jn.at("attrs");
        if (!attrs.is_object()) throw ParseError(where + ": attrs must be an object");
        for (auto it = attrs.begin(); it != attrs.end(); ++it) {
          Value v = value_from_json(it.value(), where);
          if (type) {
            if (const AttrDef* def = type->find_attr(it.key())) {
              if (auto c = coerce(v, def->kind)) v = std::move(*c);
            }
          }
          n.attrs[it.key()] = std::move(v);
        }
      }
      raw.nodes.push_back(std::move(n));
    }
  }
  std::set<std::string> edge_ids;
  if (doc.contains("edges")) {
    for (const auto& je : doc.at("edges")) {
      Edge e{string_field(je, "id", "edge"), {}, {}, {}};
      const std::string where = "edge '" + e.id + "'";
      e.type = string_field(je, "type", where);
      e.src = string_field(je, "src", where);
      e.tgt = string_field(je, "tgt", where);
      if (!edge_ids.insert(e.id).second) throw TypeError(where + ": duplicate id");
      raw.edges.push_back(std::move(e));
    }
  }
  return raw;
}

}  // namespace

Model load_model_unchecked(std::string_view json_text, std::shared_ptr<const Metamodel> metamodel) {
  RawModel raw = parse_model(json_text, *metamodel);
  Model m(std::move(metamodel));
  for (auto& n : raw.nodes) m.insert_unchecked(std::move(n));
  for (auto& e : raw.edges) m.insert_unchecked(std::move(e));
  return m;
}

Model load_model(std::string_view json_text, std::shared_ptr<const Metamodel> metamodel) {
  RawModel raw = parse_model(json_text, *metamodel);
  {
    Model probe(metamodel);
    for (const auto& n : raw.nodes) probe.insert_unchecked(n);
    for (const auto& e : raw.edges) probe.insert_unchecked(e);
    auto diags = validate(probe);
    if (!diags.empty()) {
      throw TypeError(diags.front().element_id + ": " + diags.front().reason);
    }
  }
  Model m(std::move(metamodel));
  for (auto& n : raw.nodes) m.mutate(change::CreateNode{n.id, n.type, std::move(n.attrs)});
  for (auto& e : raw.edges) m.mutate(change::CreateEdge{e.id, e.type, e.src, e.tgt});
  return m;
}

std::string to_json(const Model& model) {
  json nodes = json::array();
  for (const auto& [id, n] : model.nodes()) {
    json attrs = json::object();
    for (const auto& [name, v] : n.attrs) attrs[name] = value_to_json(v);
    nodes.push_back({{"id", n.id}, {"type", n.type}, {"attrs", attrs}});
  }
  json edges = json::array();
  for (const auto& [id, e] : model.edges()) {
    edges.push_back({{"id", e.id}, {"type", e.type}, {"src", e.src}, {"tgt", e.tgt}});
  }
  return json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

}  // namespace gips::graph
