#include "gips/overlay/overlay.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "gips/errors.hpp"

namespace gips::overlay {

namespace {
#include "overlay_spec.inc"
}

std::string_view overlay_spec_text() { return kOverlaySpecText; }

const dsl::Spec& overlay_spec() {
  static const dsl::Spec spec = dsl::load_spec(kOverlaySpecText, *overlay_metamodel());
  return spec;
}

graph::Model initial_model(const Config& c) {
  using namespace graph::change;
  graph::Model m(overlay_metamodel());
  const std::string net(kNetworkId), server(kServerId), data(kDataId), time(kTimeId);
  m.mutate(CreateNode{net, "Network", {}});
  m.mutate(CreateNode{server, "LectureStudioServer", {{"upload", c.server_upload}, {"slots", c.server_slots}}});
  m.mutate(CreateNode{data, "Data", {{"size", c.data_size}}});
  m.mutate(CreateNode{time, "Time", {{"t", 0.0}}});
  m.mutate(CreateEdge{net + "->" + server, "server", net, server});
  m.mutate(CreateEdge{net + "->" + time, "time", net, time});
  m.mutate(CreateEdge{server + "->" + data, "data", server, data});
  return m;
}

namespace {

using nlohmann::json;

double number_at(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ScenarioError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t int_at(const json& obj, const char* key, std::int64_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ScenarioError(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario s;
  if (doc.contains("server")) {
    const json& srv = doc.at("server");
    if (!srv.is_object()) throw ScenarioError("'server' must be an object");
    s.config.server_upload = number_at(srv, "upload", s.config.server_upload, "server");
    s.config.server_slots = int_at(srv, "slots", s.config.server_slots, "server");
  }
  if (doc.contains("data")) {
    const json& d = doc.at("data");
    if (!d.is_object()) throw ScenarioError("'data' must be an object");
    s.config.data_size = number_at(d, "size", s.config.data_size, "data");
  }
  s.config.client_slots = int_at(doc, "clientSlots", s.config.client_slots, "scenario");
  if (s.config.server_upload < 0 || s.config.data_size <= 0) throw ScenarioError("server upload and data size must be positive");
  if (s.config.server_slots < 1 || s.config.client_slots < 1) throw ScenarioError("slots must be at least 1");

  std::set<std::string> live;
  std::int64_t last_step = std::numeric_limits<std::int64_t>::min();
  if (doc.contains("events")) {
    const json& evs = doc.at("events");
    if (!evs.is_array()) throw ScenarioError("'events' must be an array");
    for (std::size_t k = 0; k < evs.size(); ++k) {
      const json& je = evs[k];
      const std::string where = "event " + std::to_string(k);
      if (!je.is_object()) throw ScenarioError(where + ": must be an object");
      Event e;
      e.step = int_at(je, "step", -1, where);
      if (!je.contains("step")) throw ScenarioError(where + ": missing 'step'");
      if (e.step < last_step) throw ScenarioError(where + ": steps must not decrease");
      last_step = e.step;
      if (!je.contains("op") || !je.at("op").is_string()) throw ScenarioError(where + ": missing 'op'");
      if (!je.contains("id") || !je.at("id").is_string()) throw ScenarioError(where + ": missing 'id'");
      const std::string op = je.at("op").get<std::string>();
      e.id = je.at("id").get<std::string>();
      if (e.id.empty() || e.id == kNetworkId || e.id == kServerId || e.id == kDataId || e.id == kTimeId ||
          e.id.find('#') != std::string::npos) {
        throw ScenarioError(where + ": invalid client id '" + e.id + "'");
      }
      if (op == "add") {
        e.op = Event::Op::Add;
        if (!je.contains("up") || !je.contains("down")) throw ScenarioError(where + ": add needs 'up' and 'down'");
        e.up = number_at(je, "up", 0, where);
        e.down = number_at(je, "down", 0, where);
        if (e.up < 0) throw ScenarioError(where + ": upload must not be negative");
        if (e.down <= 0) throw ScenarioError(where + ": download must be positive");
        if (!live.insert(e.id).second) throw ScenarioError(where + ": client '" + e.id + "' is already live");
      } else if (op == "remove") {
        e.op = Event::Op::Remove;
        if (!live.erase(e.id)) throw ScenarioError(where + ": client '" + e.id + "' is not live");
      } else {
        throw ScenarioError(where + ": unknown op '" + op + "'");
      }
      s.events.push_back(std::move(e));
    }
  }
  return s;
}

std::string to_json(const Scenario& s) {
  json evs = json::array();
  for (const auto& e : s.events) {
    json je = {{"step", e.step}, {"op", e.op == Event::Op::Add ? "add" : "remove"}, {"id", e.id}};
    if (e.op == Event::Op::Add) {
      je["up"] = e.up;
      je["down"] = e.down;
    }
    evs.push_back(std::move(je));
  }
  json doc = {{"server", {{"upload", s.config.server_upload}, {"slots", s.config.server_slots}}},
              {"data", {{"size", s.config.data_size}}},
              {"clientSlots", s.config.client_slots},
              {"events", evs}};
  return doc.dump(2) + "\n";
}

double candidate_bw(double parent_upload, double child_download, std::int64_t slots) {
  return std::min(parent_upload / static_cast<double>(slots), child_download);
}

double candidate_bw(const graph::Node& parent, const graph::Node& child) {
  auto get = [](const graph::Node& n, const char* attr) {
    auto it = n.attrs.find(attr);
    if (it == n.attrs.end()) throw MissingAttribute("node '" + n.id + "' has no attribute '" + attr + "'");
    return it->second;
  };
  std::int64_t slots = 1;
  if (auto it = parent.attrs.find("slots"); it != parent.attrs.end()) slots = std::get<std::int64_t>(it->second);
  return candidate_bw(as_number(get(parent, "upload")), as_number(get(child, "download")), slots);
}

void Monitor::add_client(graph::Model& model, const std::string& id, double up, double down) const {
  using namespace graph::change;
  if (model.find_node(id)) throw ScenarioError("client '" + id + "' already exists");
  const std::string server(kServerId);
  model.mutate(CreateNode{id, "Client",
                          {{"rc", false}, {"connected", false}, {"upload", up}, {"download", down},
                           {"slots", client_slots_}}});
  model.mutate(CreateEdge{server + "->" + id, "clients", server, id});
}

namespace {

// Link nodes of `type` whose `end` edge points at `node`.
std::vector<std::string> links_at(const graph::Model& m, std::string_view node, std::string_view type,
                                  std::string_view end) {
  std::vector<std::string> out;
  for (const auto& eid : m.in_edges(node)) {
    const graph::Edge& e = *m.find_edge(eid);
    if (e.type != end) continue;
    const graph::Node* l = m.find_node(e.src);
    if (l && l->type == type) out.push_back(l->id);
  }
  return out;
}

std::optional<std::string> link_end(const graph::Model& m, std::string_view link, std::string_view end) {
  for (const auto& eid : m.out_edges(link)) {
    const graph::Edge& e = *m.find_edge(eid);
    if (e.type == end) return e.tgt;
  }
  return std::nullopt;
}

void delete_link(graph::Model& m, const std::string& link) {
  const std::vector<std::string> edges(m.out_edges(link).begin(), m.out_edges(link).end());
  for (const auto& e : edges) m.mutate(graph::change::DeleteEdge{e});
  m.mutate(graph::change::DeleteNode{link});
}

}  // namespace

std::vector<std::string> Monitor::remove_client(graph::Model& model, const std::string& id) const {
  using namespace graph::change;
  const graph::Node* n = model.find_node(id);
  if (!n || n->type != "Client") throw ScenarioError("no live client '" + id + "'");
  std::vector<std::string> orphans;
  for (const auto& l : links_at(model, id, "P2PLink", "source")) {
    auto child = link_end(model, l, "target");
    delete_link(model, l);
    if (child) {
      model.mutate(SetAttr{*child, "connected", false});
      orphans.push_back(*child);
    }
  }
  for (const auto& l : links_at(model, id, "P2PLink", "target")) {
    auto parent = link_end(model, l, "source");
    delete_link(model, l);
    if (parent && links_at(model, *parent, "P2PLink", "source").empty() &&
        model.node(*parent).attrs.at("rc") == Value{true}) {
      model.mutate(SetAttr{*parent, "rc", false});
    }
  }
  for (const auto& con : links_at(model, id, "Connection", "target")) delete_link(model, con);
  const std::vector<std::string> rest(model.in_edges(id).begin(), model.in_edges(id).end());
  for (const auto& e : rest) model.mutate(DeleteEdge{e});
  const std::vector<std::string> out(model.out_edges(id).begin(), model.out_edges(id).end());
  for (const auto& e : out) model.mutate(DeleteEdge{e});
  model.mutate(DeleteNode{id});
  std::sort(orphans.begin(), orphans.end());
  return orphans;
}

}  // namespace gips::overlay
