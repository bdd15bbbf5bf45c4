#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gips/errors.hpp"
#include "gips/overlay/overlay.hpp"

namespace gips::overlay {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::RoleCount: return "RoleCount";
    case ViolationKind::RelayNoChild: return "RelayNoChild";
    case ViolationKind::ParentNotRelay: return "ParentNotRelay";
    case ViolationKind::CapacityServer: return "CapacityServer";
    case ViolationKind::CapacityRelay: return "CapacityRelay";
    case ViolationKind::MultiParent: return "MultiParent";
    case ViolationKind::DepthExceeded: return "DepthExceeded";
    case ViolationKind::Disconnected: return "Disconnected";
  }
  return "?";
}

namespace {

struct Link {
  std::string id;
  bool p2p = false;
  std::string src;
  std::string tgt;
  double bw = 0.0;
};

struct View {
  std::vector<std::string> clients;
  std::vector<std::string> servers;
  std::vector<Link> links;  // by id
  std::map<std::string, std::vector<const Link*>> incoming;
  std::map<std::string, std::vector<const Link*>> outgoing;
};

std::string endpoint(const graph::Model& m, const std::string& link, std::string_view end) {
  for (const auto& eid : m.out_edges(link)) {
    const graph::Edge& e = *m.find_edge(eid);
    if (e.type == end) return e.tgt;
  }
  return {};
}

double num_attr(const graph::Node& n, const char* attr) {
  auto it = n.attrs.find(attr);
  if (it == n.attrs.end()) throw MissingAttribute("node '" + n.id + "' has no attribute '" + attr + "'");
  return as_number(it->second);
}

bool flag(const graph::Node& n, const char* attr) {
  auto it = n.attrs.find(attr);
  return it != n.attrs.end() && it->second == Value{true};
}

View make_view(const graph::Model& m) {
  View v;
  const auto& clients = m.nodes_of_type("Client");
  v.clients.assign(clients.begin(), clients.end());
  const auto& servers = m.nodes_of_type("LectureStudioServer");
  v.servers.assign(servers.begin(), servers.end());
  for (const char* type : {"Connection", "P2PLink"}) {
    for (const auto& id : m.nodes_of_type(type)) {
      Link l{id, std::string_view(type) == "P2PLink", endpoint(m, id, "source"), endpoint(m, id, "target"),
             num_attr(m.node(id), "bw")};
      if (l.src.empty() || l.tgt.empty()) continue;
      v.links.push_back(std::move(l));
    }
  }
  std::sort(v.links.begin(), v.links.end(), [](const Link& a, const Link& b) { return a.id < b.id; });
  for (const auto& l : v.links) {
    v.incoming[l.tgt].push_back(&l);
    v.outgoing[l.src].push_back(&l);
  }
  return v;
}

bool over_capacity(double used, double upload) { return used > upload + 1e-9 * std::max(1.0, upload); }

}  // namespace

std::vector<Violation> verify_topology(const graph::Model& model) {
  const View v = make_view(model);
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::vector<std::string> elems, std::string detail) {
    out.push_back({k, std::move(elems), std::move(detail)});
  };

  for (const auto& id : v.servers) {
    const graph::Node& s = model.node(id);
    double used = 0.0;
    std::vector<std::string> elems{id};
    auto it = v.outgoing.find(id);
    if (it != v.outgoing.end()) {
      for (const Link* l : it->second) {
        used += l->bw;
        elems.push_back(l->id);
      }
    }
    const double up = num_attr(s, "upload");
    if (over_capacity(used, up)) {
      add(ViolationKind::CapacityServer, elems, format_double(used) + " > " + format_double(up));
    }
  }

  for (const auto& id : v.clients) {
    const graph::Node& c = model.node(id);
    auto in_it = v.incoming.find(id);
    const std::vector<const Link*> none;
    const auto& in = in_it == v.incoming.end() ? none : in_it->second;
    auto out_it = v.outgoing.find(id);
    const auto& outl = out_it == v.outgoing.end() ? none : out_it->second;
    const bool rc = flag(c, "rc");
    const bool connected = flag(c, "connected");

    if (in.empty()) {
      add(ViolationKind::Disconnected, {id}, "no parent");
    } else if (in.size() > 1) {
      std::vector<std::string> elems{id};
      for (const Link* l : in) elems.push_back(l->src);
      add(ViolationKind::MultiParent, elems, std::to_string(in.size()) + " parents");
    }
    if (connected != !in.empty()) {
      add(ViolationKind::RoleCount, {id}, connected ? "connected without a parent" : "has a parent but connected=false");
    }
    const bool via_server = std::any_of(in.begin(), in.end(), [](const Link* l) { return !l->p2p; });
    const bool via_peer = std::any_of(in.begin(), in.end(), [](const Link* l) { return l->p2p; });
    if (rc && via_peer) add(ViolationKind::RoleCount, {id}, "relay is itself relayed");

    std::size_t children = 0;
    double used = 0.0;
    std::vector<std::string> link_ids{id};
    for (const Link* l : outl) {
      if (!l->p2p) continue;
      ++children;
      used += l->bw;
      link_ids.push_back(l->id);
    }
    if (rc && children == 0) add(ViolationKind::RelayNoChild, {id}, "relay without P2P children");
    if (rc && !via_server && !in.empty()) add(ViolationKind::RelayNoChild, {id}, "relay without a server connection");
    if (!rc && children > 0) add(ViolationKind::ParentNotRelay, {id}, "forwards without rc");
    const double up = num_attr(c, "upload");
    if (children > 0 && over_capacity(used, up)) {
      add(ViolationKind::CapacityRelay, link_ids, format_double(used) + " > " + format_double(up));
    }

    // depth: number of links from a server; cycles count as unbounded
    std::string cur = id;
    std::set<std::string> seen{cur};
    std::size_t depth = 0;
    bool too_deep = false;
    while (true) {
      auto it = v.incoming.find(cur);
      if (it == v.incoming.end() || it->second.empty()) break;
      ++depth;
      const Link* l = it->second.front();
      if (!l->p2p) break;
      if (depth >= 2 || !seen.insert(l->src).second) {
        too_deep = true;
        break;
      }
      cur = l->src;
    }
    if (too_deep) add(ViolationKind::DepthExceeded, {id}, "deeper than 2");
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.elements < b.elements;
  });
  return out;
}

std::map<std::string, std::string> parents(const graph::Model& model) {
  const View v = make_view(model);
  std::map<std::string, std::string> out;
  for (const auto& id : v.clients) {
    auto it = v.incoming.find(id);
    if (it != v.incoming.end() && !it->second.empty()) out[id] = it->second.front()->src;
  }
  return out;
}

double distribution_time(graph::Model& model, double data_size) {
  auto violations = verify_topology(model);
  if (!violations.empty()) {
    throw PreconditionViolated("topology has " + std::to_string(violations.size()) + " violation(s), first " +
                               std::string(to_string(violations.front().kind)));
  }
  const View v = make_view(model);
  double t = 0.0;
  for (const auto& l : v.links) {
    if (l.p2p) continue;
    const double first = data_size / l.bw;
    t = std::max(t, first);
    auto it = v.outgoing.find(l.tgt);
    if (it == v.outgoing.end()) continue;
    for (const Link* child : it->second) {
      if (child->p2p) t = std::max(t, first + data_size / child->bw);
    }
  }
  for (const auto& id : model.nodes_of_type("Time")) {
    model.mutate(graph::change::SetAttr{id, "t", t});
  }
  return t;
}

namespace {

std::string dot_id(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const graph::Model& model) {
  const View v = make_view(model);
  std::ostringstream os;
  os << "digraph overlay {\n";
  for (const auto& id : v.servers) os << "  " << dot_id(id) << " [shape=square];\n";
  for (const auto& id : v.clients) {
    os << "  " << dot_id(id) << " [shape=" << (flag(model.node(id), "rc") ? "diamond" : "circle") << "];\n";
  }
  std::vector<const Link*> links;
  for (const auto& l : v.links) links.push_back(&l);
  std::sort(links.begin(), links.end(), [](const Link* a, const Link* b) {
    return std::tie(a->src, a->tgt, a->id) < std::tie(b->src, b->tgt, b->id);
  });
  for (const Link* l : links) {
    os << "  " << dot_id(l->src) << " -> " << dot_id(l->tgt) << " [label=" << dot_id(format_double(l->bw))
       << ", penwidth=" << format_double(1.0 + l->bw / 25.0) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace gips::overlay
