#include <doctest.h>

#include <random>

#include "gips/errors.hpp"
#include "support.hpp"

using namespace testing;

TEST_SUITE("graph") {

TEST_CASE("empty model document loads at version 0") {
  Model m = load_model(R"({"nodes":[],"edges":[]})", overlay::overlay_metamodel());
  CHECK(m.nodes().empty());
  CHECK(m.edges().empty());
  CHECK(m.version() == 0);
  CHECK(validate(m).empty());
}

TEST_CASE("server containing one data node") {
  Model m = load_model(R"({"nodes":[
      {"id":"s","type":"LectureStudioServer","attrs":{"upload":150,"slots":10}},
      {"id":"d","type":"Data","attrs":{"size":100}}],
    "edges":[{"id":"e","type":"data","src":"s","tgt":"d"}]})",
                       overlay::overlay_metamodel());
  CHECK(m.nodes().size() == 2);
  CHECK(m.edges().size() == 1);
  CHECK(m.journal().size() == 3);
  CHECK(std::get<double>(m.node("s").attrs.at("upload")) == 150.0);
}

TEST_CASE("load errors name the element") {
  auto mm = overlay::overlay_metamodel();
  try {
    load_model(R"({"nodes":[{"id":"c9","type":"Client","attrs":{"connected":false,"upload":1,"download":1,"slots":1}}],"edges":[]})", mm);
    FAIL("expected TypeError");
  } catch (const TypeError& e) {
    CHECK(std::string(e.what()).find("c9") != std::string::npos);
  }
  CHECK_THROWS_AS(load_model("{\"nodes\": [", mm), ParseError);
  try {
    load_model(R"({"nodes":[],"edges":[{"id":"e1","type":"data","src":"x","tgt":"y"}]})", mm);
    FAIL("expected TypeError");
  } catch (const TypeError& e) {
    CHECK(std::string(e.what()).find("e1") != std::string::npos);
  }
  CHECK_THROWS_AS(load_model(R"({"nodes":[{"id":"n","type":"Nope","attrs":{}}]})", mm), TypeError);
  CHECK_THROWS_AS(
      load_model(R"({"nodes":[{"id":"t","type":"Time","attrs":{"t":"soon"}}]})", mm), TypeError);
}

TEST_CASE("mutate records and versions") {
  Model m = empty_overlay();
  add_client(m, "c7");
  CHECK(m.journal().size() == 1);
  CHECK(m.version() == 1);
  const ChangeRecord& rec = m.mutate(change::SetAttr{"c7", "rc", true});
  CHECK(rec.kind == ChangeKind::SetAttr);
  const auto& ac = std::get<AttrChange>(rec.payload);
  CHECK(ac.old_value == Value{false});
  CHECK(ac.new_value == Value{true});
  CHECK(m.version() == 2);
}

TEST_CASE("guarded delete leaves the model unchanged") {
  Model m = empty_overlay();
  add_server(m);
  add_client(m, "c7");
  m.mutate(change::CreateEdge{"sc", "clients", "server", "c7"});
  const auto before = to_json(m);
  const auto version = m.version();
  CHECK_THROWS_AS(m.mutate(change::DeleteNode{"c7"}), DanglingEdge);
  CHECK(to_json(m) == before);
  CHECK(m.version() == version);
  CHECK(m.journal().size() == version);
}

TEST_CASE("mutate rejects bad requests") {
  Model m = empty_overlay();
  add_client(m, "c1");
  CHECK_THROWS_AS(m.mutate(change::SetAttr{"nope", "rc", true}), NotFound);
  CHECK_THROWS_AS(m.mutate(change::SetAttr{"c1", "rc", std::int64_t{1}}), TypeError);
  CHECK_THROWS_AS(m.mutate(change::SetAttr{"c1", "colour", true}), TypeError);
  CHECK_THROWS_AS(m.mutate(change::CreateEdge{"e", "clients", "c1", "c1"}), TypeError);
  CHECK_THROWS_AS(m.mutate(change::DeleteEdge{"e"}), NotFound);
  CHECK_THROWS_AS(add_client(m, "c1"), TypeError);
  CHECK(m.version() == 1);
  // int literals are accepted for real attributes
  m.mutate(change::SetAttr{"c1", "upload", std::int64_t{30}});
  CHECK(std::get<double>(m.node("c1").attrs.at("upload")) == 30.0);
}

TEST_CASE("validate reports broken invariants") {
  Model m = empty_overlay();
  add_server(m);
  CHECK(validate(m).empty());
  m.erase_node_unchecked("server");
  auto diags = validate(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].element_id == "server-data");

  Model m2 = empty_overlay();
  m2.insert_unchecked(Node{"k", "Connection", {{"bw", std::string("fast")}}});
  auto d2 = validate(m2);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].element_id == "k");
}

TEST_CASE("json round trip") {
  Model m = empty_overlay();
  add_server(m);
  add_client(m, "c1", 12.5, 80);
  m.mutate(change::CreateEdge{"sc1", "clients", "server", "c1"});
  Model back = load_model(to_json(m), overlay::overlay_metamodel());
  CHECK(same_graph(m, back));
  CHECK(to_json(back) == to_json(m));
  auto mm2 = load_metamodel(to_json(*overlay::overlay_metamodel()));
  CHECK(mm2->node_types() == overlay::overlay_metamodel()->node_types());
  CHECK(mm2->edge_types() == overlay::overlay_metamodel()->edge_types());
}

TEST_CASE("rollback restores the earlier state") {
  Model m = empty_overlay();
  add_server(m);
  const auto snap = to_json(m);
  const auto v = m.version();
  const auto journal = m.journal();
  add_client(m, "c1");
  m.mutate(change::CreateEdge{"sc1", "clients", "server", "c1"});
  m.mutate(change::SetAttr{"c1", "connected", true});
  m.mutate(change::DeleteEdge{"sc1"});
  m.mutate(change::DeleteNode{"c1"});
  m.rollback_to(v);
  CHECK(to_json(m) == snap);
  CHECK(m.journal() == journal);
  CHECK(m.version() == v);
}

// Random walk over valid mutations; replay must rebuild the live graph.
TEST_CASE("journal replay over long random mutation sequences") {
  std::mt19937_64 rng(7);
  Model m = empty_overlay();
  add_server(m);
  int next = 0;
  std::size_t steps = 0;
  while (steps < 1500) {
    const auto pick = rng() % 6;
    const auto& clients = m.nodes_of_type("Client");
    try {
      if (pick == 0 || clients.size() < 2) {
        add_client(m, "c" + std::to_string(next++), double(rng() % 50), double(rng() % 200));
      } else {
        auto it = clients.begin();
        std::advance(it, rng() % clients.size());
        const std::string c = *it;
        if (pick == 1) {
          m.mutate(change::SetAttr{c, "connected", bool(rng() % 2)});
        } else if (pick == 2) {
          m.mutate(change::CreateEdge{"e" + std::to_string(next++), "clients", "server", c});
        } else if (pick == 3) {
          auto jt = clients.begin();
          std::advance(jt, rng() % clients.size());
          const std::string l = "l" + std::to_string(next++);
          m.mutate(change::CreateNode{l, "P2PLink", {{"bw", double(rng() % 40)}}});
          m.mutate(change::CreateEdge{l + "s", "source", l, c});
          m.mutate(change::CreateEdge{l + "t", "target", l, *jt});
        } else if (pick == 4 && !m.edges().empty()) {
          auto et = m.edges().begin();
          std::advance(et, rng() % m.edges().size());
          m.mutate(change::DeleteEdge{et->first});
        } else {
          const auto& out = m.out_edges(c);
          const auto& in = m.in_edges(c);
          if (out.empty() && in.empty()) m.mutate(change::DeleteNode{c});
        }
      }
    } catch (const Error&) {
      FAIL("unexpected mutate failure");
    }
    // links without edges are left over; delete some of them too
    for (const auto& l : std::vector<std::string>(m.nodes_of_type("P2PLink").begin(),
                                                  m.nodes_of_type("P2PLink").end())) {
      if (m.out_edges(l).empty() && rng() % 2) m.mutate(change::DeleteNode{l});
    }
    steps = m.version();
    CHECK(validate(m).empty());
  }
  for (std::size_t i = 1; i < m.journal().size(); ++i) {
    REQUIRE(m.journal()[i].version == m.journal()[i - 1].version + 1);
  }
  Model rebuilt = replay(overlay::overlay_metamodel(), m.journal());
  CHECK(same_graph(rebuilt, m));
  CHECK(to_json(rebuilt) == to_json(m));
}

}
