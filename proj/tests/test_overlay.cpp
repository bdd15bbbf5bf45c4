#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gips/errors.hpp"
#include "gips/overlay/overlay.hpp"
#include "support.hpp"

using namespace testing;
using namespace gips::overlay;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Model base() { return initial_model(Config{}); }

void client(Model& m, const std::string& id, bool rc, bool connected, double up = 40, double down = 100) {
  add_client(m, id, up, down, rc, connected);
  m.mutate(change::CreateEdge{"server->" + id, "clients", "server", id});
}

void link(Model& m, const std::string& id, const std::string& type, const std::string& src,
          const std::string& tgt, double bw) {
  m.mutate(change::CreateNode{id, type, {{"bw", bw}}});
  m.mutate(change::CreateEdge{id + ".s", "source", id, src});
  m.mutate(change::CreateEdge{id + ".t", "target", id, tgt});
}

std::vector<ViolationKind> kinds(const std::vector<Violation>& vs) {
  std::vector<ViolationKind> out;
  for (const auto& v : vs) out.push_back(v.kind);
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

// server -> r (relay) -> {x, y}; server -> d (direct)
Model small_tree() {
  Model m = base();
  client(m, "r", true, true);
  client(m, "x", false, true);
  client(m, "y", false, true);
  client(m, "d", false, true);
  link(m, "con-r", "Connection", "server", "r", 15);
  link(m, "con-d", "Connection", "server", "d", 15);
  link(m, "p-x", "P2PLink", "r", "x", 5);
  link(m, "p-y", "P2PLink", "r", "y", 5);
  return m;
}

}  // namespace

TEST_SUITE("overlay") {

TEST_CASE("candidate_bw") {
  CHECK(candidate_bw(150, 100) == 100);
  CHECK(candidate_bw(50, 50) == 50);
  CHECK(candidate_bw(150, 0) == 0);
  CHECK(candidate_bw(150, 100, 10) == 15);
  Model m = base();
  client(m, "c", false, false, 40, 3);
  CHECK(candidate_bw(m.node("server"), m.node("c")) == 3);
  CHECK(candidate_bw(m.node("c"), m.node("c")) == 3);
  CHECK_THROWS_AS(candidate_bw(m.node("data"), m.node("c")), MissingAttribute);
}

TEST_CASE("zero-download clients are not link candidates") {
  Model m = base();
  client(m, "j", false, true, 40, 100);
  client(m, "zero", false, false, 40, 0);
  client(m, "ok", false, false, 40, 10);
  const auto* cand = overlay_spec().find_pattern("candidateLink");
  REQUIRE(cand);
  for (const auto& mt : match::find_matches(*cand, m)) CHECK(mt.at("i") != "zero");
  CHECK_THROWS_AS(parse_scenario(R"({"events":[{"step":1,"op":"add","id":"z","up":1,"down":0}]})"), ScenarioError);
}

TEST_CASE("verify_topology") {
  SUBCASE("centralized") {
    Model m = base();
    for (int i = 1; i <= 4; ++i) {
      const std::string id = "c" + std::to_string(i);
      client(m, id, false, true);
      link(m, "con" + std::to_string(i), "Connection", "server", id, 15);
    }
    CHECK(verify_topology(m).empty());
  }
  SUBCASE("relay tree") { CHECK(verify_topology(small_tree()).empty()); }
  SUBCASE("relay without children") {
    Model m = base();
    client(m, "r", true, true);
    link(m, "con", "Connection", "server", "r", 15);
    auto vs = verify_topology(m);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == ViolationKind::RelayNoChild);
    CHECK(vs[0].elements == std::vector<std::string>{"r"});
  }
  SUBCASE("two parents") {
    Model m = small_tree();
    link(m, "con-x", "Connection", "server", "x", 15);
    CHECK(kinds(verify_topology(m)) == std::vector{ViolationKind::MultiParent});
  }
  SUBCASE("parent without rc") {
    Model m = small_tree();
    m.mutate(change::SetAttr{"r", "rc", false});
    CHECK(kinds(verify_topology(m)) == std::vector{ViolationKind::ParentNotRelay});
  }
  SUBCASE("disconnected") {
    Model m = small_tree();
    client(m, "w", false, false);
    CHECK(kinds(verify_topology(m)) == std::vector{ViolationKind::Disconnected});
  }
  SUBCASE("flag disagrees with structure") {
    Model m = small_tree();
    m.mutate(change::SetAttr{"d", "connected", false});
    CHECK(kinds(verify_topology(m)) == std::vector{ViolationKind::RoleCount});
  }
  SUBCASE("capacity") {
    Model m = small_tree();
    m.mutate(change::SetAttr{"p-x", "bw", 36.0});
    CHECK(kinds(verify_topology(m)) == std::vector{ViolationKind::CapacityRelay});
    m.mutate(change::SetAttr{"p-x", "bw", 35.0});
    CHECK(verify_topology(m).empty());
    m.mutate(change::SetAttr{"con-d", "bw", 136.0});
    CHECK(kinds(verify_topology(m)) == std::vector{ViolationKind::CapacityServer});
  }
  SUBCASE("depth three") {
    Model m = small_tree();
    m.mutate(change::SetAttr{"x", "rc", true});
    client(m, "z", false, true);
    link(m, "p-z", "P2PLink", "x", "z", 5);
    auto ks = kinds(verify_topology(m));
    CHECK(std::count(ks.begin(), ks.end(), ViolationKind::DepthExceeded) == 1);
    CHECK(std::count(ks.begin(), ks.end(), ViolationKind::RoleCount) == 1);
    CHECK(std::count(ks.begin(), ks.end(), ViolationKind::RelayNoChild) == 1);
  }
}

TEST_CASE("distribution_time") {
  SUBCASE("one direct client") {
    Model m = base();
    client(m, "c", false, true);
    link(m, "con", "Connection", "server", "c", 50);
    CHECK(distribution_time(m, 100) == 2.0);
    CHECK(m.node("time").attrs.at("t") == Value{2.0});
  }
  SUBCASE("relay chain") {
    Model m = base();
    client(m, "r", true, true);
    client(m, "leaf", false, true);
    link(m, "con", "Connection", "server", "r", 50);
    link(m, "p", "P2PLink", "r", "leaf", 25);
    CHECK(distribution_time(m, 100) == 6.0);
  }
  SUBCASE("empty network") {
    Model m = base();
    CHECK(distribution_time(m, 100) == 0.0);
  }
  SUBCASE("precondition") {
    Model m = base();
    client(m, "w", false, false);
    CHECK_THROWS_AS(distribution_time(m, 100), PreconditionViolated);
  }
}

TEST_CASE("export_dot") {
  SUBCASE("golden two-node model") {
    Model m = graph::load_model(slurp(GIPS_TEST_DIR "/data/two_node.json"), overlay_metamodel());
    const std::string dot = export_dot(m);
    CHECK(dot == slurp(GIPS_TEST_DIR "/golden/two_node.dot"));
    CHECK(count(dot, "shape=square") == 1);
    CHECK(count(dot, "shape=circle") == 1);
    CHECK(count(dot, "->") == 1);
  }
  SUBCASE("one diamond per relay") {
    Model m = small_tree();
    const std::string dot = export_dot(m);
    CHECK(count(dot, "shape=diamond") == 1);
    CHECK(count(dot, "shape=circle") == 3);
    CHECK(count(dot, "->") == 4);
    CHECK(dot == export_dot(small_tree()));
  }
  SUBCASE("wider links are thicker") {
    Model m = base();
    client(m, "a", false, true);
    client(m, "b", false, true);
    link(m, "la", "Connection", "server", "a", 10);
    link(m, "lb", "Connection", "server", "b", 100);
    const std::string dot = export_dot(m);
    auto width = [&](const std::string& label) {
      const auto p = dot.find("penwidth=", dot.find("label=\"" + label + "\""));
      return std::stod(dot.substr(p + 9));
    };
    CHECK(width("100") > width("10"));
  }
}

TEST_CASE("scenario parsing") {
  const char* text = R"({"server":{"upload":150},"data":{"size":100},"events":[{"step":1,"op":"add","id":"c1","up":25,"down":120}, {"step":2,"op":"remove","id":"c1"}]})";
  Scenario s = parse_scenario(text);
  CHECK(s.config.server_upload == 150);
  CHECK(s.config.data_size == 100);
  REQUIRE(s.events.size() == 2);
  CHECK(s.events[0].op == Event::Op::Add);
  CHECK(s.events[0].up == 25);
  CHECK(s.events[0].down == 120);
  CHECK(s.events[1].op == Event::Op::Remove);
  CHECK(parse_scenario(to_json(s)).events.size() == 2);

  CHECK_THROWS_AS(parse_scenario("{"), ParseError);
  CHECK_THROWS_AS(parse_scenario(R"({"events":[{"step":1,"op":"remove","id":"c1"}]})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"events":[{"step":1,"op":"add","id":"c1","up":1,"down":1},
                                               {"step":1,"op":"add","id":"c1","up":1,"down":1}]})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"events":[{"step":1,"op":"jump","id":"c1"}]})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"events":[{"step":2,"op":"add","id":"a","up":1,"down":1},
                                               {"step":1,"op":"add","id":"b","up":1,"down":1}]})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"events":[{"step":1,"op":"add","id":"server","up":1,"down":1}]})"),
                  ScenarioError);
  // re-adding a removed id is allowed
  CHECK(parse_scenario(R"({"events":[{"step":1,"op":"add","id":"a","up":1,"down":1},{"step":2,"op":"remove","id":"a"},
                                     {"step":3,"op":"add","id":"a","up":1,"down":1}]})")
            .events.size() == 3);
}

TEST_CASE("monitor removal") {
  Model m = small_tree();
  Monitor mon;
  SUBCASE("relay") {
    auto orphans = mon.remove_client(m, "r");
    CHECK(orphans == std::vector<std::string>{"x", "y"});
    CHECK_FALSE(m.find_node("r"));
    CHECK_FALSE(m.find_node("p-x"));
    CHECK_FALSE(m.find_node("con-r"));
    CHECK(m.node("x").attrs.at("connected") == Value{false});
    CHECK(validate(m).empty());
  }
  SUBCASE("last child demotes its relay") {
    CHECK(mon.remove_client(m, "x").empty());
    CHECK(m.node("r").attrs.at("rc") == Value{true});
    mon.remove_client(m, "y");
    CHECK(m.node("r").attrs.at("rc") == Value{false});
    CHECK(verify_topology(m).empty());
  }
  SUBCASE("unknown client") { CHECK_THROWS_AS(mon.remove_client(m, "nobody"), ScenarioError); }
  SUBCASE("duplicate add") { CHECK_THROWS_AS(mon.add_client(m, "d", 1, 1), ScenarioError); }
}

TEST_CASE("run_scenario") {
  SUBCASE("empty") {
    auto res = run_scenario(Scenario{});
    CHECK(res.trace.empty());
    CHECK(res.model.nodes_of_type("Client").empty());
  }
  SUBCASE("shipped scenario") {
    const auto dir = std::filesystem::temp_directory_path() / "gips_overlay_run";
    std::filesystem::remove_all(dir);
    Scenario s = parse_scenario(slurp(GIPS_SOURCE_DIR "/scenarios/lecturestudio.json"));
    RunOptions o;
    o.out_dir = dir;
    auto res = run_scenario(s, o);
    REQUIRE(res.trace.size() == 3);
    for (const auto& b : res.trace) CHECK(b.violations.empty());
    CHECK(res.trace[0].clients == 15);
    CHECK(res.trace[2].clients == 20);
    CHECK_FALSE(res.trace[1].orphans.empty());
    CHECK(res.model.nodes_of_type("Client").size() == 20);
    std::ifstream trace(dir / "trace.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(trace, line)) ++lines;
    CHECK(lines == 3);
    for (int step : {1, 2, 3}) {
      CHECK(std::filesystem::exists(dir / ("snapshot_" + std::to_string(step) + ".dot")));
      CHECK(std::filesystem::exists(dir / ("snapshot_" + std::to_string(step) + ".json")));
    }
    Model last = graph::load_model(slurp(dir / "snapshot_3.json"), overlay_metamodel());
    CHECK(same_graph(last, res.model));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("remove-only down to zero") {
    Scenario s = parse_scenario(R"({"events":[
      {"step":1,"op":"add","id":"a","up":30,"down":100},
      {"step":1,"op":"add","id":"b","up":30,"down":100},
      {"step":2,"op":"remove","id":"a"},
      {"step":3,"op":"remove","id":"b"}]})");
    auto res = run_scenario(s);
    REQUIRE(res.trace.size() == 3);
    for (const auto& b : res.trace) {
      CHECK(b.report.status == ilp::Status::Optimal);
      CHECK(b.violations.empty());
    }
    CHECK(res.model.nodes_of_type("Client").empty());
    CHECK(res.model.nodes_of_type("Connection").empty());
    CHECK(res.model.nodes_of_type("P2PLink").empty());
    CHECK(same_graph(res.model, base()));
    CHECK(res.model.nodes().size() == base().nodes().size());
  }
  SUBCASE("saturated relays remove-only") {
    // 13 clients force relays; removing everything leaves the server alone
    Scenario s = bench_scenario(13, BenchOptions{});
    for (std::int64_t k = 1; k <= 13; ++k) s.events.push_back({100 + k, Event::Op::Remove, "c" + std::to_string(k), 0, 0});
    auto res = run_scenario(s);
    for (const auto& b : res.trace) CHECK(b.violations.empty());
    CHECK(res.model.nodes_of_type("Client").empty());
    CHECK(res.model.edges().size() == 3);
  }
  SUBCASE("trace line without timings") {
    Scenario s = bench_scenario(3, BenchOptions{});
    auto a = run_scenario(s), b = run_scenario(s);
    REQUIRE(a.trace.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(trace_line(a.trace[i], false) == trace_line(b.trace[i], false));
      CHECK(trace_line(a.trace[i], false).find("gtMs") == std::string::npos);
      CHECK(trace_line(a.trace[i], true).find("gtMs") != std::string::npos);
    }
  }
}

TEST_CASE("bench") {
  BenchOptions o;
  o.repeat = 1;
  auto rows = bench(o);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].clients == 5);
  CHECK(rows[1].clients == 10);
  for (const auto& r : rows) {
    CHECK(r.violations == 0);
    CHECK(r.total_ms >= r.gt_ms + r.ilp_ms);
    CHECK(r.misc_ms >= 0);
  }
  auto again = bench(o);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(bench_csv_row(rows[i], false) == bench_csv_row(again[i], false));
  }
  CHECK(bench_csv_header() == "clients,gt_ms,ilp_ms,misc_ms,total_ms,objective,violations\n");
  o.to = 4;
  CHECK_THROWS_AS(bench(o), ScenarioError);
}

}  // TEST_SUITE
