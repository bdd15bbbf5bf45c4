#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <random>

#include "gips/errors.hpp"
#include "gips/overlay/overlay.hpp"

namespace gips::overlay {

using nlohmann::json;

std::string trace_line(const BatchTrace& b, bool timings) {
  const pipeline::CycleReport& r = b.report;
  json selected = json::array();
  for (const auto& a : r.selected) {
    selected.push_back({{"rule", a.rule}, {"mapping", a.mapping}, {"match", a.match.fingerprint()}});
  }
  json violations = json::array();
  for (const auto& v : b.violations) {
    violations.push_back({{"kind", std::string(to_string(v.kind))}, {"elements", v.elements}, {"detail", v.detail}});
  }
  json line = json::object();
  line["step"] = b.step;
  line["added"] = b.added;
  line["removed"] = b.removed;
  line["orphans"] = b.orphans;
  line["cycle"] = r.cycle;
  line["appeared"] = r.appeared;
  line["vanished"] = r.vanished;
  line["variables"] = r.variables;
  line["constraints"] = r.constraints;
  line["status"] = std::string(ilp::to_string(r.status));
  line["objective"] = r.objective;
  line["bbNodes"] = r.bb_nodes;
  line["selected"] = selected;
  line["clients"] = b.clients;
  line["violations"] = violations;
  line["distributionTime"] = b.distribution_time;
  if (timings) {
    line["monitorMs"] = b.monitor_ms;
    line["gtMs"] = r.gt_ms;
    line["ilpMs"] = r.ilp_ms;
    line["miscMs"] = r.misc_ms;
    line["totalMs"] = r.total_ms;
  }
  return line.dump();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  RunResult result{{}, initial_model(scenario.config)};
  graph::Model& model = result.model;
  pipeline::EngineOptions eopts;
  eopts.dump_dir = options.lp_dump_dir;
  pipeline::Engine engine(overlay_spec(), *overlay_metamodel(), eopts);
  const Monitor monitor(scenario.config.client_slots);

  std::ofstream trace_file;
  if (options.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*options.out_dir, ec);
    trace_file.open(*options.out_dir / "trace.jsonl", std::ios::binary | std::ios::trunc);
    if (!trace_file) throw IoError("cannot write " + (*options.out_dir / "trace.jsonl").string());
  }

  const auto& events = scenario.events;
  for (std::size_t i = 0; i < events.size();) {
    BatchTrace b;
    b.step = events[i].step;
    const auto t0 = Clock::now();
    for (; i < events.size() && events[i].step == b.step; ++i) {
      const Event& e = events[i];
      if (e.op == Event::Op::Add) {
        monitor.add_client(model, e.id, e.up, e.down);
        b.added.push_back(e.id);
      } else {
        for (auto& o : monitor.remove_client(model, e.id)) b.orphans.push_back(std::move(o));
        b.removed.push_back(e.id);
      }
    }
    // a child orphaned and removed in the same batch is gone
    std::erase_if(b.orphans, [&](const std::string& id) { return !model.find_node(id); });
    b.monitor_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    b.report = engine.run_cycle(model);
    if (b.report.status != ilp::Status::Optimal) {
      throw InfeasibleCycle("step " + std::to_string(b.step) + ": cycle " + std::to_string(b.report.cycle) +
                            " is " + std::string(ilp::to_string(b.report.status)));
    }
    b.violations = verify_topology(model);
    b.clients = model.nodes_of_type("Client").size();
    if (b.violations.empty()) b.distribution_time = distribution_time(model, scenario.config.data_size);

    if (options.out_dir) {
      trace_file << trace_line(b, options.timings) << '\n';
      trace_file.flush();
      if (options.snapshots) {
        const std::string stem = "snapshot_" + std::to_string(b.step);
        write_file(*options.out_dir / (stem + ".dot"), export_dot(model));
        write_file(*options.out_dir / (stem + ".json"), graph::to_json(model));
      }
    }
    if (options.on_batch) options.on_batch(b, model);
    result.trace.push_back(std::move(b));
  }
  return result;
}

Scenario bench_scenario(std::int64_t clients, const BenchOptions& o) {
  Scenario s;
  s.config = o.config;
  std::mt19937_64 rng(o.seed);
  auto draw = [&](double lo, double hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<double>(rng() % span);
  };
  for (std::int64_t k = 1; k <= clients; ++k) {
    Event e;
    e.step = k;
    e.op = Event::Op::Add;
    e.id = "c" + std::to_string(k);
    e.down = draw(o.down_lo, o.down_hi);
    e.up = draw(o.up_lo, o.up_hi);
    s.events.push_back(std::move(e));
  }
  return s;
}

std::vector<BenchRow> bench(const BenchOptions& o, const std::function<void(const BenchRow&)>& on_row) {
  if (o.from < 1 || o.to < o.from) throw ScenarioError("empty client range");
  if (o.step < 1) throw ScenarioError("step must be at least 1");
  if (o.repeat < 1) throw ScenarioError("repeat must be at least 1");
  if (o.down_lo > o.down_hi || o.up_lo > o.up_hi || o.down_lo <= 0 || o.up_lo < 0) {
    throw ScenarioError("invalid bandwidth range");
  }
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (std::int64_t n = o.from; n <= o.to; n += o.step) {
    const Scenario s = bench_scenario(n, o);
    BenchRow row;
    row.clients = n;
    for (int r = 0; r < o.repeat; ++r) {
      const auto t0 = Clock::now();
      std::optional<RunResult> res;
      try {
        res.emplace(run_scenario(s));
      } catch (const InfeasibleCycle& e) {
        throw InfeasibleCycle(std::to_string(n) + " clients: " + e.what());
      }
      const double total = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      double gt = 0, ilp = 0, objective = 0;
      std::size_t violations = verify_topology(res->model).size();
      for (const auto& b : res->trace) {
        gt += b.report.gt_ms;
        ilp += b.report.ilp_ms;
        objective += b.report.objective;
        violations += b.violations.size();
      }
      row.gt_ms += gt / o.repeat;
      row.ilp_ms += ilp / o.repeat;
      row.total_ms += total / o.repeat;
      row.objective = objective;
      row.violations = violations;
    }
    row.misc_ms = std::max(0.0, row.total_ms - row.gt_ms - row.ilp_ms);
    if (on_row) on_row(row);
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv_header() { return "clients,gt_ms,ilp_ms,misc_ms,total_ms,objective,violations\n"; }

std::string bench_csv_row(const BenchRow& row, bool timings) {
  auto ms = [&](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", timings ? v : 0.0);
    return std::string(buf);
  };
  return std::to_string(row.clients) + "," + ms(row.gt_ms) + "," + ms(row.ilp_ms) + "," + ms(row.misc_ms) + "," +
         ms(row.total_ms) + "," + format_double(row.objective) + "," + std::to_string(row.violations) + "\n";
}

}  // namespace gips::overlay
