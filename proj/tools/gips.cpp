#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "gips/errors.hpp"
#include "gips/overlay/overlay.hpp"

namespace fs = std::filesystem;
using namespace gips;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kIo = 3 };

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::shared_ptr<const graph::Metamodel> metamodel_from(const std::string& path) {
  if (path.empty()) return overlay::overlay_metamodel();
  return graph::load_metamodel(read_file(path));
}

int cmd_run(const std::string& scenario_path, const fs::path& out, bool snapshots, bool lp, bool timings) {
  const overlay::Scenario s = overlay::parse_scenario(read_file(scenario_path));
  overlay::RunOptions o;
  o.out_dir = out;
  o.snapshots = snapshots;
  o.timings = timings;
  if (lp) o.lp_dump_dir = out / "lp";
  const auto res = overlay::run_scenario(s, o);
  write_file(out / "final.json", graph::to_json(res.model));
  std::size_t violations = 0;
  for (const auto& b : res.trace) violations += b.violations.size();
  std::cout << res.trace.size() << " batches, " << res.model.nodes_of_type("Client").size() << " clients, "
            << violations << " violations\n";
  return kOk;
}

int cmd_solve(const std::string& spec_path, const std::string& model_path, const std::string& mm_path,
              const fs::path& out, bool lp) {
  auto mm = metamodel_from(mm_path);
  dsl::Spec spec = dsl::load_spec(read_file(spec_path), *mm);
  graph::Model model = graph::load_model(read_file(model_path), mm);
  pipeline::EngineOptions eo;
  if (lp) eo.dump_dir = out;
  pipeline::Engine engine(std::move(spec), *mm, eo);
  const pipeline::CycleReport r = engine.run_cycle(model);
  if (r.status != ilp::Status::Optimal) {
    std::cerr << "gips: cycle is " << ilp::to_string(r.status) << "\n";
    return kInfeasible;
  }
  write_file(out / "model.json", graph::to_json(model));
  std::cout << "objective " << format_double(r.objective) << ", " << r.selected.size() << " rule application(s)\n";
  return kOk;
}

int cmd_export(const std::string& model_path, const std::string& mm_path, const fs::path& out) {
  auto mm = metamodel_from(mm_path);
  const graph::Model model = graph::load_model(read_file(model_path), mm);
  write_file(out / (fs::path(model_path).stem().string() + ".dot"), overlay::export_dot(model));
  return kOk;
}

int cmd_bench(const std::string& range, std::int64_t step, std::uint64_t seed, int repeat, bool timings,
              const fs::path& out) {
  static const std::regex re(R"((\d+)\.\.(\d+))");
  std::smatch m;
  if (!std::regex_match(range, m, re)) throw CLI::ValidationError("--clients", "expected A..B, got " + range);
  overlay::BenchOptions o;
  o.from = std::stoll(m[1]);
  o.to = std::stoll(m[2]);
  o.step = step;
  o.seed = seed;
  o.repeat = repeat;
  if (o.from < 1 || o.to < o.from) throw CLI::ValidationError("--clients", "empty range " + range);
  std::error_code ec;
  fs::create_directories(out, ec);
  const fs::path csv = out / "bench.csv";
  std::ofstream file(csv, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + csv.string());
  file << overlay::bench_csv_header();
  std::cout << overlay::bench_csv_header();
  overlay::bench(o, [&](const overlay::BenchRow& row) {
    const std::string line = overlay::bench_csv_row(row, timings);
    file << line;
    file.flush();
    std::cout << line << std::flush;
  });
  if (!file) throw IoError("cannot write " + csv.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-match selection by integer programming, with a P2P overlay controller"};
  app.require_subcommand(1);
  std::string out = "out";

  auto* run = app.add_subcommand("run", "run a scenario; writes trace.jsonl, snapshots and final.json");
  std::string scenario;
  bool no_snapshots = false, lp_dump = false, no_timings = false;
  run->add_option("scenario", scenario, "scenario JSON")->required();
  run->add_option("--out", out, "output directory");
  run->add_flag("--no-snapshots", no_snapshots, "skip snapshot_<step>.dot/.json");
  run->add_flag("--lp", lp_dump, "dump each cycle's LP and variable map under <out>/lp");
  run->add_flag("--no-timings", no_timings, "omit timing fields from the trace");

  auto* solve = app.add_subcommand("solve", "run one cycle of a spec on a model; writes model.json");
  std::string spec_path, model_path, mm_path;
  bool solve_lp = false;
  solve->add_option("spec", spec_path, "spec file (.gspec)")->required();
  solve->add_option("model", model_path, "model JSON")->required();
  solve->add_option("--metamodel", mm_path, "metamodel JSON (default: overlay)");
  solve->add_option("--out", out, "output directory");
  solve->add_flag("--lp", solve_lp, "write cycle_1.lp and cycle_1.varmap.json");

  auto* exp = app.add_subcommand("export", "export a model");
  std::string export_model;
  bool dot = false;
  exp->add_option("model", export_model, "model JSON")->required();
  exp->add_option("--metamodel", mm_path, "metamodel JSON (default: overlay)");
  exp->add_flag("--dot", dot, "write <out>/<model>.dot")->required();
  exp->add_option("--out", out, "output directory");

  auto* bench = app.add_subcommand("bench", "seeded join benchmark; writes bench.csv");
  std::string clients = "5..10";
  std::int64_t step = 5;
  std::uint64_t seed = 42;
  int repeat = 3;
  bool bench_no_timings = false;
  bench->add_option("--clients", clients, "client range A..B")->capture_default_str();
  bench->add_option("--step", step, "range step")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "RNG seed")->capture_default_str();
  bench->add_option("--repeat", repeat, "runs per row")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_flag("--no-timings", bench_no_timings, "write 0 in the timing columns");
  bench->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, out, !no_snapshots, lp_dump, !no_timings);
    if (*solve) return cmd_solve(spec_path, model_path, mm_path, out, solve_lp);
    if (*exp) return cmd_export(export_model, mm_path, out);
    if (*bench) return cmd_bench(clients, step, seed, repeat, !bench_no_timings, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "gips: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleCycle& e) {
    std::cerr << "gips: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const IoError& e) {
    std::cerr << "gips: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "gips: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "gips: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
