#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gips/dsl/spec.hpp"
#include "gips/graph/model.hpp"
#include "gips/overlay/metamodel.hpp"
#include "gips/pipeline/engine.hpp"

namespace gips::overlay {

inline constexpr std::string_view kNetworkId = "network";
inline constexpr std::string_view kServerId = "server";
inline constexpr std::string_view kDataId = "data";
inline constexpr std::string_view kTimeId = "time";

// specs/overlay.gspec, embedded at build time.
std::string_view overlay_spec_text();
const dsl::Spec& overlay_spec();

struct Config {
  double server_upload = 150.0;   // Mbit/s
  std::int64_t server_slots = 10;  // equal upload shares per child
  std::int64_t client_slots = 8;
  double data_size = 100.0;  // Mbit
};

// Network, server, data and time nodes with their containment edges.
graph::Model initial_model(const Config& config);

struct Event {
  enum class Op { Add, Remove };
  std::int64_t step = 0;
  Op op = Op::Add;
  std::string id;
  double up = 0.0;
  double down = 0.0;
};

struct Scenario {
  Config config;
  std::vector<Event> events;  // steps non-decreasing
};

// Throws ScenarioError (or ParseError for malformed JSON). Checks that added
// ids are not live and removed ids are.
Scenario parse_scenario(std::string_view json_text);
std::string to_json(const Scenario& scenario);

// min(parent_upload / slots, child_download).
double candidate_bw(double parent_upload, double child_download, std::int64_t slots = 1);
// Same for two nodes; the parent's `slots` attribute is used when present.
// Throws MissingAttribute.
double candidate_bw(const graph::Node& parent, const graph::Node& child);

// Monitor stage: turns scenario events into model changes.
class Monitor {
 public:
  explicit Monitor(std::int64_t client_slots = 8) : client_slots_(client_slots) {}

  void add_client(graph::Model& model, const std::string& id, double up, double down) const;
  // Deletes the client with its links. Children lose their link and become
  // waiting (connected := false); a relay left without children is demoted
  // (rc := false). Returns the orphaned children.
  std::vector<std::string> remove_client(graph::Model& model, const std::string& id) const;

 private:
  std::int64_t client_slots_;
};

enum class ViolationKind {
  RoleCount,
  RelayNoChild,
  ParentNotRelay,
  CapacityServer,
  CapacityRelay,
  MultiParent,
  DepthExceeded,
  Disconnected
};
std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<std::string> elements;
  std::string detail;
};

std::vector<Violation> verify_topology(const graph::Model& model);

// Parent of each connected client: the server id or the relay id.
std::map<std::string, std::string> parents(const graph::Model& model);

// Store-and-forward completion time; also written to the Time node's t.
// Throws PreconditionViolated unless verify_topology(model) is empty.
double distribution_time(graph::Model& model, double data_size);

// Server as square, relays as diamonds, other clients as circles;
// penwidth = 1 + bw / 25.
std::string export_dot(const graph::Model& model);

struct BatchTrace {
  std::int64_t step = 0;
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::vector<std::string> orphans;
  pipeline::CycleReport report;
  std::vector<Violation> violations;
  std::size_t clients = 0;
  double distribution_time = 0.0;
  double monitor_ms = 0.0;
};

std::string trace_line(const BatchTrace& batch, bool timings = true);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // trace.jsonl and snapshots
  bool snapshots = true;
  bool timings = true;
  std::optional<std::filesystem::path> lp_dump_dir;
  // Called after every batch with the model in its post-cycle state.
  std::function<void(const BatchTrace&, const graph::Model&)> on_batch;
};

struct RunResult {
  std::vector<BatchTrace> trace;
  graph::Model model;
};

// MAPE-K loop: one Monitor pass and one pipeline cycle per event step.
// Throws InfeasibleCycle when a cycle has no solution (already written
// batches stay in the trace file).
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

struct BenchOptions {
  std::int64_t from = 5;
  std::int64_t to = 10;
  std::int64_t step = 5;
  std::uint64_t seed = 42;
  int repeat = 3;
  double down_lo = 50, down_hi = 250;
  double up_lo = 10, up_hi = 50;
  Config config;
};

struct BenchRow {
  std::int64_t clients = 0;
  double gt_ms = 0, ilp_ms = 0, misc_ms = 0, total_ms = 0;
  double objective = 0;  // sum of cycle objectives
  std::size_t violations = 0;
};

// Seeded one-at-a-time join scenario with `clients` clients.
Scenario bench_scenario(std::int64_t clients, const BenchOptions& options);
std::vector<BenchRow> bench(const BenchOptions& options,
                            const std::function<void(const BenchRow&)>& on_row = {});
// CSV with header clients,gt_ms,ilp_ms,misc_ms,total_ms,objective,violations.
// Without timings the time columns are written as 0.
std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row, bool timings = true);

}  // namespace gips::overlay
