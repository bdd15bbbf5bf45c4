#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gips/dsl/spec.hpp"
#include "gips/graph/model.hpp"
#include "gips/ilp/problem.hpp"
#include "gips/match/incremental.hpp"

namespace gips::pipeline {

struct MappingVar {
  std::string mapping;
  match::Match match;
  std::string id;  // mapping::fingerprint
};

// Bijection between ILP variable indices and (mapping, match) pairs.
class VarMap {
 public:
  std::size_t add(std::string mapping, match::Match match);
  std::size_t size() const { return vars_.size(); }
  const MappingVar& at(std::size_t index) const { return vars_.at(index); }
  const std::vector<MappingVar>& vars() const { return vars_; }
  std::optional<std::size_t> find(std::string_view id) const;
  std::optional<std::size_t> find(std::string_view mapping, const match::Match& match) const;
  // {"<varId>": {"mapping": ..., "pattern": ..., "binding": {...}}, ...}
  std::string to_json() const;

 private:
  std::vector<MappingVar> vars_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Where a generated row came from.
struct RowOrigin {
  std::size_t constraint = 0;      // index into Spec::constraints
  std::optional<match::Match> ctx;  // forEach context, if any
};

struct BuildResult {
  ilp::IlpProblem problem;
  VarMap varmap;
  std::vector<RowOrigin> rows;
};

// Current matches keyed by pattern name, each list sorted by fingerprint.
using MatchSets = std::map<std::string, std::vector<match::Match>, std::less<>>;

// Value of a coefficient expression: plain references read `m`, ctx
// references read `ctx`. Throws DivisionByZero, UnboundRef, MissingAttribute
// or TypeError (non-numeric result).
double eval_coefficient(const Expr& coeff, const match::Match& m, const graph::Model& model,
                        const match::Match* ctx = nullptr);

// One binary variable per (mapping, match); one row per global constraint and
// per context match of a forEach constraint; the objective from the spec.
BuildResult build_ilp(const graph::Model& model, const dsl::Spec& spec, const MatchSets& matches);

struct Application {
  std::string rule;
  std::string mapping;
  match::Match match;
};

struct CycleReport {
  std::uint64_t cycle = 0;
  std::size_t appeared = 0;
  std::size_t vanished = 0;
  std::size_t variables = 0;
  std::size_t constraints = 0;
  ilp::Status status = ilp::Status::Infeasible;
  double objective = 0.0;
  std::size_t bb_nodes = 0;
  std::vector<Application> selected;
  std::uint64_t version_before = 0;
  std::uint64_t version_after = 0;
  double gt_ms = 0.0;   // matching and rule application
  double ilp_ms = 0.0;  // build and solve
  double misc_ms = 0.0;
  double total_ms = 0.0;
};

// Applies the selections in the given order, prechecking each one. On a
// failed precheck the model is rolled back to its state before the call and
// SelectionConflict is thrown.
void apply_selection(graph::Model& model, const dsl::Spec& spec, const std::vector<Application>& selected);

struct EngineOptions {
  // When set, each cycle writes cycle_<n>.lp and cycle_<n>.varmap.json here.
  std::optional<std::filesystem::path> dump_dir;
};

// Runs cycles: match delta, ILP build, exact solve, application.
class Engine {
 public:
  // Throws ParseError/TypeError if the spec does not check against `metamodel`.
  Engine(dsl::Spec spec, const graph::Metamodel& metamodel, EngineOptions options = {});

  // On Optimal every selected rule match is applied; on Infeasible (or
  // Unbounded) the model is untouched. Throws SelectionConflict after rolling
  // the model back to the cycle start.
  CycleReport run_cycle(graph::Model& model);

  const dsl::Spec& spec() const { return spec_; }
  const match::IncrementalMatcher& matcher() const { return matcher_; }
  MatchSets current_matches() const;

  // Artifacts of the most recent cycle.
  const BuildResult& last_build() const { return last_build_; }
  const ilp::IlpSolution& last_solution() const { return last_solution_; }

 private:
  dsl::Spec spec_;
  EngineOptions options_;
  match::IncrementalMatcher matcher_;
  std::uint64_t cycles_ = 0;
  BuildResult last_build_;
  ilp::IlpSolution last_solution_;
};

// Patterns the matcher must maintain for `spec`: named patterns plus inline
// rule LHS patterns.
std::vector<match::Pattern> spec_patterns(const dsl::Spec& spec);

}  // namespace gips::pipeline
