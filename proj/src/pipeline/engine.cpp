#include "gips/pipeline/engine.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>

#include "gips/errors.hpp"
#include "gips/rule/rule.hpp"

namespace gips::pipeline {

std::size_t VarMap::add(std::string mapping, match::Match match) {
  std::string id = mapping + "::" + match.fingerprint();
  if (index_.count(id)) throw NameCollision("duplicate variable " + id);
  const std::size_t i = vars_.size();
  index_.emplace(id, i);
  vars_.push_back({std::move(mapping), std::move(match), std::move(id)});
  return i;
}

std::optional<std::size_t> VarMap::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> VarMap::find(std::string_view mapping, const match::Match& match) const {
  return find(std::string(mapping) + "::" + match.fingerprint());
}

std::string VarMap::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& v : vars_) {
    nlohmann::ordered_json binding = nlohmann::ordered_json::object();
    for (const auto& [var, id] : v.match.binding()) binding[var] = id;
    out[v.id] = {{"mapping", v.mapping}, {"pattern", v.match.pattern()}, {"binding", binding}};
  }
  return out.dump(2) + "\n";
}

double eval_coefficient(const Expr& coeff, const match::Match& m, const graph::Model& model,
                        const match::Match* ctx) {
  auto resolve = [&](const AttrRef& ref) -> Value {
    const match::Match* src = ref.context ? ctx : &m;
    if (!src) throw UnboundRef(to_string(ref) + " has no forEach context");
    auto it = src->binding().find(ref.var);
    if (it == src->binding().end()) {
      throw UnboundRef(to_string(ref) + ": match " + src->fingerprint() + " binds no '" + ref.var + "'");
    }
    const graph::Node& n = model.node(it->second);
    auto a = n.attrs.find(ref.attr);
    if (a == n.attrs.end()) throw MissingAttribute("node '" + n.id + "' has no attribute '" + ref.attr + "'");
    return a->second;
  };
  try {
    const Value v = evaluate(coeff, resolve);
    if (!is_numeric(kind_of(v))) throw TypeError("coefficient " + to_source(coeff) + " is not a number");
    return as_number(v);
  } catch (const DivisionByZero& e) {
    throw DivisionByZero(std::string(e.what()) + " (match " + m.fingerprint() +
                         (ctx ? ", context " + ctx->fingerprint() : std::string()) + ")");
  }
}

namespace {

const std::vector<match::Match>& matches_of(const MatchSets& sets, const std::string& pattern) {
  static const std::vector<match::Match> none;
  auto it = sets.find(pattern);
  return it == sets.end() ? none : it->second;
}

// Variables of one mapping, grouped by the node ids a filter list compares.
class FilterIndex {
 public:
  using Key = std::vector<std::string>;

  const std::vector<std::size_t>& lookup(const std::string& mapping, const std::vector<dsl::Filter>& filters,
                                         const std::vector<std::size_t>& vars, const VarMap& vm,
                                         const match::Match* ctx) {
    if (filters.empty()) return vars;
    std::string cache_key = mapping;
    for (const auto& f : filters) cache_key += "|" + f.var;
    auto& index = cache_[cache_key];
    if (index.empty() && !vars.empty()) {
      for (std::size_t v : vars) {
        Key k;
        for (const auto& f : filters) k.push_back(vm.at(v).match.at(f.var));
        index[k].push_back(v);
      }
    }
    Key k;
    for (const auto& f : filters) k.push_back(ctx->at(f.ctx_var));
    auto it = index.find(k);
    static const std::vector<std::size_t> none;
    return it == index.end() ? none : it->second;
  }

 private:
  std::map<std::string, std::map<Key, std::vector<std::size_t>>> cache_;
};

}  // namespace

BuildResult build_ilp(const graph::Model& model, const dsl::Spec& spec, const MatchSets& matches) {
  BuildResult out;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_mapping;
  for (const auto& m : spec.mappings) {
    const match::Pattern* p = spec.target_pattern(m.target);
    if (!p) throw TypeError("mapping " + m.name + ": unknown target " + m.target);
    auto& vars = by_mapping[m.name];
    for (const auto& mt : matches_of(matches, p->name)) {
      const std::size_t i = out.varmap.add(m.name, mt);
      out.problem.add_var(out.varmap.at(i).id);
      vars.push_back(i);
    }
  }

  FilterIndex filters;
  // Adds sign * expr to (coeffs, constant) for one context.
  auto accumulate = [&](const dsl::LinearExpr& e, double sign, const match::Match* ctx,
                        std::map<std::size_t, double>& coeffs, double& constant) {
    for (const auto& t : e.terms) {
      if (!t.sum) {
        static const match::Match empty;
        constant += sign * eval_coefficient(t.coeff, ctx ? *ctx : empty, model, ctx);
        continue;
      }
      auto it = by_mapping.find(t.sum->mapping);
      if (it == by_mapping.end()) throw TypeError("unknown mapping " + t.sum->mapping);
      if (!t.sum->filters.empty() && !ctx) throw UnboundRef("sum filter outside a forEach constraint");
      for (std::size_t v : filters.lookup(t.sum->mapping, t.sum->filters, it->second, out.varmap, ctx)) {
        coeffs[v] += sign * eval_coefficient(t.coeff, out.varmap.at(v).match, model, ctx);
      }
    }
  };

  for (std::size_t ci = 0; ci < spec.constraints.size(); ++ci) {
    const auto& c = spec.constraints[ci];
    std::vector<const match::Match*> contexts;
    if (c.for_each) {
      const match::Pattern* p = spec.target_pattern(*c.for_each);
      if (!p) throw TypeError("forEach: unknown target " + *c.for_each);
      for (const auto& mt : matches_of(matches, p->name)) contexts.push_back(&mt);
    } else {
      contexts.push_back(nullptr);
    }
    for (const match::Match* ctx : contexts) {
      std::map<std::size_t, double> coeffs;
      double constant = 0.0;
      accumulate(c.lhs, 1.0, ctx, coeffs, constant);
      accumulate(c.rhs, -1.0, ctx, coeffs, constant);
      ilp::LinearConstraint row;
      for (const auto& [v, k] : coeffs) row.terms.push_back({v, k});
      row.relation = c.relation == dsl::Relation::Le   ? ilp::Relation::Le
                     : c.relation == dsl::Relation::Ge ? ilp::Relation::Ge
                                                       : ilp::Relation::Eq;
      row.rhs = -constant;
      out.problem.add_constraint(std::move(row));
      out.rows.push_back({ci, ctx ? std::optional<match::Match>(*ctx) : std::nullopt});
    }
  }

  if (spec.objective) {
    out.problem.set_sense(spec.objective->maximize ? ilp::Sense::Maximize : ilp::Sense::Minimize);
    std::map<std::size_t, double> coeffs;
    double constant = 0.0;
    accumulate(spec.objective->expr, 1.0, nullptr, coeffs, constant);
    for (const auto& [v, k] : coeffs) out.problem.set_objective(v, k);
    out.problem.set_objective_offset(constant);
  }
  return out;
}

void apply_selection(graph::Model& model, const dsl::Spec& spec, const std::vector<Application>& selected) {
  const std::uint64_t start = model.version();
  for (const auto& a : selected) {
    const dsl::RuleDecl* r = spec.find_rule(a.rule);
    if (!r) throw TypeError("unknown rule " + a.rule);
    if (!rule::precheck(model, r->rule, a.match)) {
      model.rollback_to(start);
      throw SelectionConflict("selected match " + a.match.fingerprint() + " of rule " + a.rule +
                              " was invalidated by another selected application");
    }
    try {
      rule::apply(model, r->rule, a.match);
    } catch (const Error& e) {
      model.rollback_to(start);
      throw SelectionConflict("applying rule " + a.rule + " at " + a.match.fingerprint() + " failed: " + e.what());
    }
  }
}

std::vector<match::Pattern> spec_patterns(const dsl::Spec& spec) {
  std::vector<match::Pattern> out = spec.patterns;
  for (const auto& r : spec.rules) {
    if (!r.lhs_pattern) out.push_back(r.rule.lhs);
  }
  return out;
}

Engine::Engine(dsl::Spec spec, const graph::Metamodel& metamodel, EngineOptions options)
    : spec_(std::move(spec)), options_(std::move(options)), matcher_(spec_patterns(spec_)) {
  auto diags = dsl::typecheck(spec_, metamodel);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) msg += (msg.empty() ? "" : "\n") + dsl::format(d);
    throw TypeError(msg);
  }
}

MatchSets Engine::current_matches() const {
  MatchSets out;
  for (const auto& p : matcher_.patterns()) out[p.name] = matcher_.matches(p.name);
  return out;
}

CycleReport Engine::run_cycle(graph::Model& model) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  const auto t0 = Clock::now();
  CycleReport rep;
  rep.cycle = ++cycles_;
  rep.version_before = model.version();

  auto t = Clock::now();
  const match::MatchDelta delta = matcher_.update(model);
  rep.appeared = delta.appeared.size();
  rep.vanished = delta.vanished.size();
  const MatchSets sets = current_matches();
  rep.gt_ms += ms(Clock::now() - t);

  t = Clock::now();
  last_build_ = build_ilp(model, spec_, sets);
  last_solution_ = ilp::solve_ilp(last_build_.problem);
  rep.ilp_ms += ms(Clock::now() - t);
  rep.variables = last_build_.problem.var_count();
  rep.constraints = last_build_.problem.constraints().size();
  rep.status = last_solution_.status;
  rep.objective = last_solution_.objective_value;
  rep.bb_nodes = last_solution_.node_count;

  if (options_.dump_dir) {
    std::filesystem::create_directories(*options_.dump_dir);
    const std::string stem = "cycle_" + std::to_string(rep.cycle);
    std::ofstream lp(*options_.dump_dir / (stem + ".lp"));
    std::ofstream vm(*options_.dump_dir / (stem + ".varmap.json"));
    lp << ilp::write_lp(last_build_.problem);
    vm << last_build_.varmap.to_json();
    if (!lp || !vm) throw IoError("cannot write LP dump to " + options_.dump_dir->string());
  }

  if (rep.status == ilp::Status::Optimal) {
    for (std::size_t i = 0; i < last_build_.varmap.size(); ++i) {
      if (last_solution_.values[i] != 1) continue;
      const MappingVar& v = last_build_.varmap.at(i);
      const dsl::MappingDecl* m = spec_.find_mapping(v.mapping);
      if (m && spec_.find_rule(m->target)) rep.selected.push_back({m->target, v.mapping, v.match});
    }
    t = Clock::now();
    try {
      apply_selection(model, spec_, rep.selected);
    } catch (const SelectionConflict&) {
      matcher_.update(model);
      throw;
    }
    matcher_.update(model);
    rep.gt_ms += ms(Clock::now() - t);
  }
  rep.version_after = model.version();
  rep.total_ms = ms(Clock::now() - t0);
  rep.misc_ms = std::max(0.0, rep.total_ms - rep.gt_ms - rep.ilp_ms);
  return rep;
}

}  // namespace gips::pipeline
