#include "gips/match/incremental.hpp"

#include <set>

#include "gips/errors.hpp"

namespace gips::match {

using graph::ChangeKind;
using graph::ChangeRecord;

IncrementalMatcher::IncrementalMatcher(std::vector<Pattern> patterns)
    : patterns_(std::move(patterns)) {
  std::set<std::string> names;
  for (const auto& p : patterns_) {
    if (!names.insert(p.name).second) throw TypeError("duplicate pattern '" + p.name + "'");
  }
}

const Pattern& IncrementalMatcher::pattern(std::string_view name) const {
  for (const auto& p : patterns_) {
    if (p.name == name) return p;
  }
  throw NotFound("matcher has no pattern '" + std::string(name) + "'");
}

void IncrementalMatcher::reset(const graph::Model& model) {
  sets_.clear();
  for (const auto& p : patterns_) {
    auto& set = sets_[p.name];
    for (auto& m : find_matches(p, model)) {
      std::string key = m.fingerprint();
      set.emplace(std::move(key), std::move(m));
    }
  }
  version_ = model.version();
  initialized_ = true;
}

namespace {

void touch(const ChangeRecord& rec, std::set<std::string>& touched) {
  switch (rec.kind) {
    case ChangeKind::CreateNode:
    case ChangeKind::DeleteNode:
      touched.insert(std::get<graph::Node>(rec.payload).id);
      break;
    case ChangeKind::CreateEdge:
    case ChangeKind::DeleteEdge: {
      const auto& e = std::get<graph::Edge>(rec.payload);
      touched.insert(e.src);
      touched.insert(e.tgt);
      break;
    }
    case ChangeKind::SetAttr:
      touched.insert(std::get<graph::AttrChange>(rec.payload).node);
      break;
  }
}

}  // namespace

MatchDelta IncrementalMatcher::update(const graph::Model& model) {
  MatchDelta delta;
  delta.at_version = model.version();

  if (!initialized_ || model.version() < version_) {
    // No usable history: recompute and diff against whatever we held.
    auto old_sets = std::move(sets_);
    reset(model);
    for (const auto& [name, set] : sets_) {
      const auto& old = old_sets[name];
      for (const auto& [fp, m] : set) {
        if (!old.count(fp)) delta.appeared.push_back(m);
      }
      for (const auto& [fp, m] : old) {
        if (!set.count(fp)) delta.vanished.push_back(m);
      }
    }
    return delta;
  }
  if (model.version() == version_) return delta;
  if (model.journal_base() > version_) {
    throw StaleState("journal truncated at version " + std::to_string(model.journal_base()) +
                     ", matcher is at version " + std::to_string(version_));
  }

  std::set<std::string> touched;
  for (const auto& rec : model.journal()) {
    if (rec.version > version_) touch(rec, touched);
  }

  for (const auto& p : patterns_) {
    auto& set = sets_[p.name];
    for (auto it = set.begin(); it != set.end();) {
      bool affected = false;
      for (const auto& [var, id] : it->second.binding()) {
        if (touched.count(id)) {
          affected = true;
          break;
        }
      }
      if (affected && !holds(p, model, it->second.binding())) {
        delta.vanished.push_back(std::move(it->second));
        it = set.erase(it);
      } else {
        ++it;
      }
    }
    for (const auto& id : touched) {
      if (!model.find_node(id)) continue;
      for (auto& m : find_matches_through(p, model, id)) {
        if (set.count(m.fingerprint())) continue;
        delta.appeared.push_back(m);
        std::string key = m.fingerprint();
        set.emplace(std::move(key), std::move(m));
      }
    }
  }
  version_ = model.version();
  return delta;
}

std::vector<Match> IncrementalMatcher::matches(std::string_view pattern) const {
  std::vector<Match> out;
  auto it = sets_.find(pattern);
  if (it == sets_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& [fp, m] : it->second) out.push_back(m);
  return out;
}

std::size_t IncrementalMatcher::match_count(std::string_view pattern) const {
  auto it = sets_.find(pattern);
  return it == sets_.end() ? 0 : it->second.size();
}

}  // namespace gips::match
