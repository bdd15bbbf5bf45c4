#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gips/match/pattern.hpp"

namespace gips::match {

struct MatchDelta {
  std::vector<Match> appeared;
  std::vector<Match> vanished;
  std::uint64_t at_version = 0;

  bool empty() const { return appeared.empty() && vanished.empty(); }
};

// Maintains the match sets of a fixed group of patterns across model versions
// by consuming the model's change journal. Single owner.
class IncrementalMatcher {
 public:
  explicit IncrementalMatcher(std::vector<Pattern> patterns);

  // Full match of every pattern at the model's current version.
  void reset(const graph::Model& model);

  // Brings the match sets up to the model's current version and reports the
  // exact difference. The first call on a fresh matcher behaves like reset()
  // and reports every match as appeared. Throws StaleState if the journal no
  // longer covers the versions since the last update.
  MatchDelta update(const graph::Model& model);

  bool initialized() const { return initialized_; }
  std::uint64_t version() const { return version_; }

  const std::vector<Pattern>& patterns() const { return patterns_; }
  const Pattern& pattern(std::string_view name) const;

  // Current matches of `pattern`, sorted by fingerprint.
  std::vector<Match> matches(std::string_view pattern) const;
  std::size_t match_count(std::string_view pattern) const;

 private:
  std::vector<Pattern> patterns_;
  std::map<std::string, std::map<std::string, Match>, std::less<>> sets_;
  std::uint64_t version_ = 0;
  bool initialized_ = false;
};

}  // namespace gips::match
