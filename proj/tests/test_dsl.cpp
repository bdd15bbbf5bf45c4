#include <doctest.h>

#include <random>

#include "gips/dsl/spec.hpp"
#include "gips/errors.hpp"
#include "gips/overlay/overlay.hpp"
#include "support.hpp"

using namespace gips;
using namespace gips::dsl;

namespace {

const char* kTrivial = R"(
rule r { lhs { c: Client } do { set c.connected := true } }
mapping m to r
constraint: sum(m) = 1
minimize: sum(m)
)";

bool mentions(const std::vector<Diagnostic>& ds, std::string_view text) {
  for (const auto& d : ds) {
    if (d.message.find(text) != std::string::npos) return true;
  }
  return false;
}

// Line and column must agree with the offset, and the span must fit the text.
void check_spans(std::string_view text, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) {
    INFO(format(d));
    REQUIRE(d.span.offset + d.span.length <= text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < d.span.offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    CHECK(d.span.line == line);
    CHECK(d.span.column == col);
  }
}

const char* kRandomBase = R"(
pattern w {
  s: LectureStudioServer
  c: Client
  s -clients-> c
}
rule r { lhs w do { set c.connected := true } }
mapping m to r
mapping n to w
)";

class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

  std::string linear(int depth) {
    std::string out = term(depth);
    const int more = pick(3);
    for (int i = 0; i < more; ++i) out += (pick(2) ? " + " : " - ") + term(depth);
    return out;
  }

 private:
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

  std::string number() {
    static const char* nums[] = {"1", "2", "0.5", "3.25", "10", "1e2", "7"};
    return nums[pick(7)];
  }
  std::string constant() {
    switch (pick(4)) {
      case 0: return "ctx.c.upload";
      case 1: return "(" + number() + " + ctx.s.upload)";
      default: return number();
    }
  }
  std::string sum() {
    static const char* sums[] = {"sum(m)", "sum(n)", "sum(m where c == ctx.c)", "sum(n where s == ctx.s and c == ctx.c)"};
    return sums[pick(4)];
  }
  std::string term(int depth) {
    switch (depth > 0 ? pick(7) : pick(4)) {
      case 0: return constant();
      case 1: return sum();
      case 2: return constant() + " * " + sum();
      case 3: return "c.upload * " + sum();
      case 4: return "(" + linear(depth - 1) + ") * " + constant();
      case 5: return "-(" + linear(depth - 1) + ")";
      default: return "(" + linear(depth - 1) + ") / " + number();
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST_SUITE("dsl") {

TEST_CASE("trivial spec") {
  auto r = parse(kTrivial);
  REQUIRE(r.ok());
  CHECK(r.spec.mappings.size() == 1);
  CHECK(r.spec.constraints.size() == 1);
  CHECK(r.spec.rules.size() == 1);
  REQUIRE(r.spec.objective);
  CHECK_FALSE(r.spec.objective->maximize);
  CHECK(typecheck(r.spec, *overlay::overlay_metamodel()).empty());
}

TEST_CASE("empty input needs an objective") {
  auto r = parse("");
  CHECK_FALSE(r.ok());
  CHECK(mentions(r.diagnostics, "missing objective"));
  check_spans("", r.diagnostics);
}

TEST_CASE("unknown mapping in a sum is named with its span") {
  const std::string text = "constraint: sum(unknown) = 1\nminimize: 0\n";
  auto r = parse(text);
  REQUIRE(r.diagnostics.size() == 1);
  const Diagnostic& d = r.diagnostics[0];
  CHECK(d.message.find("unknown") != std::string::npos);
  CHECK(text.substr(d.span.offset, d.span.length).find("unknown") != std::string::npos);
  CHECK(d.span.line == 1);
  check_spans(text, r.diagnostics);
}

TEST_CASE("scanning continues after the first error") {
  const std::string text = R"(
pattern p { c: Client  c -> ; x: }
mapping m to nowhere
constraint: sum(m) = = 1
minimize sum(m)
)";
  auto r = parse(text);
  CHECK(r.diagnostics.size() >= 3);
  check_spans(text, r.diagnostics);
}

TEST_CASE("resolver errors") {
  auto one = [](const std::string& text) { return parse(text).diagnostics; };
  CHECK(mentions(one(std::string(kTrivial) + "maximize: sum(m)\n"), "more than one objective"));
  CHECK(mentions(one(std::string(kTrivial) + "mapping m to r\n"), "m"));
  CHECK_FALSE(one(std::string(kTrivial) + "constraint: ctx.c.upload * sum(m) <= 1\n").empty());
  CHECK_FALSE(one(std::string(kTrivial) + "constraint: c.upload <= 1\n").empty());
  CHECK_FALSE(one(std::string(kTrivial) + "constraint: sum(m) * sum(m) <= 1\n").empty());
  CHECK_FALSE(one(std::string(kTrivial) + "constraint: 1 / sum(m) <= 1\n").empty());
  CHECK_FALSE(one(std::string(kTrivial) + "constraint forEach r: sum(m where zz == ctx.c) <= 1\n").empty());
  CHECK_FALSE(one(std::string(kTrivial) + "constraint forEach nothing: sum(m) <= 1\n").empty());
}

TEST_CASE("typecheck diagnostics") {
  const auto& mm = *overlay::overlay_metamodel();
  SUBCASE("unknown node type") {
    auto r = parse("pattern p { c: Clientt }\nmapping m to p\nminimize: sum(m)\n");
    REQUIRE(r.ok());
    auto ds = typecheck(r.spec, mm);
    CHECK(ds.size() == 1);
    CHECK(mentions(ds, "Clientt"));
  }
  SUBCASE("bool in arithmetic") {
    auto r = parse("pattern p { c: Client  require c.rc + 1 = 2 }\nmapping m to p\nminimize: sum(m)\n");
    REQUIRE(r.ok());
    auto ds = typecheck(r.spec, mm);
    REQUIRE(ds.size() == 1);
    CHECK(mentions(ds, "bool"));
  }
  SUBCASE("non-numeric coefficient") {
    auto r = parse("pattern p { c: Client }\nmapping m to p\nminimize: c.rc * sum(m)\n");
    REQUIRE(r.ok());
    CHECK_FALSE(typecheck(r.spec, mm).empty());
  }
  SUBCASE("filter across types") {
    auto r = parse("pattern p { c: Client  s: LectureStudioServer }\nmapping m to p\n"
                   "constraint forEach p: sum(m where c == ctx.s) <= 1\nminimize: sum(m)\n");
    REQUIRE(r.ok());
    CHECK_FALSE(typecheck(r.spec, mm).empty());
  }
  SUBCASE("load_spec throws") {
    CHECK_THROWS_AS(load_spec("pattern p { c: Clientt }\nmapping m to p\nminimize: sum(m)\n", mm), TypeError);
    CHECK_THROWS_AS(load_spec("minimize sum(", mm), ParseError);
  }
}

TEST_CASE("shipped overlay spec") {
  const std::string text(overlay::overlay_spec_text());
  auto r = parse(text);
  REQUIRE(r.ok());
  CHECK(typecheck(r.spec, *overlay::overlay_metamodel()).empty());
  CHECK(r.spec.rules.size() == 3);
  CHECK(r.spec.objective);
  // connectToRelay: P2PLink node, source, target, i.connected, j.rc
  const RuleDecl* link = r.spec.find_rule("connectToRelay");
  REQUIRE(link);
  CHECK(link->rule.actions.size() == 5);
  CHECK(link->lhs_pattern == std::optional<std::string>("candidateLink"));
}

TEST_CASE("pretty print is a fixpoint") {
  SUBCASE("overlay spec") {
    auto first = parse(overlay::overlay_spec_text());
    REQUIRE(first.ok());
    const std::string pp = pretty_print(first.spec);
    auto second = parse(pp);
    INFO(pp);
    REQUIRE(second.ok());
    CHECK(second.spec == first.spec);
    CHECK(pretty_print(second.spec) == pp);
  }
  SUBCASE("random constraints") {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
      ExprGen gen(seed);
      std::string text = kRandomBase;
      text += "constraint forEach w: " + gen.linear(2) + " <= " + gen.linear(1) + "\n";
      text += "constraint: " + std::string("sum(m) + 2 * sum(n) >= 1") + "\n";
      text += "maximize: c.upload * sum(m) - 0.5 * (sum(n) - 3)\n";
      auto first = parse(text);
      INFO(text);
      REQUIRE(first.ok());
      const std::string pp = pretty_print(first.spec);
      auto second = parse(pp);
      INFO(pp);
      REQUIRE(second.ok());
      CHECK(second.spec == first.spec);
    }
  }
  SUBCASE("does not depend on layout") {
    auto a = parse(kTrivial);
    auto b = parse("rule r{lhs{c:Client}do{set c.connected:=true}}mapping m to r constraint:sum(m)=1 minimize:sum(m)");
    REQUIRE(b.ok());
    CHECK(a.spec == b.spec);
  }
}

}  // TEST_SUITE
