#include <doctest.h>

#include <cmath>
#include <random>

#include "gips/errors.hpp"
#include "gips/ilp/problem.hpp"
#include "oracles.hpp"

using namespace gips;
using namespace gips::ilp;

namespace {

IlpProblem two_var() {
  IlpProblem p;
  p.add_var("a");
  p.add_var("b");
  p.set_objective(0, 2);
  p.set_objective(1, 3);
  p.add_constraint({"", {{0, 1}, {1, 1}}, Relation::Ge, 1});
  return p;
}

IlpProblem role_toy() {
  IlpProblem p;
  for (auto v : {"rc", "c", "p"}) p.add_var(v);
  p.set_objective(0, 5);
  p.set_objective(1, 2);
  p.set_objective(2, 1);
  p.add_constraint({"", {{0, 1}, {1, 1}, {2, 1}}, Relation::Eq, 1});
  return p;
}

}  // namespace

TEST_SUITE("ilp") {

TEST_CASE("problem construction") {
  IlpProblem p;
  p.add_var("x");
  CHECK_THROWS_AS(p.add_var("x"), NameCollision);
  CHECK_THROWS_AS(p.add_constraint({"", {{3, 1}}, Relation::Le, 1}), TypeError);
  CHECK_THROWS_AS(p.add_constraint({"", {{0, NAN}}, Relation::Le, 1}), TypeError);
  p.add_constraint({"", {{0, 1}, {0, 2}}, Relation::Le, 1});
  CHECK(p.constraints()[0].terms == std::vector<Term>{{0, 3}});
  CHECK_THROWS_AS(p.var_index("y"), NotFound);
}

TEST_CASE("lp examples") {
  IlpProblem p;
  p.add_var("x");
  p.set_sense(Sense::Maximize);
  p.set_objective(0, 1);
  auto s = solve_lp(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.values[0] == 1.0);
  CHECK(s.objective_value == 1.0);

  auto t = solve_lp(two_var());
  REQUIRE(t.status == Status::Optimal);
  CHECK(t.objective_value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(t.values[0] == doctest::Approx(1.0));
  CHECK(t.values[1] == doctest::Approx(0.0));

  IlpProblem q;
  q.add_var("x");
  q.add_constraint({"", {{0, 1}}, Relation::Le, 0.4});
  q.add_constraint({"", {{0, 1}}, Relation::Ge, 0.6});
  CHECK(solve_lp(q).status == Status::Infeasible);
}

TEST_CASE("lp relaxation with a fractional optimum") {
  // max x + y s.t. 2x + 2y <= 3 -> 1.5
  IlpProblem p;
  p.add_var("x");
  p.add_var("y");
  p.set_sense(Sense::Maximize);
  p.set_objective(0, 1);
  p.set_objective(1, 1);
  p.add_constraint({"", {{0, 2}, {1, 2}}, Relation::Le, 3});
  auto s = solve_lp(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(1.5).epsilon(1e-12));
  auto z = solve_ilp(p);
  CHECK(z.objective_value == 1.0);
}

TEST_CASE("ilp examples") {
  auto s = solve_ilp(two_var());
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.values == std::vector<int>{1, 0});
  CHECK(s.objective_value == 2.0);

  const IlpProblem toy = role_toy();
  auto e = oracle::enumerate(toy);
  auto t = solve_ilp(toy);
  REQUIRE(t.status == Status::Optimal);
  CHECK(t.objective_value == e.best);
  CHECK(t.objective_value == 1.0);
  CHECK(t.value(toy, "p") == 1);
  CHECK(t.value(toy, "rc") == 0);

  IlpProblem inf;
  inf.add_var("x1");
  inf.add_var("x2");
  inf.add_constraint({"", {{0, 1}, {1, 1}}, Relation::Le, -1});
  CHECK(solve_ilp(inf).status == Status::Infeasible);

  IlpProblem empty;
  auto z = solve_ilp(empty);
  CHECK(z.status == Status::Optimal);
  CHECK(z.objective_value == 0.0);

  IlpProblem trivially;
  trivially.add_constraint({"", {}, Relation::Eq, 1});
  CHECK(solve_ilp(trivially).status == Status::Infeasible);
}

TEST_CASE("branch and bound matches enumeration on random problems") {
  std::mt19937_64 rng(2024);
  int feasible = 0;
  for (int k = 0; k < 250; ++k) {
    const IlpProblem p = oracle::random_problem(rng, 12, 10);
    const auto e = oracle::enumerate(p);
    const auto s = solve_ilp(p);
    REQUIRE((s.status == Status::Optimal) == e.feasible);
    if (!e.feasible) continue;
    ++feasible;
    CHECK(s.objective_value == e.best);
    CHECK(max_violation(p, std::span<const int>(s.values)) <= 1e-6);
    const auto lp = solve_lp(p);
    REQUIRE(lp.status == Status::Optimal);
    if (p.sense() == Sense::Minimize) {
      CHECK(lp.objective_value <= s.objective_value + 1e-9);
    } else {
      CHECK(lp.objective_value >= s.objective_value - 1e-9);
    }
    const auto again = solve_ilp(p);
    CHECK(again.values == s.values);
    CHECK(again.node_count == s.node_count);
  }
  CHECK(feasible > 150);
}

TEST_CASE("exact sum") {
  std::vector<double> xs{1e100, 1.0, -1e100, 1e-3};
  CHECK(exact_sum(xs) == 1.001);
  std::vector<double> ys{0.1, 0.2, 0.3, -0.6};
  // reference values from Python's math.fsum
  CHECK(exact_sum(ys) == 2.7755575615628914e-17);
  std::vector<double> order1{1e16, 1.0, 1.0}, order2{1.0, 1.0, 1e16};
  CHECK(exact_sum(order1) == exact_sum(order2));
  CHECK(exact_sum(order1) == 1.0000000000000002e16);
  CHECK(exact_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("lp writer") {
  const std::string lp = write_lp(role_toy());
  CHECK(lp ==
        "Minimize\n"
        " obj: 5 rc + 2 c + p\n"
        "Subject To\n"
        " c1: rc + c + p = 1\n"
        "Bounds\n"
        " 0 <= rc <= 1\n"
        " 0 <= c <= 1\n"
        " 0 <= p <= 1\n"
        "Binaries\n"
        " rc c p\n"
        "End\n");
  CHECK(write_lp(IlpProblem{}) == "Minimize\n obj: 0\nSubject To\nEnd\n");

  IlpProblem p;
  p.add_var("direct::connectDirect(c=c1,s=server)");
  p.add_var("9lives");
  p.set_sense(Sense::Maximize);
  p.set_objective(0, -0.5);
  p.set_objective(1, 1);
  p.add_constraint({"cap:server", {{0, -1.25}, {1, 3}}, Relation::Ge, -2});
  const std::string w = write_lp(p);
  CHECK(w.find(" obj: - 0.5 direct__connectDirect_c_c1_s_server_ + _9lives\n") != std::string::npos);
  CHECK(w.find(" cap_server: - 1.25 direct__connectDirect_c_c1_s_server_ + 3 _9lives >= -2\n") !=
        std::string::npos);

  IlpProblem clash;
  clash.add_var("a-b");
  clash.add_var("a_b");
  CHECK_THROWS_AS(write_lp(clash), NameCollision);
}

}
