#include <catch_amalgamated.hpp>

#include <random>

#include "relcert/lp.hpp"

using namespace relcert;

namespace {

LPOptions exact_only() {
  LPOptions o;
  o.float_warm_start = false;
  return o;
}

}  // namespace

TEST_CASE("symmetric two-piece minimum", "[lp]") {
  LPInstance lp;
  auto x = lp.add_variable("x"), t = lp.add_variable("t");
  lp.add_row("a", {{t, 1}, {x, -1}}, Sense::ge, 0);
  lp.add_row("b", {{t, 1}, {x, 1}}, Sense::ge, 1);
  lp.add_row("c", {{x, 1}}, Sense::le, 1);
  lp.objective = {{t, 1}};
  for (auto opt : {LPOptions{}, exact_only()}) {
    auto sol = solve_lp(lp, opt);
    REQUIRE(sol.status == LPStatus::optimal);
    CHECK(sol.optimum == Rational(1, 2));
    CHECK(sol.assignment[x] == Rational(1, 2));
  }
}

TEST_CASE("contradictory bounds are infeasible", "[lp]") {
  LPInstance lp;
  auto x = lp.add_variable("x");
  lp.add_row("lo", {{x, 1}}, Sense::ge, 1);
  lp.add_row("hi", {{x, 1}}, Sense::le, 0);
  lp.objective = {{x, 1}};
  CHECK(solve_lp(lp).status == LPStatus::infeasible);
  CHECK(solve_lp(lp, exact_only()).status == LPStatus::infeasible);
}

TEST_CASE("Beale's cycling example terminates under Bland's rule", "[lp]") {
  // Dantzig's rule with lowest-index ties cycles on this instance; the hand
  // solution is x4 = 1, x6 = 1 with objective -5/4.
  LPInstance lp;
  auto x4 = lp.add_variable("x4"), x5 = lp.add_variable("x5"), x6 = lp.add_variable("x6"),
       x7 = lp.add_variable("x7");
  lp.add_row("r1", {{x4, Rational(1, 4)}, {x5, -8}, {x6, -1}, {x7, 9}}, Sense::le, 0);
  lp.add_row("r2", {{x4, Rational(1, 2)}, {x5, -12}, {x6, Rational(-1, 2)}, {x7, 3}}, Sense::le, 0);
  lp.add_row("r3", {{x6, 1}}, Sense::le, 1);
  lp.objective = {{x4, Rational(-3, 4)}, {x5, 20}, {x6, Rational(-1, 2)}, {x7, 6}};
  for (auto opt : {LPOptions{}, exact_only()}) {
    auto sol = solve_lp(lp, opt);
    REQUIRE(sol.status == LPStatus::optimal);
    CHECK(sol.optimum == Rational(-5, 4));
    CHECK(sol.assignment[x4] == 1);
    CHECK(sol.assignment[x6] == 1);
  }
}

TEST_CASE("unbounded and empty instances", "[lp]") {
  LPInstance lp;
  auto x = lp.add_variable("x");
  lp.add_row("r", {{x, 1}}, Sense::ge, 1);
  lp.objective = {{x, -1}};
  CHECK(solve_lp(lp).status == LPStatus::unbounded);
  CHECK(solve_lp(lp, exact_only()).status == LPStatus::unbounded);

  LPInstance empty;
  empty.add_variable("t");
  empty.objective = {{0, 1}};
  auto sol = solve_lp(empty);
  REQUIRE(sol.status == LPStatus::optimal);
  CHECK(sol.optimum == 0);
}

TEST_CASE("pivot cap reports cap-exceeded", "[lp]") {
  LPInstance lp;
  std::vector<std::uint32_t> v;
  for (int i = 0; i < 6; ++i) v.push_back(lp.add_variable("x" + std::to_string(i)));
  for (int i = 0; i < 6; ++i) lp.add_row("r" + std::to_string(i), {{v[i], 1}}, Sense::ge, i + 1);
  for (int i = 0; i < 6; ++i) lp.objective.push_back({v[i], 1});
  LPOptions o = exact_only();
  o.pivot_cap = 2;
  CHECK(solve_lp(lp, o).status == LPStatus::cap_exceeded);
}

TEST_CASE("float warm start agrees with pure exact Bland on random instances", "[lp][property]") {
  std::mt19937_64 rng(20261015);
  std::uniform_int_distribution<int> coef(-4, 4), rhs(0, 8), pick(0, 2);
  int optimal = 0;
  for (int trial = 0; trial < 60; ++trial) {
    LPInstance lp;
    int n = 3 + trial % 5, m = 2 + trial % 4;
    for (int j = 0; j < n; ++j) lp.add_variable("x" + std::to_string(j));
    for (int i = 0; i < m; ++i) {
      std::vector<Term> ts;
      for (int j = 0; j < n; ++j)
        if (int a = coef(rng)) ts.push_back({j, a});
      Sense s = pick(rng) == 0 ? Sense::eq : (pick(rng) == 0 ? Sense::ge : Sense::le);
      lp.add_row("r" + std::to_string(i), ts, s, rhs(rng));
    }
    // bounded objective: nonnegative costs
    for (int j = 0; j < n; ++j) lp.objective.push_back({j, Rational(std::abs(coef(rng)) + 1, 1 + j % 3)});
    auto a = solve_lp(lp), b = solve_lp(lp, exact_only());
    REQUIRE(a.status == b.status);
    if (a.status == LPStatus::optimal) {
      ++optimal;
      CHECK(a.optimum == b.optimum);
      CHECK(satisfies(lp, a.assignment));
      CHECK(satisfies(lp, b.assignment));
    }
  }
  CHECK(optimal > 10);
}

TEST_CASE("CPLEX LP export", "[lp]") {
  LPInstance lp;
  auto x = lp.add_variable("x"), t = lp.add_variable("t");
  lp.metadata["window"] = "2";
  lp.add_row("a", {{t, 1}, {x, -1}}, Sense::ge, 0);
  lp.add_row("b", {{x, Rational(1, 2)}}, Sense::le, 1);
  lp.objective = {{t, 1}};
  CHECK(to_lp_format(lp) ==
        "\\ window = 2\n"
        "Minimize\n obj: t\n"
        "Subject To\n a: t - x >= 0\n b: 0.5 x <= 1\n"
        "End\n");
}
