#include <catch_amalgamated.hpp>

#include <random>

#include "relcert/certificates.hpp"

using namespace relcert;

namespace {

Rational q(const char* s) { return parse_rational(s); }

std::shared_ptr<const Group> Z() { return Group::parse("abelian(a)"); }

CosetSpace z_trivial(std::size_t depth) {
  auto z = Z();
  return build_coset_space(z, {subgroup(*z, "1", {})}, depth);
}

// Uniform measure on the interval [x, x + n) in ℤ with the trivial subgroup.
ProbCertificate interval_certificate(const CosetSpace& cs, std::size_t window, int n) {
  const auto& z = cs.group();
  ProbCertificate c{Convention::reiter, {}};
  for (const auto& x : z.ball(window)) {
    auto& m = c.entries[x.word];
    for (int i = 0; i < n; ++i) m[cs.act(z.multiply(x, z.element("a^" + std::to_string(i))), 0)] = Rational(1, n);
  }
  return c;
}

IntegerCertificate random_integer(std::mt19937_64& rng, const std::vector<Element>& window, VertexId vertices,
                                  std::uint64_t top) {
  std::uniform_int_distribution<std::uint64_t> value(0, top);
  std::uniform_int_distribution<VertexId> pick(0, vertices - 1);
  IntegerCertificate c{Convention::reiter, {}};
  for (const auto& x : window) {
    Counts xi;
    for (VertexId k = 0; k < vertices; ++k)
      if (auto v = value(rng)) xi[k] = v;
    if (xi.empty()) xi[pick(rng)] = 1;
    c.entries[x.word] = xi;
  }
  return c;
}

}  // namespace

TEST_CASE("sets_to_integer counts multiplicities", "[cert]") {
  Word x;
  SetFamilyCertificate s{Convention::reiter, {}};
  s.entries[x] = {{4, 1}, {4, 2}, {7, 1}};
  auto xi = sets_to_integer(s).entries.at(x);
  CHECK(xi == Counts{{4, 2}, {7, 1}});
  s.entries[x] = {{4, 1}};
  CHECK(sets_to_integer(s).entries.at(x) == Counts{{4, 1}});

  CellSet ax{{1, 1}}, ay{{2, 1}};
  CHECK(symmetric_difference_size(ax, ay) == 2);
  CHECK(l1_distance(Counts{{1, 1}}, Counts{{2, 1}}) == 2);
}

TEST_CASE("integer_to_sets builds initial segments", "[cert]") {
  Word x;
  IntegerCertificate c{Convention::reiter, {}};
  c.entries[x] = {{3, 2}};
  CHECK(integer_to_sets(c).entries.at(x) == CellSet{{3, 1}, {3, 2}});
  c.entries[x] = {{5, 1}};
  CHECK(integer_to_sets(c).entries.at(x) == CellSet{{5, 1}});
}

TEST_CASE("malformed certificates are rejected", "[cert]") {
  SetFamilyCertificate s{Convention::reiter, {}};
  s.entries[Word{}] = {{0, 2}};
  CHECK_THROWS_AS(validate(s), FormatError);
  s.entries[Word{}] = {};
  CHECK_THROWS_AS(validate(s), FormatError);

  IntegerCertificate c{Convention::reiter, {}};
  c.entries[Word{}] = {};
  CHECK_THROWS_AS(validate(c), FormatError);
  CHECK_THROWS_AS(integer_to_prob(c), SpecError);

  ProbCertificate p{Convention::reiter, {}};
  p.entries[Word{}] = {{0, q("9/10")}};
  CHECK_THROWS_AS(validate(p), FormatError);
  p.entries[Word{}] = {{0, q("3/2")}, {1, q("-1/2")}};
  CHECK_THROWS_AS(validate(p), FormatError);
}

TEST_CASE("integer_to_prob normalizes exactly", "[cert]") {
  IntegerCertificate c{Convention::reiter, {}};
  c.entries[Word{}] = {{0, 2}, {1, 1}};
  CHECK(integer_to_prob(c).entries.at(Word{}) == Measure{{0, q("2/3")}, {1, q("1/3")}});

  Counts xi_x{{1, 1}}, xi_y{{2, 1}};
  auto fx = normalize(xi_x), fy = normalize(xi_y);
  CHECK(l1_distance(fx, fy) == 2);
  CHECK(l1_distance(fx, fy) <= Rational(2 * l1_distance(xi_x, xi_y), mass(xi_x)));
}

TEST_CASE("prob_to_integer uses largest remainders", "[cert]") {
  CHECK(round_to_integer({{0, q("17/50")}, {1, q("33/50")}}, 10) == Counts{{0, 3}, {1, 7}});
  CHECK(round_to_integer({{0, q("1/3")}, {1, q("1/3")}, {2, q("1/3")}}, 3) == Counts{{0, 1}, {1, 1}, {2, 1}});
  CHECK(round_to_integer({{0, q("1/2")}, {1, q("1/2")}}, 3) == Counts{{0, 2}, {1, 1}});
  CHECK_THROWS_AS(round_to_integer({{0, 1}}, 0), SpecError);
}

TEST_CASE("rounding to M and back stays within |supp|/M", "[cert][property]") {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> weight(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    Counts raw;
    for (VertexId k = 0; k < 8; ++k)
      if (auto w = weight(rng)) raw[k] = static_cast<std::uint64_t>(w);
    if (raw.empty()) raw[0] = 1;
    auto f = normalize(raw);
    for (std::uint64_t M : {1, 2, 7, 10, 64}) {
      auto xi = round_to_integer(f, M);
      CHECK(mass(xi) == M);
      Measure scaled;
      for (auto [k, n] : xi) scaled[k] = Rational(n) / M;
      CHECK(l1_distance(scaled, f) < Rational(f.size()) / M);
    }
  }
}

TEST_CASE("sets and integer forms round-trip with equal norms", "[cert][property]") {
  auto g = Group::parse("free(a,b)");
  auto window = g->ball(2);
  REQUIRE(window.size() == 17);
  std::mt19937_64 rng(20261016);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = random_integer(rng, window, 30, 3);
    auto sets = integer_to_sets(c);
    CHECK(sets_to_integer(sets).entries == c.entries);
    CHECK(integer_to_sets(sets_to_integer(sets)).entries == sets.entries);
    for (const auto& x : window) {
      const auto& ax = sets.entries.at(x.word);
      CHECK(ax.size() == mass(c.entries.at(x.word)));
      for (const auto& y : window)
        CHECK(symmetric_difference_size(ax, sets.entries.at(y.word)) ==
              l1_distance(c.entries.at(x.word), c.entries.at(y.word)));
    }
  }
}

TEST_CASE("normalizing at most doubles the variation ratio", "[cert][property]") {
  auto g = Group::parse("free(a,b)");
  auto window = g->ball(1);
  std::mt19937_64 rng(5);
  std::size_t equal_mass = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto c = random_integer(rng, window, 6, 4);
    auto p = integer_to_prob(c);
    for (const auto& x : window)
      for (const auto& y : window) {
        const auto &xi = c.entries.at(x.word), &eta = c.entries.at(y.word);
        Rational ratio(l1_distance(xi, eta), mass(xi));
        auto d = l1_distance(p.entries.at(x.word), p.entries.at(y.word));
        CHECK(d <= 2 * ratio);
        if (mass(xi) == mass(eta)) {
          ++equal_mass;
          CHECK(d == ratio);
        }
      }
  }
  CHECK(equal_mass > 0);
}

TEST_CASE("verify examples", "[cert]") {
  SECTION("uniform measure on Z/2Z") {
    auto z = Z();
    auto cs = build_coset_space(z, {subgroup(*z, "2Z", {"a^2"})}, 2);
    ProbCertificate c{Convention::reiter, {}};
    for (const auto& x : z->ball(3)) c.entries[x.word] = {{0, q("1/2")}, {1, q("1/2")}};
    auto rep = verify(c, cs, {1, q("1/1000000"), 2, 3});
    CHECK(rep.passed());
    CHECK(rep.achieved_variation == 0);
    CHECK(rep.pairs_checked == 12);
  }
  SECTION("point masses on Z fail") {
    auto cs = z_trivial(4);
    const auto& z = cs.group();
    ProbCertificate c{Convention::reiter, {}};
    for (const auto& x : z.ball(2)) c.entries[x.word] = {{cs.act(x, 0), 1}};
    auto rep = verify(c, cs, {1, 1, 1, 2});
    CHECK(rep.support_ok);
    CHECK_FALSE(rep.variation_ok);
    CHECK_FALSE(rep.passed());
    CHECK(rep.achieved_variation == 2);
    REQUIRE(rep.variation_witness);
    CHECK(rep.variation_witness->value == 2);
  }
  SECTION("intervals of length 4") {
    auto cs = z_trivial(8);
    auto c = interval_certificate(cs, 3, 4);
    auto rep = verify(c, cs, {1, q("3/5"), 4, 3});
    CHECK(rep.passed());
    CHECK(rep.achieved_variation == q("1/2"));
    REQUIRE(rep.support_witness);
    CHECK(rep.support_witness->rho == 3);
    CHECK_FALSE(verify(c, cs, {1, q("1/2"), 4, 3}).passed());
    CHECK_FALSE(verify(c, cs, {1, q("3/5"), 3, 3}).support_ok);
  }
}

TEST_CASE("verify flags convention mismatch and missing entries", "[cert]") {
  auto cs = z_trivial(6);
  auto c = interval_certificate(cs, 2, 2);
  CHECK_THROWS_AS(verify(c, cs, {1, 1, 2, 2}, Convention::identity), SpecError);
  CHECK_NOTHROW(verify(c, cs, {1, 1, 2, 2}, Convention::reiter));
  CHECK_THROWS_AS(verify(c, cs, {1, 1, 2, 3}), OutOfWindow);
  CHECK_THROWS_AS(verify(c, cs, {3, 1, 2, 2}), SpecError);  // window < R
}

TEST_CASE("set-form ratio uses the first entry's size", "[cert]") {
  auto cs = z_trivial(4);
  const auto& z = cs.group();
  SetFamilyCertificate s{Convention::reiter, {}};
  // A_e has 1 cell, A_a and A_a^-1 have 2: ratios 3/1 and 3/2 differ by direction.
  s.entries[Word{}] = {{0, 1}};
  s.entries[z.element("a").word] = {{cs.act(z.element("a"), 0), 1}, {cs.act(z.element("a"), 0), 2}};
  s.entries[z.element("a^-1").word] = {{cs.act(z.element("a^-1"), 0), 1}, {cs.act(z.element("a^-1"), 0), 2}};
  auto rep = verify(s, cs, {1, 4, 1, 1});
  CHECK(rep.achieved_variation == 3);
  REQUIRE(rep.variation_witness);
  CHECK(rep.variation_witness->x.empty());
  auto pairs = pair_variations(s, cs, 1, 1);
  std::vector<Rational> values;
  for (auto& p : pairs) values.push_back(p.value);
  std::sort(values.begin(), values.end());
  CHECK(values == std::vector<Rational>{q("3/2"), q("3/2"), 3, 3});
}

TEST_CASE("verify is monotone in its parameters", "[cert][property]") {
  auto cs = z_trivial(12);
  for (int n : {1, 2, 3, 5}) {
    auto c = interval_certificate(cs, 4, n);
    for (std::size_t R = 1; R <= 3; ++R)
      for (std::size_t S = 1; S <= 6; ++S)
        for (auto eps : {q("1/3"), q("1/2"), q("2/3"), q("4/5"), q("1"), q("5/2")}) {
          if (!verify(c, cs, {R, eps, S, 4}).passed()) continue;
          CHECK(verify(c, cs, {R - 1 ? R - 1 : 1, eps, S, 4}).passed());
          CHECK(verify(c, cs, {R, eps + q("1/7"), S, 4}).passed());
          CHECK(verify(c, cs, {R, eps, S + 1, 4}).passed());
        }
  }
}

TEST_CASE("identity-centered verification translates the measure", "[cert]") {
  auto cs = z_trivial(6);
  const auto& z = cs.group();
  ProbCertificate c{Convention::identity, {}};
  for (const auto& x : z.ball(2)) c.entries[x.word] = {{0, q("1/2")}, {cs.act(z.element("a"), 0), q("1/2")}};
  // g·μ − μ for g = a moves half the mass off the support.
  auto rep = verify(c, cs, {1, 2, 2, 2});
  CHECK(rep.achieved_variation == 1);
  CHECK(rep.support_ok);
  CHECK_FALSE(verify(c, cs, {1, 2, 1, 2}).support_ok);
}
