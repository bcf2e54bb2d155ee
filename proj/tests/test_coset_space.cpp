#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "relcert/coset_space.hpp"

using namespace relcert;

namespace {

std::shared_ptr<const Group> F2() { return Group::parse("free(a,b)"); }

CosetSpace f2_over(std::vector<std::string> labels, std::size_t depth) {
  auto g = F2();
  std::vector<SubgroupSpec> family;
  for (auto& l : labels) family.push_back(subgroup(*g, "<" + l + ">", {l}));
  return build_coset_space(g, family, depth);
}

}  // namespace

TEST_CASE("index-two subgroup of Z", "[coset]") {
  auto z = Group::parse("abelian(a)");
  for (std::size_t depth : {1, 2, 5}) {
    auto cs = build_coset_space(z, {subgroup(*z, "2Z", {"a^2"})}, depth);
    CHECK(cs.size() == 2);
    CHECK(cs.closed());
  }
  auto cs = build_coset_space(z, {subgroup(*z, "2Z", {"a^2"})}, 2);
  VertexId zero = cs.representatives()[0];
  CHECK(cs.rho(z->element("a^3"), zero) == 1);
  CHECK(cs.rho(z->identity(), zero) == 0);
  VertexId one = cs.act(z->element("a"), zero);
  CHECK(one != zero);
  CHECK(z->format(cs.transporter(one)) == "a");
  CHECK(cs.act(z->element("a^3"), one) == zero);
}

TEST_CASE("F2 over <a> at depth 1", "[coset]") {
  auto cs = f2_over({"a"}, 1);
  REQUIRE(cs.size() == 3);
  const auto& g = cs.group();
  std::vector<std::string> keys;
  for (VertexId v = 0; v < cs.size(); ++v) keys.push_back(g.format(cs.transporter(v)));
  CHECK(keys == std::vector<std::string>{"1", "b", "b^-1"});
  VertexId r = cs.representatives()[0];
  CHECK(cs.transporter(r).is_identity());
  CHECK(cs.act(g.element("a"), r) == r);
  CHECK(cs.rho(g.element("b"), r) == 1);
  CHECK(cs.rho(g.identity(), r) == 0);
  CHECK_FALSE(cs.closed());
}

TEST_CASE("transporters are shortlex-least coset elements", "[coset]") {
  auto cs = f2_over({"a"}, 2);
  const auto& g = cs.group();
  REQUIRE(cs.size() == 9);
  auto v = cs.find(0, g.parse_word("a b a^3"));
  REQUIRE(v);
  CHECK(g.format(cs.transporter(*v)) == "a b");
  CHECK(cs.transporter(*v).length() == 2);
  auto u = cs.find(0, g.parse_word("b a^-5"));
  REQUIRE(u);
  CHECK(g.format(cs.transporter(*u)) == "b");
}

TEST_CASE("coset counts agree with the brute-force oracle", "[coset]") {
  // tests/oracles/coset_counts.py
  CHECK(f2_over({"a"}, 1).size() == 3);
  CHECK(f2_over({"a"}, 2).size() == 9);
  CHECK(f2_over({"a"}, 3).size() == 27);
  auto both = f2_over({"a", "b"}, 2);
  CHECK(both.size() == 18);
  CHECK(both.component_vertices(0).size() == 9);
  CHECK(both.component_vertices(1).size() == 9);
  CHECK(f2_over({"a", "b"}, 3).size() == 54);
}

TEST_CASE("finite index families", "[coset]") {
  auto z = Group::parse("abelian(a)");
  auto cs = build_coset_space(z, {subgroup(*z, "2Z", {"a^2"}), subgroup(*z, "3Z", {"a^3"})}, 3);
  CHECK(cs.size() == 5);
  CHECK(cs.closed());

  auto f2 = F2();
  auto kernel = build_coset_space(f2, {subgroup(*f2, "even", {"a^2", "a b", "a b^-1"})}, 2);
  CHECK(kernel.size() == 2);
  CHECK(kernel.closed());
}

TEST_CASE("bounded membership in free products", "[coset]") {
  auto g = Group::parse("cyclic-product(2,0)");
  // <x1> is finite, so the bounded search is exhaustive
  auto cs = build_coset_space(g, {subgroup(*g, "H", {"x1"})}, 3);
  // reduced words ending in an x2 syllable: 1 + 2 + (2+2) + (2+2+4)
  CHECK(cs.size() == 15);
  auto h = Group::parse("cyclic-product(0,0)");
  SubgroupOracle oracle(h, {h->parse_word("x1 x2")}, 4);
  CHECK(oracle.contains(h->parse_word("x1 x2 x1 x2")));
  CHECK_FALSE(oracle.contains(h->parse_word("x1")));
  CHECK_THROWS_AS(oracle.contains(h->parse_word("x2 x1")), SearchExhausted);
  CHECK_THROWS_AS(build_coset_space(h, {SubgroupSpec{"H", {h->parse_word("x1 x2")}}}, 2), SearchExhausted);
}

TEST_CASE("abelian lattice membership", "[coset]") {
  auto z2 = Group::parse("abelian(2)");
  auto cs = build_coset_space(z2, {subgroup(*z2, "L", {"x1^2 x2", "x2^3"})}, 6);
  // index = |det [[2,1],[0,3]]| = 6
  CHECK(cs.size() == 6);
  CHECK(cs.closed());
  auto row = build_coset_space(z2, {subgroup(*z2, "Zx0", {"x1"})}, 3);
  CHECK(row.size() == 7);
}

TEST_CASE("persisted vertices restore and tampering is rejected", "[coset]") {
  auto cs = f2_over({"a", "b"}, 2);
  auto back = CosetSpace::restore(cs.group_ptr(), cs.family(), cs.depth(), cs.options(), cs.vertices());
  CHECK(back.vertices() == cs.vertices());
  auto bad = cs.vertices();
  bad[1].key = cs.group().parse_word("b a");
  CHECK_THROWS_AS(CosetSpace::restore(cs.group_ptr(), cs.family(), cs.depth(), cs.options(), bad), FormatError);
  bad = cs.vertices();
  bad.pop_back();
  CHECK_THROWS_AS(CosetSpace::restore(cs.group_ptr(), cs.family(), cs.depth(), cs.options(), bad), FormatError);
}

TEST_CASE("rho identities and the transporter Lipschitz bound", "[coset][property]") {
  for (auto cs : {f2_over({"a", "b"}, 4), f2_over({"a"}, 4)}) {
    const auto& g = cs.group();
    auto ball = g.ball(2);
    for (VertexId v = 0; v < cs.size(); ++v) {
      if (cs.vertex(v).key.size() > 2) continue;
      for (const auto& x : ball) {
        auto gv = cs.act(g.inverse(x), v);
        CHECK(cs.rho(x, v) == cs.rho(g.identity(), gv));
        for (const auto& y : ball) {
          long long diff = (long long)cs.rho(x, v) - (long long)cs.rho(y, v);
          CHECK(std::llabs(diff) <= (long long)g.distance(x, y));
        }
      }
    }
  }
}

TEST_CASE("action laws where defined", "[coset][property]") {
  auto cs = f2_over({"a", "b"}, 5);
  const auto& g = cs.group();
  auto ball = g.ball(2);
  for (VertexId v = 0; v < cs.size(); ++v) {
    if (cs.vertex(v).key.size() > 1) continue;
    CHECK(cs.act(g.identity(), v) == v);
    for (const auto& x : ball)
      for (const auto& y : ball)
        CHECK(cs.act(g.multiply(x, y), v) == cs.act(x, cs.act(y, v)));
  }
}

TEST_CASE("stabilizers of representatives", "[coset][property]") {
  auto cs = f2_over({"a", "b"}, 4);
  const auto& g = cs.group();
  for (std::uint32_t i = 0; i < 2; ++i) {
    VertexId r = cs.representatives()[i];
    SubgroupOracle h(cs.group_ptr(), cs.family()[i].generators, 10);
    for (const auto& x : g.ball(2)) CHECK((cs.act(x, r) == r) == h.contains(x.word));
  }
}

TEST_CASE("enumeration is stable under deepening", "[coset][property]") {
  auto small = f2_over({"a", "b"}, 2), big = f2_over({"a", "b"}, 3);
  std::set<std::pair<std::uint32_t, std::vector<std::uint32_t>>> keys;
  auto encode = [](const Vertex& v) {
    std::vector<std::uint32_t> codes;
    for (auto l : v.key) codes.push_back(l.code);
    return std::make_pair(v.component, codes);
  };
  for (const auto& v : big.vertices()) keys.insert(encode(v));
  for (const auto& v : small.vertices()) CHECK(keys.count(encode(v)));
  for (const auto& e : small.schreier_edges()) {
    auto from = big.find(small.vertex(e.from).component, small.vertex(e.from).key);
    REQUIRE(from);
    auto to = big.edge(Letter::positive(e.generator), *from);
    REQUIRE(to);
    CHECK(big.vertex(*to) == small.vertex(e.to));
  }
}
