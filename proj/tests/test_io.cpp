#include <catch_amalgamated.hpp>

#include "relcert/io.hpp"

using namespace relcert;

namespace {

Rational q(const char* s) { return parse_rational(s); }

CosetSpace space(const std::string& group, const std::vector<std::vector<std::string>>& family, std::size_t depth) {
  auto g = Group::parse(group);
  std::vector<SubgroupSpec> hs;
  for (std::size_t i = 0; i < family.size(); ++i) hs.push_back(subgroup(*g, "H" + std::to_string(i), family[i]));
  return build_coset_space(g, hs, depth);
}

}  // namespace

TEST_CASE("coset spaces round-trip bit-exactly", "[io]") {
  for (auto [group, family, depth] : std::vector<std::tuple<std::string, std::vector<std::vector<std::string>>, int>>{
           {"free(a,b)", {{"a"}, {"b"}}, 3},
           {"abelian(2)", {{"x1"}}, 4},
           {"abelian(a)", {{"a^2"}, {"a^3"}}, 2},
           {"cyclic-product(2,3)", {{}}, 3}}) {
    INFO(group);
    auto cs = space(group, family, depth);
    auto text = dump(to_json(cs));
    auto back = coset_space_from_text(text);
    CHECK(back.vertices() == cs.vertices());
    CHECK(back.representatives() == cs.representatives());
    CHECK(dump(to_json(back)) == text);
  }
}

TEST_CASE("tampered coset spaces are rejected", "[io]") {
  auto cs = space("free(a,b)", {{"a"}}, 2);
  auto j = to_json(cs);
  auto edges = j;
  edges["edges"][0]["to"] = 4;
  CHECK_THROWS_AS(coset_space_from_json(edges), FormatError);
  auto verts = j;
  verts["vertices"].erase(verts["vertices"].begin() + 2);
  CHECK_THROWS_AS(coset_space_from_json(verts), FormatError);
  auto missing = j;
  missing.erase("depth");
  CHECK_THROWS_WITH(coset_space_from_json(missing), Catch::Matchers::ContainsSubstring("depth"));
  CHECK_THROWS_AS(coset_space_from_text("{ not json"), FormatError);
}

TEST_CASE("certificates round-trip in all three forms", "[io]") {
  auto cs = space("abelian(a)", {{"a^2"}}, 2);
  const auto& g = cs.group();
  auto uniform = finite_index_uniform(cs, 2);
  IntegerCertificate ints{Convention::reiter, {}};
  SetFamilyCertificate sets{Convention::identity, {}};
  for (const auto& x : g.ball(2)) {
    ints.entries[x.word] = Counts{{0, 2}, {1, 1}};
    sets.entries[x.word] = CellSet{{0, 1}, {1, 1}, {1, 2}};
  }
  CertParams p{1, q("1/1000000"), 2, 2};
  for (const AnyCertificate& c : {AnyCertificate(uniform), AnyCertificate(ints), AnyCertificate(sets)}) {
    INFO(form_name(c));
    auto text = dump(to_json(c, g, p));
    auto f = certificate_from_text(text, g);
    REQUIRE(f.params);
    CHECK(dump(to_json(f.certificate, g, f.params)) == text);
    CHECK(form_name(f.certificate) == form_name(c));
  }
  auto rep = verify(certificate_from_text(dump(to_json(uniform, g)), g).certificate, cs, p);
  CHECK(rep.passed());
  CHECK(rep.achieved_variation == 0);
}

TEST_CASE("certificate files are checked at parse time", "[io]") {
  auto cs = space("abelian(a)", {{"a^2"}}, 2);
  const auto& g = cs.group();
  auto j = to_json(finite_index_uniform(cs, 1), g);
  auto tampered = j;
  tampered["entries"][0]["support"][0]["value"] = "2/5";  // mass 0.9
  CHECK_THROWS_WITH(certificate_from_json(tampered, g), Catch::Matchers::ContainsSubstring("9/10"));
  auto other = j;
  other["ambient"] = "free(a,b)";
  CHECK_THROWS_AS(certificate_from_json(other, g), FormatError);
  auto unreduced = j;
  unreduced["entries"][1]["element"] = "a a^-1 a";
  CHECK_THROWS_AS(certificate_from_json(unreduced, g), FormatError);
  auto form = j;
  form["form"] = "measure";
  CHECK_THROWS_AS(certificate_from_json(form, g), FormatError);
  auto conv = j;
  conv.erase("convention");
  CHECK_THROWS_WITH(certificate_from_json(conv, g), Catch::Matchers::ContainsSubstring("convention"));
}

TEST_CASE("stored tree-pipeline certificate reproduces its report", "[io]") {
  auto cs = space("free(a,b)", {{"a"}, {"b"}}, 8);
  auto tree = bass_serre_tree(cs);
  auto ranking = busemann_ranking(tree.space, ray_tip(tree, cs.group().parse_word("b^2 a")));
  auto cert = pushforward_to_cosets(induce_from_space(tree, tree_certificates(tree.space, ranking, 4), 1), tree, cs,
                                    identity_projection(cs));
  CertParams p{1, q("3/5"), 8, 1};
  auto direct = dump(to_json(verify(cert, cs, p), cs.group()));
  auto space_back = coset_space_from_text(dump(to_json(cs)));
  auto file = certificate_from_text(dump(to_json(cert, cs.group(), p)), space_back.group());
  auto stored = dump(to_json(verify(file.certificate, space_back, *file.params), space_back.group()));
  CHECK(stored == direct);
  CHECK(direct.find("\"achieved_variation\": \"1/2\"") != std::string::npos);
}

TEST_CASE("space actions round-trip and are validated", "[io]") {
  auto cs = space("free(a,b)", {{"a"}, {"b"}}, 3);
  auto tree = bass_serre_tree(cs);
  auto text = dump(to_json(tree));
  auto back = space_action_from_json(Json::parse(text));
  CHECK(dump(to_json(back)) == text);
  CHECK(back.moves == tree.moves);
  auto j = Json::parse(text);
  j["moves"]["a"][0] = 1;
  j["moves"]["a"][1] = 1;
  CHECK_THROWS_AS(space_action_from_json(j), FormatError);
  auto k = Json::parse(text);
  k.erase("basepoint");
  CHECK_THROWS_WITH(space_action_from_json(k), Catch::Matchers::ContainsSubstring("basepoint"));
}
