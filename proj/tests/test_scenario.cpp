#include <catch_amalgamated.hpp>

#include "relcert/scenario.hpp"

using namespace relcert;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("relcert-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kIndex2 = R"toml(
name = "idx"
task = "rel-a-search"
group = "abelian(a)"
[[subgroup]]
label = "2Z"
generators = ["a^2"]
[params]
depth = 2
window = 1
S = 2
epsilon = 0.000001
)toml";

Json strip_timing(Json j) {
  j.erase("timing_ms");
  return j;
}

}  // namespace

TEST_CASE("scenario parsing names the offending field", "[scenario]") {
  auto dir = scratch("parse");
  CHECK_THROWS_WITH(parse_scenario("task = \"folner\"", dir), ContainsSubstring("'name'"));
  CHECK_THROWS_WITH(parse_scenario("name = \"x\"\ntask = \"dance\"", dir), ContainsSubstring("'task'"));
  CHECK_THROWS_WITH(parse_scenario("name = \"x\"\ntask = \"folner\"\ncolour = 1", dir), ContainsSubstring("'colour'"));
  CHECK_THROWS_WITH(parse_scenario("name = ", dir), ContainsSubstring("config:1"));
  auto s = parse_scenario("name = \"x\"\ntask = \"folner\"\n[params]\nr = 2\ndelta = \"1/10\"", dir);
  CHECK_THROWS_WITH(run_scenario(s), ContainsSubstring("'graph'"));
  auto t = parse_scenario("name = \"x\"\ntask = \"folner\"\n[graph]\nkind = \"path\"\nlength = 9\n[params]\nr = 2", dir);
  CHECK_THROWS_WITH(run_scenario(t), ContainsSubstring("'params.delta'"));
  auto u = parse_scenario("name = \"x\"\ntask = \"uf-test\"\n[graph]\nkind = \"path\"\nlength = 9\n[params]\nK = 1\n"
                          "policy = \"open\"\nbogus = 3",
                          dir);
  CHECK_THROWS_WITH(run_scenario(u), ContainsSubstring("'params.bogus'"));
}

TEST_CASE("rational fields accept strings, integers and floats", "[scenario]") {
  auto dir = scratch("rational");
  auto s = parse_scenario(kIndex2, dir);
  auto r = run_scenario(s);
  CHECK(r.body["results"]["verification"]["params"]["epsilon"] == "1/1000000");
  CHECK(r.body["verdict"] == "certificate passes at epsilon 1/1000000");
  CHECK(r.body["evidence"] == "certified");
}

TEST_CASE("scenario runs are deterministic apart from timing", "[scenario]") {
  auto dir = scratch("determinism");
  auto s = parse_scenario(kIndex2, dir);
  auto a = run_scenario(s);
  auto cert = read_file((s.output_dir / "certificate.json").string());
  auto b = run_scenario(s);
  CHECK(dump(strip_timing(a.to_json())) == dump(strip_timing(b.to_json())));
  CHECK(read_file((s.output_dir / "certificate.json").string()) == cert);
  CHECK(a.to_json()["scenario"]["params"]["depth"] == 2);
}

TEST_CASE("verify-file scenario matches in-process verification", "[scenario]") {
  auto dir = scratch("verify");
  auto s = parse_scenario(kIndex2, dir);
  auto first = run_scenario(s);
  auto v = parse_scenario(R"toml(
name = "check"
task = "verify-file"
[params]
certificate = "out/idx/certificate.json"
space = "out/idx/space.json"
)toml",
                          dir);
  auto second = run_scenario(v);
  CHECK(dump(second.body["results"]) == dump(first.body["results"]["verification"]));
  auto w = parse_scenario(R"toml(
name = "check2"
task = "verify-file"
[params]
certificate = "out/idx/certificate.json"
space = "out/idx/space.json"
convention = "identity"
)toml",
                          dir);
  CHECK_THROWS_AS(run_scenario(w), SpecError);
}

TEST_CASE("folner and uf scenarios report their witnesses", "[scenario]") {
  auto dir = scratch("amen");
  auto f = run_scenario(parse_scenario(R"toml(
name = "line"
task = "folner"
[graph]
kind = "path"
length = 60
[params]
r = 2
delta = "1/10"
cap = 60
)toml",
                                       dir));
  CHECK(f.body["results"]["ratio"] == "4/41");
  CHECK(f.body["evidence"] == "certified");
  CHECK(fs::exists(dir / "out/line/folner.json"));
  auto u = run_scenario(parse_scenario(R"toml(
name = "zuf"
task = "uf-test"
[graph]
kind = "path"
length = 10
[params]
K = 2
policy = "closed"
)toml",
                                       dir));
  CHECK(u.body["results"]["feasible"] == false);
}

TEST_CASE("curves and LP export from scenarios", "[scenario]") {
  auto dir = scratch("curve");
  auto s = parse_scenario(R"toml(
name = "line"
task = "rel-amenability"
group = "abelian(a)"
[[subgroup]]
label = "1"
generators = []
[params]
depth = 5
radii = [1, 2, 3]
)toml",
                          dir);
  CHECK(scenario_curve(s).csv() == "window,S,optimum_num,optimum_den\n1,2,2,3\n2,3,2,5\n3,4,2,7\n");
  CHECK(scenario_lp(s).find("Minimize") != std::string::npos);
  auto bad = parse_scenario("name = \"x\"\ntask = \"uf-test\"", dir);
  CHECK_THROWS_AS(scenario_curve(bad), FormatError);
  auto policy = parse_scenario(R"toml(
name = "p"
task = "rel-a-search"
group = "abelian(a)"
[[subgroup]]
label = "1"
generators = []
[params]
depth = 6
window = 2
windows = [1, 2]
S = "window+1"
)toml",
                               dir);
  auto c = scenario_curve(policy);
  CHECK(c.points[0].S == 2);
  CHECK(c.points[1].S == 3);
}
