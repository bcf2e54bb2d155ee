#pragma once

#include <charconv>
#include <chrono>
#include <filesystem>
#include <functional>
#include <set>

#include <toml.hpp>

#include "relcert/io.hpp"

namespace relcert {

namespace fs = std::filesystem;

/// A parsed TOML scenario. Paths inside it resolve against the config's directory.
struct Scenario {
  std::string name;
  std::string task;
  std::string group;
  std::vector<std::pair<std::string, std::vector<std::string>>> family;  // label, generator words
  std::uint64_t seed = 0;
  fs::path base_dir;
  fs::path output_dir;
  toml::table params;
  toml::table graph;
  Json echo;
};

struct Report {
  Json body;  // everything except timing
  double timing_ms = 0;
  std::vector<std::string> artifacts;

  Json to_json() const {
    Json j = body;
    j["artifacts"] = artifacts;
    j["timing_ms"] = timing_ms;
    return j;
  }
};

namespace detail {

inline Json toml_to_json(const toml::node& n) {
  if (auto t = n.as_table()) {
    Json j = Json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (auto a = n.as_array()) {
    Json j = Json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (auto s = n.as_string()) return s->get();
  if (auto i = n.as_integer()) return i->get();
  if (auto f = n.as_floating_point()) return f->get();
  if (auto b = n.as_boolean()) return b->get();
  return nullptr;
}

inline std::string shortest(double d) {
  char buf[512];
  auto r = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::fixed);
  return std::string(buf, r.ptr);
}

/// Typed access to one TOML table; every failure names the field.
class Fields {
 public:
  Fields(const toml::table& t, std::string where) : t_(t), where_(std::move(where)) {}

  bool has(const std::string& key) const { return t_.contains(key); }

  std::string str(const std::string& key) const {
    if (auto v = node(key).value<std::string>()) return *v;
    throw wrong(key, "a string");
  }
  std::string str(const std::string& key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

  std::size_t size(const std::string& key) const {
    auto v = node(key).value<std::int64_t>();
    if (!v || *v < 0 || node(key).is_floating_point()) throw wrong(key, "a nonnegative integer");
    return static_cast<std::size_t>(*v);
  }
  std::size_t size(const std::string& key, std::size_t fallback) const { return has(key) ? size(key) : fallback; }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (auto v = node(key).value<bool>()) return *v;
    throw wrong(key, "a boolean");
  }

  /// Strings "p/q" or decimals, integers, or floats (read by their shortest decimal form).
  Rational rational(const std::string& key) const {
    const auto& n = node(key);
    try {
      if (auto s = n.value<std::string>(); s && n.is_string()) return parse_rational(*s);
      if (n.is_integer()) return Rational(static_cast<long long>(*n.value<std::int64_t>()));
      if (n.is_floating_point()) return parse_rational(shortest(*n.value<double>()));
    } catch (const FormatError&) {
    }
    throw wrong(key, "a rational");
  }
  std::optional<Rational> rational_opt(const std::string& key) const {
    return has(key) ? std::optional<Rational>(rational(key)) : std::nullopt;
  }

  std::vector<std::size_t> sizes(const std::string& key) const {
    auto a = node(key).as_array();
    if (!a) throw wrong(key, "an array of integers");
    std::vector<std::size_t> out;
    for (const auto& v : *a) {
      auto i = v.value<std::int64_t>();
      if (!i || *i < 0 || !v.is_integer()) throw wrong(key, "an array of nonnegative integers");
      out.push_back(static_cast<std::size_t>(*i));
    }
    return out;
  }

  void only(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : t_)
      if (!allowed.count(std::string(k.str())))
        throw FormatError("unknown field '" + where_ + std::string(k.str()) + "'");
  }

  FormatError missing(const std::string& key) const { return FormatError("missing field '" + where_ + key + "'"); }

 private:
  const toml::node& node(const std::string& key) const {
    auto n = t_.get(key);
    if (!n) throw missing(key);
    return *n;
  }
  FormatError wrong(const std::string& key, const std::string& what) const {
    return FormatError("field '" + where_ + key + "' must be " + what);
  }

  const toml::table& t_;
  std::string where_;
};

}  // namespace detail

inline Scenario parse_scenario(const std::string& text, const fs::path& base_dir, const std::string& source = "config") {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    throw FormatError(msg.str());
  }
  detail::Fields top(root, "");
  top.only({"name", "task", "group", "subgroup", "seed", "output", "params", "graph"});
  Scenario s;
  s.base_dir = base_dir;
  s.name = top.str("name");
  s.task = top.str("task");
  static const std::set<std::string> tasks{"rel-a-search",      "rel-amenability", "folner", "uf-test",
                                           "transfer-pipeline", "verify-file"};
  if (!tasks.count(s.task)) throw FormatError("field 'task' has unknown value '" + s.task + "'");
  s.group = top.str("group", "");
  s.seed = top.size("seed", 0);
  if (auto subs = root.get("subgroup")) {
    auto arr = subs->as_array();
    if (!arr) throw FormatError("field 'subgroup' must be an array of tables ([[subgroup]])");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      auto t = arr->get(i)->as_table();
      if (!t) throw FormatError("field 'subgroup' must be an array of tables ([[subgroup]])");
      detail::Fields f(*t, "subgroup." );
      f.only({"label", "generators"});
      std::vector<std::string> words;
      auto gens = t->get("generators");
      if (!gens || !gens->is_array()) throw FormatError("missing field 'subgroup.generators'");
      for (const auto& w : *gens->as_array()) {
        if (!w.is_string()) throw FormatError("field 'subgroup.generators' must hold strings");
        words.push_back(*w.value<std::string>());
      }
      s.family.emplace_back(f.str("label"), words);
    }
  }
  if (auto p = root.get("params")) {
    if (!p->is_table()) throw FormatError("field 'params' must be a table");
    s.params = *p->as_table();
  }
  if (auto g = root.get("graph")) {
    if (!g->is_table()) throw FormatError("field 'graph' must be a table");
    s.graph = *g->as_table();
  }
  s.output_dir = base_dir / top.str("output", "out/" + s.name);
  s.echo = detail::toml_to_json(root);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path), fs::path(path).parent_path(), path);
}

namespace detail {

inline std::shared_ptr<const Group> scenario_group(const Scenario& s) {
  if (s.group.empty()) throw FormatError("missing field 'group'");
  return Group::parse(s.group);
}

inline CosetSpace scenario_space(const Scenario& s, std::size_t depth) {
  auto g = scenario_group(s);
  if (s.family.empty()) throw FormatError("missing field 'subgroup'");
  std::vector<SubgroupSpec> hs;
  for (const auto& [label, words] : s.family) hs.push_back(subgroup(*g, label, words));
  return build_coset_space(g, hs, depth);
}

inline FiniteGraph scenario_graph(const Scenario& s) {
  if (s.graph.empty()) throw FormatError("missing field 'graph'");
  Fields f(s.graph, "graph.");
  auto kind = f.str("kind");
  if (kind == "king-grid" || kind == "grid") {
    f.only({"kind", "width", "height"});
    auto w = f.size("width"), h = f.size("height", w);
    return kind == "grid" ? grid_graph(w, h) : king_grid(w, h);
  }
  if (kind == "path") {
    f.only({"kind", "length"});
    return path_graph(f.size("length"));
  }
  if (kind == "cayley-ball") {
    f.only({"kind", "radius"});
    return cayley_ball(*scenario_group(s), f.size("radius"));
  }
  if (kind == "edge-list") {
    f.only({"kind", "file"});
    return parse_edge_list(read_file((s.base_dir / f.str("file")).string()));
  }
  throw FormatError("field 'graph.kind' has unknown value '" + kind + "'");
}

/// S for the relA search: a fixed integer, "window", or "window+k".
inline std::function<std::size_t(std::size_t)> s_policy(const Fields& p) {
  if (!p.has("S")) throw p.missing("S");
  std::string text;
  try {
    return [S = p.size("S")](std::size_t) { return S; };
  } catch (const FormatError&) {
    text = p.str("S");
  }
  if (text == "window") return [](std::size_t w) { return w; };
  if (text.rfind("window+", 0) == 0) {
    std::size_t k = 0;
    auto tail = text.substr(7);
    auto r = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (r.ec == std::errc() && r.ptr == tail.data() + tail.size()) return [k](std::size_t w) { return w + k; };
  }
  throw FormatError("field 'params.S' must be an integer, \"window\" or \"window+k\"");
}

class Runner {
 public:
  explicit Runner(const Scenario& s) : s_(s), p_(s.params, "params.") {}

  Report run() {
    fs::create_directories(s_.output_dir);
    report_.body["scenario"] = s_.echo;
    report_.body["seed"] = s_.seed;
    if (s_.task == "rel-a-search") rel_a();
    else if (s_.task == "rel-amenability") amenability();
    else if (s_.task == "folner") folner();
    else if (s_.task == "uf-test") uf();
    else if (s_.task == "transfer-pipeline") transfer();
    else verify_file();
    return report_;
  }

 private:
  void artifact(const std::string& name, const std::string& text) {
    write_file((s_.output_dir / name).string(), text);
    report_.artifacts.push_back(name);
  }

  void set(const std::string& verdict, bool certified) {
    report_.body["verdict"] = verdict;
    report_.body["evidence"] = certified ? "certified" : "evidence";
  }

  /// Writes the certificate and checks that the file on disk verifies identically.
  bool store_and_recheck(const std::string& name, const ProbCertificate& c, const CosetSpace& cs, const CertParams& p,
                         const VerificationReport& in_process) {
    artifact(name, dump(to_json(c, cs.group(), p)));
    auto back = certificate_from_text(read_file((s_.output_dir / name).string()), cs.group());
    auto again = verify(back.certificate, cs, *back.params);
    return dump(relcert::to_json(again, cs.group())) == dump(relcert::to_json(in_process, cs.group()));
  }

  void rel_a() {
    p_.only({"depth", "window", "windows", "S", "R", "epsilon", "float_warm_start"});
    auto cs = scenario_space(s_, p_.size("depth"));
    artifact("space.json", dump(relcert::to_json(cs)));
    auto S = s_policy(p_);
    std::size_t R = p_.size("R", 1), w = p_.size("window");
    LPOptions opt;
    opt.float_warm_start = p_.flag("float_warm_start", true);
    auto inst = build_relA_lp(cs, w, S(w), R);
    auto sol = solve_lp(inst.lp, opt);
    Json res;
    res["window"] = w;
    res["S"] = inst.S;
    res["R"] = R;
    res["lp_status"] = to_string(sol.status);
    res["variables"] = inst.lp.variables.size();
    res["constraints"] = inst.lp.rows.size();
    if (sol.status != LPStatus::optimal) {
      report_.body["results"] = res;
      set("LP did not reach a certified optimum (" + to_string(sol.status) + ")", false);
      return;
    }
    res["optimum"] = to_string(sol.optimum);
    auto eps = p_.rational_opt("epsilon").value_or(sol.optimum + Rational(1, 1000000));
    CertParams params{R, eps, inst.S, w};
    auto cert = certificate_from(inst, sol);
    auto rep = verify(cert, cs, params);
    res["verification"] = relcert::to_json(rep, cs.group());
    bool stored = store_and_recheck("certificate.json", cert, cs, params, rep);
    if (p_.has("windows")) {
      auto curve = optimum_curve(cs, p_.sizes("windows"), S, R, opt);
      artifact("curve.csv", curve.csv());
      res["curve"] = relcert::to_json(curve);
      res["curve_non_increasing"] = curve.non_increasing();
    }
    report_.body["results"] = res;
    set(rep.passed() ? "certificate passes at epsilon " + to_string(eps)
                     : "optimal certificate has variation " + to_string(sol.optimum) + ", not below epsilon " +
                           to_string(eps),
        stored && rep.passed());
  }

  void amenability() {
    p_.only({"depth", "radii", "float_warm_start"});
    auto cs = scenario_space(s_, p_.size("depth"));
    LPOptions opt;
    opt.float_warm_start = p_.flag("float_warm_start", true);
    auto radii = p_.has("radii") ? p_.sizes("radii") : std::vector<std::size_t>{1, 2, 3, 4};
    auto curve = mean_curve(cs, radii, opt);
    artifact("mean_curve.csv", curve.csv());
    Json res;
    res["curve"] = relcert::to_json(curve);
    res["non_increasing"] = curve.non_increasing();
    bool all_optimal = true, all_positive = true;
    for (const auto& pt : curve.points) {
      all_optimal &= pt.status == LPStatus::optimal;
      all_positive &= pt.optimum > 0;
    }
    report_.body["results"] = res;
    if (!all_optimal) set("some radii did not reach a certified optimum", false);
    else if (all_positive) set("mean-LP optimum stays positive through radius " + std::to_string(radii.back()), false);
    else set("an exactly invariant mean exists at some radius", false);
  }

  void folner() {
    p_.only({"r", "delta", "cap", "exhaustive", "seeds", "random_seeds", "local_steps", "margin"});
    auto g = scenario_graph(s_);
    FolnerOptions opt;
    opt.cap = p_.size("cap", opt.cap);
    opt.exhaustive = p_.flag("exhaustive", false);
    opt.seeds = p_.size("seeds", opt.seeds);
    opt.random_seeds = p_.size("random_seeds", 0);
    opt.local_steps = p_.size("local_steps", opt.local_steps);
    opt.seed = s_.seed;
    if (p_.has("margin")) opt.margin = p_.size("margin");
    auto res = folner_search(g, p_.size("r"), p_.rational("delta"), opt);
    artifact("folner.json", dump(relcert::to_json(res, g)));
    bool recounted = recount(g, res);
    Json j;
    j["status"] = to_string(res.status);
    j["ratio"] = to_string(res.ratio);
    j["boundary"] = res.boundary;
    j["size"] = res.U.size();
    j["method"] = res.method;
    j["recounted"] = recounted;
    report_.body["results"] = j;
    if (res.status == FolnerStatus::found)
      set("Følner set found with ratio " + to_string(res.ratio) + " < " + to_string(res.delta), recounted);
    else
      set("no Følner set within cap; best ratio " + to_string(res.ratio), false);
  }

  void uf() {
    p_.only({"R", "K", "policy"});
    auto g = scenario_graph(s_);
    auto policy = parse_policy(p_.str("policy"));
    std::size_t R = p_.size("R", 2);
    auto K = p_.rational("K");
    auto phi = fundamental_class(g);
    auto res = uf_boundary_solve(g, phi, R, K, policy);
    Json j;
    j["feasible"] = res.feasible;
    j["policy"] = to_string(policy);
    j["interior_size"] = res.interior.size();
    j["demand"] = to_string(res.demand);
    j["routed"] = to_string(res.routed);
    bool checked = false;
    if (res.feasible) {
      artifact("uf_witness.json", dump(relcert::to_json(res.witness)));
      auto check = check_uf_witness(g, phi, res.witness, res.interior);
      checked = check.ok();
      j["witness_ok"] = checked;
    }
    report_.body["results"] = j;
    set(res.feasible ? "fundamental class is a boundary with coefficients bounded by " + to_string(K)
                     : "no bounded filling with coefficients bounded by " + to_string(K),
        res.feasible && checked);
  }

  void transfer() {
    p_.only({"depth", "n", "window", "R", "epsilon", "ray", "S"});
    auto cs = scenario_space(s_, p_.size("depth"));
    artifact("space.json", dump(relcert::to_json(cs)));
    auto tree = bass_serre_tree(cs);
    auto ray = cs.group().parse_word(p_.str("ray"));
    auto ranking = busemann_ranking(tree.space, ray_tip(tree, ray));
    std::size_t window = p_.size("window", 1), R = p_.size("R", 1);
    auto eps = p_.rational("epsilon");
    Json per_n = Json::array();
    bool all_pass = true, all_stored = true, identity = true;
    for (auto n : p_.sizes("n")) {
      auto fam = tree_certificates(tree.space, ranking, n);
      auto mu = induce_from_space(tree, fam, window);
      for (const auto& pr : induction_pairs(tree, fam, mu, R, window)) identity &= pr.lhs == pr.rhs;
      auto cert = pushforward_to_cosets(mu, tree, cs, identity_projection(cs));
      std::size_t S = 0;
      for (const auto& [x, m] : cert.entries)
        for (const auto& [k, p] : m) S = std::max(S, cs.vertex(k).key.size() + 1);
      S = p_.size("S", S);
      CertParams params{R, eps, S, window};
      auto rep = verify(cert, cs, params);
      auto name = "certificate_n" + std::to_string(n) + ".json";
      bool stored = store_and_recheck(name, cert, cs, params, rep);
      all_pass &= rep.passed();
      all_stored &= stored;
      per_n.push_back({{"n", n},
                       {"S", S},
                       {"achieved_variation", to_string(rep.achieved_variation)},
                       {"passed", rep.passed()},
                       {"certificate", name}});
    }
    Json j;
    j["qi_constant"] = to_string(qi_constant(tree, window));
    j["induction_identity"] = identity;
    j["certificates"] = per_n;
    report_.body["results"] = j;
    set(all_pass ? "every tree certificate passes at epsilon " + to_string(eps)
                 : "some tree certificates exceed epsilon " + to_string(eps),
        all_pass && all_stored && identity);
  }

  void verify_file() {
    p_.only({"certificate", "space", "R", "epsilon", "S", "window", "convention"});
    auto cs = coset_space_from_text(read_file((s_.base_dir / p_.str("space")).string()));
    auto file = certificate_from_text(read_file((s_.base_dir / p_.str("certificate")).string()), cs.group());
    auto params = file.params.value_or(CertParams{});
    if (!file.params)
      for (const char* k : {"R", "epsilon", "S", "window"})
        if (!p_.has(k)) throw p_.missing(k);
    if (p_.has("R")) params.R = p_.size("R");
    if (p_.has("epsilon")) params.epsilon = p_.rational("epsilon");
    if (p_.has("S")) params.S = p_.size("S");
    if (p_.has("window")) params.window = p_.size("window");
    params.validate();
    std::optional<Convention> conv;
    if (p_.has("convention")) conv = parse_convention(p_.str("convention"));
    auto rep = verify(file.certificate, cs, params, conv);
    artifact("verification.json", dump(relcert::to_json(rep, cs.group())));
    report_.body["results"] = relcert::to_json(rep, cs.group());
    set(rep.passed() ? "certificate passes" : "certificate fails", rep.passed());
  }

  const Scenario& s_;
  Fields p_;
  Report report_;
};

}  // namespace detail

/// Runs the scenario, writes its artifacts and report.json into the output
/// directory, and returns the report.
inline Report run_scenario(const Scenario& s) {
  auto start = std::chrono::steady_clock::now();
  auto report = detail::Runner(s).run();
  report.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_file((s.output_dir / "report.json").string(), dump(report.to_json()));
  return report;
}

/// The optimum curve a scenario describes (relA windows or mean-LP radii).
inline OptimumCurve scenario_curve(const Scenario& s) {
  detail::Fields p(s.params, "params.");
  if (s.task == "rel-a-search") {
    if (!p.has("windows")) throw p.missing("windows");
    return optimum_curve(detail::scenario_space(s, p.size("depth")), p.sizes("windows"), detail::s_policy(p),
                         p.size("R", 1));
  }
  if (s.task == "rel-amenability")
    return mean_curve(detail::scenario_space(s, p.size("depth")),
                      p.has("radii") ? p.sizes("radii") : std::vector<std::size_t>{1, 2, 3, 4});
  throw FormatError("task '" + s.task + "' has no optimum curve");
}

/// The LP a scenario solves, in CPLEX LP format.
inline std::string scenario_lp(const Scenario& s) {
  detail::Fields p(s.params, "params.");
  if (s.task == "rel-a-search") {
    auto w = p.size("window");
    return to_lp_format(
        build_relA_lp(detail::scenario_space(s, p.size("depth")), w, detail::s_policy(p)(w), p.size("R", 1)).lp);
  }
  if (s.task == "rel-amenability") {
    auto radii = p.has("radii") ? p.sizes("radii") : std::vector<std::size_t>{1};
    return to_lp_format(build_mean_lp(detail::scenario_space(s, p.size("depth")), radii.back()).lp);
  }
  throw FormatError("task '" + s.task + "' has no LP");
}

}  // namespace relcert
