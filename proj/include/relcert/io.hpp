#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "relcert/amenability.hpp"
#include "relcert/certificates.hpp"
#include "relcert/coset_space.hpp"
#include "relcert/lp_search.hpp"
#include "relcert/transfer.hpp"

namespace relcert {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
}

/// Typed field access that reports the missing or mistyped field by name.
template <class T>
T field(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) throw FormatError("missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("field '" + name + "' has the wrong type");
  }
}

inline const Json& child(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) throw FormatError("missing field '" + name + "'");
  return j.at(name);
}

inline Word normal_word(const Group& g, const std::string& text) {
  auto w = g.parse_word(text);
  if (g.element(w).word != w) throw FormatError("word '" + text + "' is not in normal form");
  return w;
}

}  // namespace detail

// ---- coset spaces ----------------------------------------------------------

inline Json to_json(const CosetSpace& cs) {
  const auto& g = cs.group();
  Json j;
  j["ambient"] = g.text();
  j["family"] = Json::array();
  for (const auto& h : cs.family()) {
    Json words = Json::array();
    for (const auto& w : h.generators) words.push_back(g.format(w));
    j["family"].push_back({{"label", h.label}, {"generators", words}});
  }
  j["depth"] = cs.depth();
  j["membership_bound"] = cs.options().membership_bound;
  j["vertices"] = Json::array();
  for (const auto& v : cs.vertices()) j["vertices"].push_back({{"component", v.component}, {"key", g.format(v.key)}});
  j["representatives"] = cs.representatives();
  j["transporters"] = Json::object();
  for (VertexId v = 0; v < cs.size(); ++v) j["transporters"][std::to_string(v)] = g.format(cs.transporter(v));
  j["edges"] = Json::array();
  for (const auto& e : cs.schreier_edges())
    j["edges"].push_back({{"generator", g.generators()[e.generator].symbol}, {"from", e.from}, {"to", e.to}});
  return j;
}

/// Rebuilds the space and checks every stored field against the rebuild.
inline CosetSpace coset_space_from_json(const Json& j) {
  using detail::field;
  auto g = Group::parse(field<std::string>(j, "ambient"));
  std::vector<SubgroupSpec> family;
  for (const auto& h : detail::child(j, "family")) {
    SubgroupSpec s;
    s.label = field<std::string>(h, "label");
    for (const auto& w : field<std::vector<std::string>>(h, "generators")) s.generators.push_back(g->parse_word(w));
    family.push_back(std::move(s));
  }
  CosetSpaceOptions opt;
  if (j.contains("membership_bound")) opt.membership_bound = field<std::size_t>(j, "membership_bound");
  std::vector<Vertex> vertices;
  for (const auto& v : detail::child(j, "vertices"))
    vertices.push_back({field<std::uint32_t>(v, "component"), detail::normal_word(*g, field<std::string>(v, "key"))});
  auto cs = CosetSpace::restore(g, std::move(family), field<std::size_t>(j, "depth"), opt, vertices);
  auto again = to_json(cs);
  for (const char* name : {"representatives", "transporters", "edges"})
    if (detail::child(j, name) != again[name]) throw FormatError("field '" + std::string(name) + "' does not match the space");
  return cs;
}

inline CosetSpace coset_space_from_text(const std::string& text) {
  return coset_space_from_json(detail::parse_json(text, "coset space"));
}

// ---- certificates ----------------------------------------------------------

inline Json to_json(const CertParams& p) {
  return {{"R", p.R}, {"epsilon", to_string(p.epsilon)}, {"S", p.S}, {"window", p.window}};
}

inline CertParams params_from_json(const Json& j) {
  using detail::field;
  CertParams p;
  p.R = field<std::size_t>(j, "R");
  p.epsilon = parse_rational(field<std::string>(j, "epsilon"));
  p.S = field<std::size_t>(j, "S");
  p.window = field<std::size_t>(j, "window");
  p.validate();
  return p;
}

namespace detail {

inline Json support_json(const CellSet& a) {
  Json out = Json::array();
  for (const auto& [k, i] : a) out.push_back({{"vertex", k}, {"index", i}});
  return out;
}
inline Json support_json(const Counts& xi) {
  Json out = Json::array();
  for (const auto& [k, n] : xi) out.push_back({{"vertex", k}, {"value", std::to_string(n)}});
  return out;
}
inline Json support_json(const Measure& f) {
  Json out = Json::array();
  for (const auto& [k, p] : f) out.push_back({{"vertex", k}, {"value", to_string(p)}});
  return out;
}

inline void read_support(const Json& j, CellSet& a) {
  for (const auto& c : j)
    if (!a.emplace(field<VertexId>(c, "vertex"), field<std::uint32_t>(c, "index")).second)
      throw FormatError("repeated cell in set family");
}
inline void read_support(const Json& j, Counts& xi) {
  for (const auto& c : j) {
    auto q = parse_rational(field<std::string>(c, "value"));
    if (q < 0 || denominator(q) != 1) throw FormatError("integer certificate value must be a nonnegative integer");
    if (!xi.emplace(field<VertexId>(c, "vertex"), numerator(q).convert_to<std::uint64_t>()).second)
      throw FormatError("repeated vertex in support");
  }
}
inline void read_support(const Json& j, Measure& f) {
  for (const auto& c : j)
    if (!f.emplace(field<VertexId>(c, "vertex"), parse_rational(field<std::string>(c, "value"))).second)
      throw FormatError("repeated vertex in support");
}

template <class C>
C read_entries(const Json& j, const Group& g, Convention conv) {
  C c;
  c.convention = conv;
  for (const auto& e : child(j, "entries")) {
    auto w = normal_word(g, field<std::string>(e, "element"));
    auto& slot = c.entries[w];
    if (!slot.empty()) throw FormatError("repeated element " + g.format(w));
    read_support(child(e, "support"), slot);
  }
  validate(c);
  return c;
}

}  // namespace detail

struct CertificateFile {
  std::string ambient;
  AnyCertificate certificate;
  std::optional<CertParams> params;
};

inline Json to_json(const AnyCertificate& cert, const Group& g, const std::optional<CertParams>& params = std::nullopt) {
  Json j;
  j["ambient"] = g.text();
  j["form"] = form_name(cert);
  std::visit(
      [&](const auto& c) {
        j["convention"] = to_string(c.convention);
        if (params) j["params"] = to_json(*params);
        j["entries"] = Json::array();
        for (const auto& [w, v] : c.entries)
          j["entries"].push_back({{"element", g.format(w)}, {"support", detail::support_json(v)}});
      },
      cert);
  return j;
}

/// Parses against `g` (the space's group) and rejects malformed or
/// unnormalized entries, e.g. probability masses that do not sum to 1.
inline CertificateFile certificate_from_json(const Json& j, const Group& g) {
  using detail::field;
  CertificateFile f;
  f.ambient = field<std::string>(j, "ambient");
  if (Group::parse(f.ambient)->text() != g.text())
    throw FormatError("certificate is for " + f.ambient + ", space is for " + g.text());
  auto conv = parse_convention(field<std::string>(j, "convention"));
  auto form = field<std::string>(j, "form");
  if (form == "sets")
    f.certificate = detail::read_entries<SetFamilyCertificate>(j, g, conv);
  else if (form == "integer")
    f.certificate = detail::read_entries<IntegerCertificate>(j, g, conv);
  else if (form == "prob")
    f.certificate = detail::read_entries<ProbCertificate>(j, g, conv);
  else
    throw FormatError("unknown certificate form '" + form + "'");
  if (j.contains("params")) f.params = params_from_json(j.at("params"));
  return f;
}

inline CertificateFile certificate_from_text(const std::string& text, const Group& g) {
  return certificate_from_json(detail::parse_json(text, "certificate"), g);
}

inline Json to_json(const VerificationReport& r, const Group& g) {
  Json j;
  j["form"] = r.form;
  j["convention"] = to_string(r.convention);
  j["params"] = to_json(r.params);
  j["passed"] = r.passed();
  j["support_ok"] = r.support_ok;
  if (r.support_witness)
    j["support_witness"] = {
        {"x", g.format(r.support_witness->x)}, {"vertex", r.support_witness->k}, {"rho", r.support_witness->rho}};
  j["variation_ok"] = r.variation_ok;
  j["achieved_variation"] = to_string(r.achieved_variation);
  if (r.variation_witness)
    j["variation_witness"] = {{"x", g.format(r.variation_witness->x)},
                              {"y", g.format(r.variation_witness->y)},
                              {"g", g.format(r.variation_witness->g)},
                              {"value", to_string(r.variation_witness->value)}};
  j["pairs_checked"] = r.pairs_checked;
  return j;
}

// ---- space actions ---------------------------------------------------------

/// Moves are stored for positive generators; inverse moves are their partial inverses.
inline Json to_json(const SpaceAction& a) {
  const auto& g = *a.group;
  Json j;
  j["ambient"] = g.text();
  j["vertices"] = Json::array();
  for (Node v = 0; v < a.space.size(); ++v) j["vertices"].push_back(a.space.label(v));
  j["edges"] = Json::array();
  for (auto [u, v] : a.space.edges()) j["edges"].push_back({u, v});
  j["moves"] = Json::object();
  for (GeneratorIndex s = 0; s < g.rank(); ++s) {
    Json row = Json::array();
    for (Node v = 0; v < a.space.size(); ++v) {
      auto to = a.moves[Letter::positive(s).code][v];
      row.push_back(to ? Json(*to) : Json(nullptr));
    }
    j["moves"][g.generators()[s].symbol] = row;
  }
  j["basepoint"] = a.basepoint;
  j["representatives"] = Json::array();
  for (std::size_t i = 0; i < a.representatives.size(); ++i)
    j["representatives"].push_back({{"vertex", a.representatives[i]}, {"stabilizer", a.stabilizers[i]}});
  return j;
}

inline SpaceAction space_action_from_json(const Json& j) {
  using detail::field;
  SpaceAction a;
  a.group = Group::parse(field<std::string>(j, "ambient"));
  const auto& g = *a.group;
  auto labels = field<std::vector<std::string>>(j, "vertices");
  a.space = FiniteGraph(labels.size());
  for (Node v = 0; v < labels.size(); ++v) a.space.set_label(v, labels[v]);
  for (const auto& e : detail::child(j, "edges")) {
    auto uv = e.get<std::vector<Node>>();
    if (uv.size() != 2) throw FormatError("edge must list two vertices");
    a.space.add_edge(uv[0], uv[1]);
  }
  a.space.finalize();
  a.moves.assign(2 * g.rank(), std::vector<std::optional<Node>>(labels.size()));
  const auto& moves = detail::child(j, "moves");
  for (GeneratorIndex s = 0; s < g.rank(); ++s) {
    const auto& row = detail::child(moves, g.generators()[s].symbol);
    if (!row.is_array() || row.size() != labels.size()) throw FormatError("move row for a generator has the wrong length");
    for (Node v = 0; v < labels.size(); ++v) {
      if (row[v].is_null()) continue;
      auto to = row[v].get<Node>();
      if (to >= labels.size()) throw FormatError("move target out of range");
      auto& back = a.moves[Letter::negative(s).code][to];
      if (back) throw FormatError("move for " + g.generators()[s].symbol + " is not injective");
      a.moves[Letter::positive(s).code][v] = to;
      back = v;
    }
  }
  a.basepoint = field<Node>(j, "basepoint");
  for (const auto& r : detail::child(j, "representatives")) {
    a.representatives.push_back(field<Node>(r, "vertex"));
    a.stabilizers.push_back(field<std::string>(r, "stabilizer"));
  }
  a.validate();
  return a;
}

// ---- amenability witnesses -------------------------------------------------

inline Json to_json(const FolnerResult& r, const FiniteGraph& g) {
  Json j;
  j["status"] = to_string(r.status);
  j["r"] = r.r;
  j["delta"] = to_string(r.delta);
  j["ratio"] = to_string(r.ratio);
  j["boundary"] = r.boundary;
  j["size"] = r.U.size();
  j["method"] = r.method;
  j["evaluated"] = r.evaluated;
  j["U"] = r.U;
  Json labels = Json::array();
  for (Node v : r.U) labels.push_back(g.label(v));
  j["labels"] = labels;
  return j;
}

inline Json to_json(const UFChain& c) {
  Json j;
  j["degree"] = c.degree;
  j["R"] = c.R;
  j["K"] = to_string(c.K);
  j["coefficients"] = Json::array();
  for (const auto& [cell, a] : c.coefficients) {
    Json pts = Json::array();
    for (Node v : cell) pts.push_back(is_outside(v) ? Json("outside:" + std::to_string(v - kOutsideBase)) : Json(v));
    j["coefficients"].push_back({{"cell", pts}, {"value", to_string(a)}});
  }
  return j;
}

inline Json to_json(const OptimumCurve& c) {
  Json j = Json::array();
  for (const auto& p : c.points)
    j.push_back({{"window", p.window},
                 {"S", p.S},
                 {"status", to_string(p.status)},
                 {"optimum", to_string(p.optimum)},
                 {"variables", p.variables},
                 {"constraints", p.constraints}});
  return j;
}

}  // namespace relcert
