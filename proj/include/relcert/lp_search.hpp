#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "relcert/certificates.hpp"
#include "relcert/coset_space.hpp"
#include "relcert/lp.hpp"

namespace relcert {

namespace detail {

inline std::string family_text(const CosetSpace& cs) {
  std::string s;
  for (const auto& h : cs.family()) {
    if (!s.empty()) s += "; ";
    s += h.label + " = <";
    for (std::size_t i = 0; i < h.generators.size(); ++i)
      s += (i ? ", " : "") + cs.group().format(h.generators[i]);
    s += ">";
  }
  return s;
}

/// Adds rows encoding ‖a − b‖₁ ≤ t, one slack pair per vertex.
inline void add_l1_bound(LPInstance& lp, const std::string& tag, const std::map<VertexId, std::vector<Term>>& diff,
                         std::uint32_t t) {
  std::vector<Term> total;
  for (const auto& [k, terms] : diff) {
    auto p = lp.add_variable("p_" + tag + "_" + std::to_string(k));
    auto q = lp.add_variable("q_" + tag + "_" + std::to_string(k));
    auto row = terms;
    row.push_back({p, -1});
    row.push_back({q, 1});
    lp.add_row("d_" + tag + "_" + std::to_string(k), std::move(row), Sense::eq, 0);
    total.push_back({p, 1});
    total.push_back({q, 1});
  }
  total.push_back({t, -1});
  lp.add_row("v_" + tag, std::move(total), Sense::le, 0);
}

}  // namespace detail

/// min t subject to f(x) ∈ Prob({k : ρ(x,k) < S}) for x in ball(window) and
/// ‖f(x) − f(y)‖₁ ≤ t for 1 <= d(x,y) <= R. Since the ℓ¹ bound is symmetric,
/// each unordered pair is encoded once.
struct RelALP {
  LPInstance lp;
  std::vector<Element> window;
  std::vector<std::map<VertexId, std::uint32_t>> f;  // per window element: vertex -> variable
  std::uint32_t t = 0;
  std::size_t window_radius = 0, S = 0, R = 0;
  std::size_t pairs = 0;
};

inline RelALP build_relA_lp(const CosetSpace& cs, std::size_t window, std::size_t S, std::size_t R) {
  if (S == 0) throw SpecError("empty admissible support: S must be >= 1");
  const auto& g = cs.group();
  RelALP out;
  out.window_radius = window;
  out.S = S;
  out.R = R;
  out.window = g.ball(window);
  std::vector<VertexId> near;  // vertices u with ρ(e,u) < S
  for (VertexId u = 0; u < cs.size(); ++u)
    if (cs.vertex(u).key.size() < S) near.push_back(u);
  auto& lp = out.lp;
  out.t = lp.add_variable("t");
  std::map<Word, std::size_t, ShortlexLess> index;
  for (std::size_t i = 0; i < out.window.size(); ++i) {
    const auto& x = out.window[i];
    index[x.word] = i;
    std::map<VertexId, std::uint32_t> vars;
    for (VertexId u : near) {
      auto k = cs.try_act(x.word, u);
      if (!k)
        throw OutOfWindow("support of f(" + g.format(x) + ") leaves the coset space; need depth >= window + S - 1");
      vars.emplace(*k, 0);
    }
    std::vector<Term> norm;
    for (auto& [k, var] : vars) {
      var = lp.add_variable("f_" + std::to_string(i) + "_" + std::to_string(k));
      norm.push_back({var, 1});
    }
    lp.add_row("n_" + std::to_string(i), std::move(norm), Sense::eq, 1);
    out.f.push_back(std::move(vars));
  }
  auto steps = g.ball(R);
  for (std::size_t i = 0; i < out.window.size(); ++i) {
    for (const auto& s : steps) {
      if (s.is_identity()) continue;
      auto y = g.multiply(out.window[i], s);
      auto it = index.find(y.word);
      if (it == index.end() || it->second <= i) continue;
      std::size_t j = it->second;
      std::map<VertexId, std::vector<Term>> diff;
      for (const auto& [k, v] : out.f[i]) diff[k].push_back({v, 1});
      for (const auto& [k, v] : out.f[j]) diff[k].push_back({v, -1});
      detail::add_l1_bound(lp, std::to_string(i) + "_" + std::to_string(j), diff, out.t);
      ++out.pairs;
    }
  }
  lp.objective = {{out.t, 1}};
  lp.metadata = {{"problem", "relative-property-A"},
                 {"group", g.text()},
                 {"family", detail::family_text(cs)},
                 {"window", std::to_string(window)},
                 {"S", std::to_string(S)},
                 {"R", std::to_string(R)},
                 {"convention", to_string(Convention::reiter)},
                 {"pairs", std::to_string(out.pairs)}};
  return out;
}

inline ProbCertificate certificate_from(const RelALP& inst, const LPSolution& sol) {
  if (sol.assignment.empty()) throw SpecError("LP solution carries no assignment");
  ProbCertificate c{Convention::reiter, {}};
  for (std::size_t i = 0; i < inst.window.size(); ++i) {
    auto& m = c.entries[inst.window[i].word];
    for (const auto& [k, v] : inst.f[i])
      if (sol.assignment[v] != 0) m[k] = sol.assignment[v];
  }
  return c;
}

/// min t subject to μ ∈ Prob({k : ρ(e,k) <= radius}) and ‖s·μ − μ‖₁ ≤ t for each
/// listed generator s. Mass that s carries outside the support counts fully.
struct MeanLP {
  LPInstance lp;
  std::map<VertexId, std::uint32_t> mu;
  std::uint32_t t = 0;
  std::size_t radius = 0;
  std::vector<GeneratorIndex> generators;
};

inline MeanLP build_mean_lp(const CosetSpace& cs, std::size_t support_radius,
                            std::vector<GeneratorIndex> generators = {}) {
  if (support_radius + 1 > cs.depth())
    throw OutOfWindow("mean LP needs coset space depth >= support radius + 1");
  const auto& g = cs.group();
  if (generators.empty())
    for (GeneratorIndex i = 0; i < g.rank(); ++i) generators.push_back(i);
  MeanLP out;
  out.radius = support_radius;
  out.generators = generators;
  auto& lp = out.lp;
  out.t = lp.add_variable("t");
  std::vector<Term> norm;
  for (VertexId k = 0; k < cs.size(); ++k)
    if (cs.vertex(k).key.size() <= support_radius) {
      auto v = lp.add_variable("mu_" + std::to_string(k));
      out.mu.emplace(k, v);
      norm.push_back({v, 1});
    }
  if (out.mu.empty()) throw SpecError("empty support set");
  lp.add_row("n", std::move(norm), Sense::eq, 1);
  for (auto s : generators) {
    if (s >= g.rank()) throw SpecError("generator index out of range");
    // (s·μ)(s·k) = μ(k)
    std::map<VertexId, std::vector<Term>> diff;
    for (const auto& [k, v] : out.mu) {
      auto sk = cs.edge(Letter::positive(s), k);
      if (!sk) throw OutOfWindow("generator image leaves the coset space");
      diff[*sk].push_back({v, 1});
      diff[k].push_back({v, -1});
    }
    detail::add_l1_bound(lp, "s" + std::to_string(s), diff, out.t);
  }
  lp.objective = {{out.t, 1}};
  std::string gens;
  for (auto s : generators) gens += (gens.empty() ? "" : ",") + g.generators()[s].symbol;
  lp.metadata = {{"problem", "relative-invariant-mean"},
                 {"group", g.text()},
                 {"family", detail::family_text(cs)},
                 {"support_radius", std::to_string(support_radius)},
                 {"generators", gens}};
  return out;
}

inline Measure mean_from(const MeanLP& inst, const LPSolution& sol) {
  if (sol.assignment.empty()) throw SpecError("LP solution carries no assignment");
  Measure mu;
  for (const auto& [k, v] : inst.mu)
    if (sol.assignment[v] != 0) mu[k] = sol.assignment[v];
  return mu;
}

/// The constant identity-centered certificate μ(g) = μ on ball(window). With
/// R = 1 its variation is max_s ‖s·μ − μ‖₁, the mean LP objective.
inline ProbCertificate constant_certificate(const Group& g, const Measure& mu, std::size_t window) {
  ProbCertificate c{Convention::identity, {}};
  for (const auto& x : g.ball(window)) c.entries[x.word] = mu;
  return c;
}

// ---- curves ----------------------------------------------------------------

struct CurvePoint {
  std::size_t window = 0;
  std::size_t S = 0;
  LPStatus status = LPStatus::optimal;
  Rational optimum = 0;
  std::size_t variables = 0, constraints = 0;
};

struct OptimumCurve {
  std::vector<CurvePoint> points;

  /// Optima never increase along the curve (capped points are skipped).
  bool non_increasing() const {
    const Rational* last = nullptr;
    for (const auto& p : points) {
      if (p.status != LPStatus::optimal) continue;
      if (last && p.optimum > *last) return false;
      last = &p.optimum;
    }
    return true;
  }

  bool strictly_decreasing() const {
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].status != LPStatus::optimal || !(points[i].optimum < points[i - 1].optimum)) return false;
    return true;
  }

  std::string csv() const {
    std::ostringstream out;
    out << "window,S,optimum_num,optimum_den\n";
    for (const auto& p : points)
      out << p.window << "," << p.S << "," << boost::multiprecision::numerator(p.optimum) << ","
          << boost::multiprecision::denominator(p.optimum) << "\n";
    return out.str();
  }
};

inline CurvePoint curve_point(std::size_t window, std::size_t S, const LPInstance& lp, const LPSolution& sol) {
  return {window, S, sol.status, sol.optimum, lp.variables.size(), lp.rows.size()};
}

inline OptimumCurve optimum_curve(const CosetSpace& cs, const std::vector<std::size_t>& windows,
                                  const std::function<std::size_t(std::size_t)>& S_policy, std::size_t R = 1,
                                  const LPOptions& opt = {}) {
  OptimumCurve curve;
  for (auto w : windows) {
    auto inst = build_relA_lp(cs, w, S_policy(w), R);
    auto sol = solve_lp(inst.lp, opt);
    curve.points.push_back(curve_point(w, inst.S, inst.lp, sol));
  }
  return curve;
}

/// Mean-LP optima by support radius; S is reported as radius + 1, the strict
/// support bound the extracted certificate satisfies.
inline OptimumCurve mean_curve(const CosetSpace& cs, const std::vector<std::size_t>& radii,
                               const LPOptions& opt = {}) {
  OptimumCurve curve;
  for (auto r : radii) {
    auto inst = build_mean_lp(cs, r);
    auto sol = solve_lp(inst.lp, opt);
    curve.points.push_back(curve_point(r, r + 1, inst.lp, sol));
  }
  return curve;
}

}  // namespace relcert
