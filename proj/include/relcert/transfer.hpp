#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relcert/certificates.hpp"
#include "relcert/coset_space.hpp"
#include "relcert/graph.hpp"

namespace relcert {

/// A group acting on a finite fragment of a space X. `moves[code][x]` is s·x
/// for the letter with that code, where it lands inside the fragment.
struct SpaceAction {
  std::shared_ptr<const Group> group;
  FiniteGraph space;
  std::vector<std::vector<std::optional<Node>>> moves;
  Node basepoint = 0;
  std::vector<Node> representatives;
  std::vector<std::string> stabilizers;  // one label per representative

  std::optional<Node> apply(Letter s, Node x) const { return moves.at(s.code).at(x); }

  std::optional<Node> apply(const Word& g, Node x) const {
    for (auto it = g.rbegin(); it != g.rend(); ++it) {
      auto next = apply(*it, x);
      if (!next) return std::nullopt;
      x = *next;
    }
    return x;
  }

  Node act(const Element& g, Node x) const {
    if (auto y = apply(g.word, x)) return *y;
    throw OutOfWindow("g·x leaves the space fragment (g = " + group->format(g) + ", x = " + space.label(x) + ")");
  }

  Measure translate(const Element& g, const Measure& m) const {
    Measure out;
    for (const auto& [x, p] : m) out[act(g, x)] += p;
    return out;
  }

  /// Shape checks, inverse letters undoing each other, and agreement with the
  /// group's normal forms on all words of length <= 3 where defined.
  void validate() const {
    if (!group) throw SpecError("space action has no group");
    if (moves.size() != 2 * group->rank()) throw FormatError("space action needs one move table per letter");
    for (const auto& m : moves)
      if (m.size() != space.size()) throw FormatError("move table size differs from vertex count");
    if (basepoint >= space.size()) throw FormatError("basepoint out of range");
    if (representatives.size() != stabilizers.size()) throw FormatError("one stabilizer label per representative");
    for (Node r : representatives)
      if (r >= space.size()) throw FormatError("representative out of range");
    for (std::uint32_t code = 0; code < moves.size(); ++code)
      for (Node x = 0; x < space.size(); ++x)
        if (auto y = moves[code][x]) {
          if (*y >= space.size()) throw FormatError("move target out of range");
          auto back = apply(Letter{code}.inverse(), *y);
          if (back && *back != x) throw FormatError("inverse letter does not undo a move");
        }
    std::vector<Word> words{Word{}};
    for (std::size_t len = 1; len <= 3; ++len) {
      std::vector<Word> next;
      for (const auto& w : words)
        if (w.size() == len - 1)
          for (std::uint32_t code = 0; code < moves.size(); ++code) next.push_back(concat(w, Word{Letter{code}}));
      words.insert(words.end(), next.begin(), next.end());
    }
    for (const auto& w : words) {
      auto nf = group->element(w).word;
      for (Node x = 0; x < space.size(); ++x) {
        auto a = apply(w, x), b = apply(nf, x);
        if (a && b && *a != *b) throw FormatError("action violates a relation of " + group->text());
      }
    }
  }
};

/// G acting on its own coset space, with the Schreier graph as the metric.
inline SpaceAction coset_action(const CosetSpace& cs) {
  const auto& g = cs.group();
  SpaceAction act;
  act.group = cs.group_ptr();
  act.space = FiniteGraph(cs.size());
  act.moves.assign(2 * g.rank(), std::vector<std::optional<Node>>(cs.size()));
  for (std::uint32_t code = 0; code < 2 * g.rank(); ++code)
    for (VertexId v = 0; v < cs.size(); ++v) {
      act.moves[code][v] = cs.edge(Letter{code}, v);
      if (auto u = act.moves[code][v]; u && *u != v) act.space.add_edge(v, *u);
    }
  for (VertexId v = 0; v < cs.size(); ++v) act.space.set_label(v, cs.describe(v));
  act.space.finalize();
  act.basepoint = cs.representatives()[0];
  act.representatives = cs.representatives();
  for (const auto& h : cs.family()) act.stabilizers.push_back(h.label);
  return act;
}

/// The Bass–Serre tree of a two-subgroup coset space: vertices are the cosets,
/// and gH_0 is joined to gH_1 for every enumerated g.
inline SpaceAction bass_serre_tree(const CosetSpace& cs) {
  if (cs.components() != 2) throw SpecError("Bass–Serre tree needs a family of exactly two subgroups");
  const auto& g = cs.group();
  auto act = coset_action(cs);
  act.space = FiniteGraph(cs.size());
  for (const auto& x : g.ball(cs.depth(), cs.options().max_cells)) {
    auto u = cs.find(0, x.word), v = cs.find(1, x.word);
    if (u && v) act.space.add_edge(*u, *v);
  }
  for (VertexId v = 0; v < cs.size(); ++v) act.space.set_label(v, cs.describe(v));
  act.space.finalize();
  if (act.space.component_count() != 1 || act.space.edges().size() + 1 != act.space.size())
    throw SpecError("coset incidence graph is not a tree at this depth");
  return act;
}

inline std::vector<VertexId> identity_projection(const CosetSpace& cs) {
  std::vector<VertexId> pi(cs.size());
  for (VertexId v = 0; v < cs.size(); ++v) pi[v] = v;
  return pi;
}

// ---- tree certificates -------------------------------------------------------

/// parent[x] is the neighbour of x one step closer to a fixed end of the tree.
struct EndRanking {
  std::vector<std::optional<Node>> parent;
};

inline void check_tree(const FiniteGraph& tree) {
  if (tree.size() == 0 || tree.component_count() != 1 || tree.edges().size() + 1 != tree.size())
    throw SpecError("graph is not a tree");
}

/// Busemann ranking toward `tip`, which stands in for the end: each vertex
/// points at its neighbour closer to tip. Only the tip has no parent.
inline EndRanking busemann_ranking(const FiniteGraph& tree, Node tip) {
  check_tree(tree);
  auto d = tree.distances({tip});
  EndRanking r;
  r.parent.resize(tree.size());
  for (Node x = 0; x < tree.size(); ++x)
    for (Node y : tree.neighbors(x))
      if (d[y] + 1 == d[x]) r.parent[x] = y;
  return r;
}

/// Ranking from heights h (a discrete Busemann function): the parent is the
/// unique neighbour one lower, and every other neighbour is one higher.
inline EndRanking ranking_from_heights(const FiniteGraph& tree, const std::vector<long long>& h) {
  check_tree(tree);
  if (h.size() != tree.size()) throw SpecError("one height per vertex required");
  EndRanking r;
  r.parent.resize(tree.size());
  for (Node x = 0; x < tree.size(); ++x)
    for (Node y : tree.neighbors(x)) {
      if (h[y] == h[x] - 1) {
        if (r.parent[x]) throw SpecError("ranking inconsistent: two lower neighbours at " + tree.label(x));
        r.parent[x] = y;
      } else if (h[y] != h[x] + 1) {
        throw SpecError("ranking inconsistent: heights of neighbours must differ by one");
      }
    }
  return r;
}

/// The tip for a Busemann ranking along the ray x0, u·x0, u²·x0, ...: the last
/// u^k·x0 inside the fragment.
inline Node ray_tip(const SpaceAction& act, const Word& u) {
  Node at = act.basepoint;
  for (std::size_t k = 0; k < act.space.size(); ++k) {
    auto next = act.apply(u, at);
    if (!next || *next == at) return at;
    at = *next;
  }
  return at;
}

struct PropAFamily {
  std::size_t n = 1;
  std::size_t S = 0;  // supp ξ(x) ⊆ B_S(x)
  std::map<Node, Measure> xi;  // vertices whose ancestor chain fits in the fragment
};

/// ξ_n(x) = uniform measure on x, parent(x), ..., parent^{n−1}(x).
inline PropAFamily tree_certificates(const FiniteGraph& tree, const EndRanking& ranking, std::size_t n) {
  if (n == 0) throw SpecError("n must be positive");
  check_tree(tree);
  if (ranking.parent.size() != tree.size()) throw SpecError("ranking inconsistent: size differs from tree");
  for (Node x = 0; x < tree.size(); ++x)
    if (auto p = ranking.parent[x]) {
      const auto& nb = tree.neighbors(x);
      if (!std::binary_search(nb.begin(), nb.end(), *p)) throw SpecError("ranking inconsistent: parent is not adjacent");
      if (ranking.parent[*p] == x) throw SpecError("ranking inconsistent: two vertices point at each other");
    }
  PropAFamily fam;
  fam.n = n;
  fam.S = n - 1;
  for (Node x = 0; x < tree.size(); ++x) {
    Measure m;
    Node at = x;
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      m[at] = Rational(1, static_cast<long>(n));
      if (i + 1 == n) break;
      if (!ranking.parent[at]) {
        ok = false;
        break;
      }
      at = *ranking.parent[at];
    }
    if (ok) fam.xi.emplace(x, std::move(m));
  }
  return fam;
}

inline const Measure& xi_at(const PropAFamily& fam, Node x, const FiniteGraph& space) {
  auto it = fam.xi.find(x);
  if (it == fam.xi.end()) throw OutOfWindow("ξ(" + space.label(x) + ") needs ancestors outside the fragment");
  return it->second;
}

/// ‖ξ(x) − ξ(y)‖₁ over every tree edge where both are defined.
inline std::vector<Rational> edge_variations(const FiniteGraph& tree, const PropAFamily& fam) {
  std::vector<Rational> out;
  for (auto [x, y] : tree.edges()) {
    auto a = fam.xi.find(x), b = fam.xi.find(y);
    if (a != fam.xi.end() && b != fam.xi.end()) out.push_back(l1_distance(a->second, b->second));
  }
  return out;
}

// ---- induction ---------------------------------------------------------------

/// μ(g) = g·ξ(g⁻¹x₀) for g in ball(window), an identity-centered certificate
/// on the vertices of the space.
inline ProbCertificate induce_from_space(const SpaceAction& act, const PropAFamily& fam, std::size_t window) {
  const auto& g = *act.group;
  ProbCertificate out{Convention::identity, {}};
  for (const auto& x : g.ball(window)) {
    Node y = act.act(g.inverse(x), act.basepoint);
    out.entries[x.word] = act.translate(x, xi_at(fam, y, act.space));
  }
  return out;
}

/// Both sides of ‖g·μ(w) − μ(gw)‖₁ = ‖ξ(w⁻¹x₀) − ξ(w⁻¹g⁻¹x₀)‖₁ for w, gw in
/// the window and 1 <= ℓ(g) <= R.
struct InductionPair {
  Word w, g;
  Rational lhs, rhs;
};

inline std::vector<InductionPair> induction_pairs(const SpaceAction& act, const PropAFamily& fam,
                                                  const ProbCertificate& mu, std::size_t R, std::size_t window) {
  const auto& G = *act.group;
  std::vector<InductionPair> out;
  for (const auto& w : G.ball(window))
    for (const auto& g : G.ball(R)) {
      if (g.is_identity()) continue;
      auto gw = G.multiply(g, w);
      if (gw.length() > window) continue;
      auto lhs = l1_distance(act.translate(g, mu.entries.at(w.word)), mu.entries.at(gw.word));
      Node a = act.act(G.inverse(w), act.basepoint);
      Node b = act.act(G.inverse(gw), act.basepoint);
      auto rhs = l1_distance(xi_at(fam, a, act.space), xi_at(fam, b, act.space));
      out.push_back({w.word, g.word, lhs, rhs});
    }
  return out;
}

/// Per-pair variations of a certificate on the space's vertices, in the
/// certificate's own convention.
inline std::vector<PairVariation> space_pair_variations(const SpaceAction& act, const ProbCertificate& c,
                                                        std::size_t R, std::size_t window) {
  const auto& G = *act.group;
  std::vector<PairVariation> out;
  for (const auto& x : G.ball(window))
    for (const auto& g : G.ball(R)) {
      if (g.is_identity()) continue;
      if (c.convention == Convention::reiter) {
        auto y = G.multiply(x, g);
        if (y.length() > window) continue;
        out.push_back({x.word, y.word, g.word, l1_distance(c.entries.at(x.word), c.entries.at(y.word))});
      } else {
        auto y = G.multiply(g, x);
        if (y.length() > window) continue;
        out.push_back(
            {x.word, y.word, g.word, l1_distance(act.translate(g, c.entries.at(x.word)), c.entries.at(y.word))});
      }
    }
  return out;
}

/// Largest d(x₀, g·x₀)/ℓ(g) over g ≠ e in ball(window).
inline Rational qi_constant(const SpaceAction& act, std::size_t window) {
  const auto& G = *act.group;
  Rational c = 0;
  auto d = act.space.distances({act.basepoint});
  for (const auto& g : G.ball(window)) {
    if (g.is_identity()) continue;
    Rational r(static_cast<long>(d[act.act(g, act.basepoint)]), static_cast<long>(g.length()));
    if (r > c) c = r;
  }
  return c;
}

// ---- pushforward, flip, lift, finite index -------------------------------------

/// ζ(x)(y) = Σ_{π(k)=y} ξ(x)(k) for a G-map π from the space to the coset space.
/// Equivariance is checked on every vertex and letter where both sides are defined.
inline ProbCertificate pushforward_to_cosets(const ProbCertificate& cert, const SpaceAction& act,
                                             const CosetSpace& cs, const std::vector<VertexId>& pi) {
  if (pi.size() != act.space.size()) throw SpecError("projection must map every space vertex");
  for (VertexId v : pi)
    if (v >= cs.size()) throw SpecError("projection target out of range");
  for (std::uint32_t code = 0; code < act.moves.size(); ++code)
    for (Node x = 0; x < act.space.size(); ++x) {
      auto sx = act.moves[code][x];
      auto spx = cs.edge(Letter{code}, pi[x]);
      if (sx && spx && pi[*sx] != *spx)
        throw SpecError("projection is not equivariant at " + act.space.label(x) + " under " +
                        cs.group().format(Word{Letter{code}}));
    }
  ProbCertificate out{cert.convention, {}};
  for (const auto& [x, m] : cert.entries) {
    auto& z = out.entries[x];
    for (const auto& [k, p] : m) z[pi.at(k)] += p;
  }
  return out;
}

/// f(g) = g·c(g⁻¹). Swaps the identity-centered and Reiter conventions and is
/// an involution.
inline ProbCertificate flip(const ProbCertificate& c, const CosetSpace& cs) {
  const auto& G = cs.group();
  ProbCertificate out{c.convention == Convention::reiter ? Convention::identity : Convention::reiter, {}};
  for (const auto& [w, m] : c.entries) {
    auto g = G.element(w);
    auto inv = G.inverse(g);
    auto it = c.entries.find(inv.word);
    if (it == c.entries.end()) throw OutOfWindow("flip needs an entry at " + G.format(inv));
    out.entries[w] = translate(cs, g, it->second);
  }
  return out;
}

/// Data for lifting from Q = G/H: images of G's generators in Q and, for each
/// generator of Q, a word of G mapping to it.
struct QuotientMap {
  std::vector<Word> images;  // per G generator, a word in Q
  std::vector<Word> section;  // per Q generator, a word in G

  Element project(const Group& G, const Group& Q, const Word& g) const {
    G.check(g);
    Word out;
    for (auto l : g) out = concat(out, l.is_inverse() ? inverse(images.at(l.generator())) : images.at(l.generator()));
    return Q.element(out);
  }
  Word lift(const Word& q) const {
    Word out;
    for (auto l : q) out = concat(out, l.is_inverse() ? inverse(section.at(l.generator())) : section.at(l.generator()));
    return out;
  }
};

/// Pulls a certificate for Q (on K_Q = Q) back to G relative to H = ker π:
/// f(x) = ι_* f_Q(π(x)), where ι identifies Q with G/H through the section.
/// ι is checked against π and against the generator action.
inline ProbCertificate lift_from_quotient(const ProbCertificate& quot, const CosetSpace& csQ, const CosetSpace& csG,
                                          const QuotientMap& map, std::size_t window) {
  const auto& Q = csQ.group();
  const auto& G = csG.group();
  if (map.images.size() != G.rank() || map.section.size() != Q.rank())
    throw SpecError("quotient map needs one image per G generator and one lift per Q generator");
  if (csG.components() != 1 || csQ.components() != 1)
    throw SpecError("quotient lift expects one subgroup on each side");
  for (GeneratorIndex i = 0; i < Q.rank(); ++i)
    if (map.project(G, Q, map.section[i]).word != Q.generator(i).word)
      throw SpecError("section does not lift generator " + Q.generators()[i].symbol);
  std::vector<std::optional<VertexId>> iota(csQ.size());
  auto embed = [&](VertexId k) {
    if (!iota[k]) {
      auto v = csG.find(0, G.element(map.lift(csQ.vertex(k).key)).word);
      if (!v) throw OutOfWindow("lift of " + csQ.describe(k) + " is not enumerated in the G-side coset space");
      if (csQ.find(0, map.project(G, Q, csG.vertex(*v).key).word) != k)
        throw SpecError("projection does not identify G/H with Q at " + csQ.describe(k));
      iota[k] = *v;
    }
    return *iota[k];
  };
  for (VertexId k = 0; k < csQ.size(); ++k)
    for (GeneratorIndex s = 0; s < G.rank(); ++s) {
      auto qk = csQ.try_act(map.project(G, Q, Word{Letter::positive(s)}).word, k);
      auto gk = csG.edge(Letter::positive(s), embed(k));
      if (qk && gk && embed(*qk) != *gk) throw SpecError("quotient map is not equivariant; is H the kernel?");
    }
  ProbCertificate out{quot.convention, {}};
  for (const auto& x : G.ball(window)) {
    auto q = map.project(G, Q, x.word);
    auto it = quot.entries.find(q.word);
    if (it == quot.entries.end()) throw OutOfWindow("quotient certificate has no entry at " + Q.format(q));
    auto& m = out.entries[x.word];
    for (const auto& [k, p] : it->second) m[embed(k)] += p;
  }
  return out;
}

/// The constant uniform measure on a finite K, which every generator permutes.
inline ProbCertificate finite_index_uniform(const CosetSpace& cs, std::size_t window,
                                            Convention convention = Convention::reiter) {
  if (!cs.closed()) throw SpecError("K is not finite within depth " + std::to_string(cs.depth()));
  Measure p;
  for (VertexId v = 0; v < cs.size(); ++v) p[v] = Rational(1, static_cast<long>(cs.size()));
  ProbCertificate out{convention, {}};
  for (const auto& x : cs.group().ball(window)) out.entries[x.word] = p;
  return out;
}

}  // namespace relcert
