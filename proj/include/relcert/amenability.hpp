#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relcert/error.hpp"
#include "relcert/graph.hpp"
#include "relcert/rational.hpp"

namespace relcert {

// ---- r-boundaries ----------------------------------------------------------

/// ∂_r U = {x : d(x,U) < r and d(x, X∖U) < r}, sorted. Distance to the empty set is +∞.
inline std::vector<Node> boundary_set(const FiniteGraph& g, const std::vector<Node>& U, std::size_t r) {
  if (r == 0) throw SpecError("boundary radius must be positive");
  std::vector<char> in(g.size(), 0);
  for (Node u : U) in.at(u) = 1;
  std::vector<Node> inside, outside;
  for (Node v = 0; v < g.size(); ++v) (in[v] ? inside : outside).push_back(v);
  if (inside.empty() || outside.empty()) return {};
  auto du = g.distances(inside, r - 1);
  auto dc = g.distances(outside, r - 1);
  std::vector<Node> out;
  for (Node v = 0; v < g.size(); ++v)
    if (du[v] < r && dc[v] < r) out.push_back(v);
  return out;
}

namespace detail {

/// Reusable scratch space for boundary sizes of many small subsets.
class BoundaryCounter {
 public:
  BoundaryCounter(const FiniteGraph& g, std::size_t r) : g_(g), r_(r), in_(g.size(), 0), stamp_(g.size(), 0) {}

  /// |∂_r U| for U given as a vertex list with no repeats.
  std::size_t count(const std::vector<Node>& U) {
    for (Node u : U) in_[u] = 1;
    std::size_t n = r_ == 2 ? count2(U) : countr(U);
    for (Node u : U) in_[u] = 0;
    return n;
  }

 private:
  // r = 2: U-vertices with an outside neighbour plus outside neighbours of U.
  std::size_t count2(const std::vector<Node>& U) {
    if (U.size() == g_.size()) return 0;
    ++epoch_;
    std::size_t n = 0;
    for (Node u : U) {
      bool edge = false;
      for (Node v : g_.neighbors(u))
        if (!in_[v]) {
          edge = true;
          if (stamp_[v] != epoch_) {
            stamp_[v] = epoch_;
            ++n;
          }
        }
      n += edge;
    }
    return n;
  }

  std::size_t countr(const std::vector<Node>& U) {
    std::vector<Node> copy(U);
    return boundary_set(g_, copy, r_).size();
  }

  const FiniteGraph& g_;
  std::size_t r_;
  std::vector<char> in_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
};

// a/b < c/d for positive b, d
inline bool ratio_less(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  return static_cast<unsigned __int128>(a) * d < static_cast<unsigned __int128>(c) * b;
}

}  // namespace detail

// ---- Følner search -----------------------------------------------------------

enum class FolnerStatus { found, not_found };

inline std::string to_string(FolnerStatus s) { return s == FolnerStatus::found ? "found" : "not-found-within-cap"; }

struct FolnerOptions {
  std::size_t cap = 500;  // largest |U| considered
  bool exhaustive = false;  // enumerate every connected U with |U| <= cap (cap <= 20)
  std::size_t seeds = 4;  // central ball seeds
  std::size_t random_seeds = 0;  // extra seeds drawn with `seed`
  std::uint64_t seed = 0;
  std::size_t local_steps = 100;
  /// U stays this far from the frontier so its r-boundary is not cut by the
  /// window; default 2r - 2.
  std::optional<std::size_t> margin;
};

struct FolnerResult {
  FolnerStatus status = FolnerStatus::not_found;
  std::vector<Node> U;  // sorted
  std::size_t r = 2;
  std::size_t boundary = 0;
  Rational ratio = 0;
  Rational delta = 0;
  std::size_t evaluated = 0;  // subsets whose boundary was counted
  std::string method;  // "ball", "local", "exhaustive"
};

/// Vertices at distance >= margin from the frontier; the whole graph if there is no frontier.
inline std::vector<Node> folner_candidates(const FiniteGraph& g, std::size_t margin) {
  auto frontier = g.frontier();
  std::vector<Node> out;
  if (frontier.empty()) {
    for (Node v = 0; v < g.size(); ++v) out.push_back(v);
    return out;
  }
  auto d = g.distances(frontier);
  for (Node v = 0; v < g.size(); ++v)
    if (d[v] != kUnreached && d[v] >= margin) out.push_back(v);
  return out;
}

namespace detail {

class FolnerSearch {
 public:
  FolnerSearch(const FiniteGraph& g, std::size_t r, Rational delta, const FolnerOptions& opt)
      : g_(g), r_(r), delta_(std::move(delta)), opt_(opt), counter_(g, r), allowed_(g.size(), 0) {
    std::size_t margin = opt.margin ? *opt.margin : (r >= 1 ? 2 * r - 2 : 0);
    candidates_ = folner_candidates(g, margin);
    for (Node v : candidates_) allowed_[v] = 1;
  }

  FolnerResult run() {
    if (opt_.exhaustive) {
      exhaustive();
    } else {
      balls();
      if (!found()) local();
    }
    FolnerResult res;
    res.r = r_;
    res.delta = delta_;
    res.evaluated = evaluated_;
    res.method = method_;
    if (best_size_) {
      res.U = best_;
      std::sort(res.U.begin(), res.U.end());
      res.boundary = best_boundary_;
      res.ratio = Rational(best_boundary_, best_size_);
      res.status = res.ratio < delta_ ? FolnerStatus::found : FolnerStatus::not_found;
    }
    return res;
  }

 private:
  bool found() const { return best_size_ && Rational(best_boundary_, best_size_) < delta_; }

  // Strictly better ratio, then smaller set, then lexicographically smaller.
  bool offer(const std::vector<Node>& U, std::size_t b, const char* method) {
    ++evaluated_;
    if (best_size_) {
      if (ratio_less(best_boundary_, best_size_, b, U.size())) return false;
      if (!ratio_less(b, U.size(), best_boundary_, best_size_)) {
        if (U.size() > best_size_) return false;
        if (U.size() == best_size_) {
          auto a = U, c = best_;
          std::sort(a.begin(), a.end());
          std::sort(c.begin(), c.end());
          if (!(a < c)) return false;
        }
      }
    }
    best_ = U;
    best_size_ = U.size();
    best_boundary_ = b;
    method_ = method;
    return true;
  }

  std::vector<Node> seeds() const {
    auto frontier = g_.frontier();
    std::vector<std::size_t> depth(g_.size(), 0);
    if (!frontier.empty()) depth = g_.distances(frontier);
    std::vector<Node> order(candidates_);
    std::stable_sort(order.begin(), order.end(), [&](Node a, Node b) { return depth[a] > depth[b]; });
    std::vector<Node> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(opt_.seeds, order.size())));
    if (opt_.random_seeds && !order.empty()) {
      std::mt19937_64 rng(opt_.seed);
      std::uniform_int_distribution<std::size_t> pick(0, order.size() - 1);
      for (std::size_t i = 0; i < opt_.random_seeds; ++i) out.push_back(order[pick(rng)]);
    }
    return out;
  }

  // Balls in the candidate-induced subgraph, grown until the cap.
  void balls() {
    for (Node s : seeds()) {
      std::vector<Node> layer{s}, U;
      std::vector<char> seen(g_.size(), 0);
      seen[s] = 1;
      while (!layer.empty() && U.size() + layer.size() <= opt_.cap) {
        U.insert(U.end(), layer.begin(), layer.end());
        offer(U, counter_.count(U), "ball");
        if (found()) return;
        std::vector<Node> next;
        for (Node u : layer)
          for (Node v : g_.neighbors(u))
            if (allowed_[v] && !seen[v]) {
              seen[v] = 1;
              next.push_back(v);
            }
        layer = std::move(next);
      }
    }
  }

  bool connected_without(const std::vector<Node>& U, std::size_t skip) const {
    if (U.size() <= 2) return true;
    std::vector<char> in(g_.size(), 0);
    for (std::size_t i = 0; i < U.size(); ++i)
      if (i != skip) in[U[i]] = 1;
    Node start = U[skip == 0 ? 1 : 0];
    std::vector<Node> stack{start};
    in[start] = 2;
    std::size_t reached = 1;
    while (!stack.empty()) {
      Node u = stack.back();
      stack.pop_back();
      for (Node v : g_.neighbors(u))
        if (in[v] == 1) {
          in[v] = 2;
          ++reached;
          stack.push_back(v);
        }
    }
    return reached == U.size() - 1;
  }

  // Steepest descent over single-vertex additions and removals that keep U connected.
  void local() {
    if (!best_size_) return;
    std::vector<Node> U = best_;
    std::size_t b = best_boundary_;
    for (std::size_t step = 0; step < opt_.local_steps; ++step) {
      std::vector<char> in(g_.size(), 0);
      for (Node u : U) in[u] = 1;
      std::optional<std::vector<Node>> move;
      std::size_t mb = b, ms = U.size();
      auto consider = [&](std::vector<Node> W) {
        auto wb = counter_.count(W);
        ++evaluated_;
        if (ratio_less(wb, W.size(), mb, ms)) {
          mb = wb;
          ms = W.size();
          move = std::move(W);
        }
      };
      if (U.size() < opt_.cap) {
        std::vector<Node> add;
        for (Node u : U)
          for (Node v : g_.neighbors(u))
            if (allowed_[v] && !in[v]) {
              in[v] = 2;
              add.push_back(v);
            }
        std::sort(add.begin(), add.end());
        for (Node v : add) {
          auto W = U;
          W.push_back(v);
          consider(std::move(W));
        }
      }
      for (std::size_t i = 0; U.size() > 1 && i < U.size(); ++i) {
        if (!connected_without(U, i)) continue;
        auto W = U;
        W.erase(W.begin() + static_cast<std::ptrdiff_t>(i));
        consider(std::move(W));
      }
      if (!move) break;
      U = std::move(*move);
      b = mb;
      offer(U, b, "local");
      if (found()) return;
    }
  }

  // ESU enumeration of connected subsets of the candidate-induced subgraph.
  void exhaustive() {
    if (opt_.cap > 20) throw SpecError("exhaustive Følner search is limited to cap <= 20");
    std::vector<std::uint32_t> near(g_.size(), 0);  // times in N[sub]
    std::vector<Node> sub;
    std::function<void(std::vector<Node>, Node)> extend = [&](std::vector<Node> ext, Node root) {
      offer(sub, counter_.count(sub), "exhaustive");
      if (sub.size() == opt_.cap) return;
      while (!ext.empty()) {
        Node w = ext.back();
        ext.pop_back();
        std::vector<Node> next(ext), fresh;
        for (Node u : g_.neighbors(w))
          if (allowed_[u] && u > root && near[u] == 0) {
            next.push_back(u);
            fresh.push_back(u);
          }
        sub.push_back(w);
        ++near[w];
        for (Node u : g_.neighbors(w)) ++near[u];
        extend(std::move(next), root);
        for (Node u : g_.neighbors(w)) --near[u];
        --near[w];
        sub.pop_back();
      }
    };
    for (Node v : candidates_) {
      sub = {v};
      ++near[v];
      for (Node u : g_.neighbors(v)) ++near[u];
      std::vector<Node> ext;
      for (Node u : g_.neighbors(v))
        if (allowed_[u] && u > v) ext.push_back(u);
      extend(std::move(ext), v);
      for (Node u : g_.neighbors(v)) --near[u];
      --near[v];
    }
  }

  const FiniteGraph& g_;
  std::size_t r_;
  Rational delta_;
  FolnerOptions opt_;
  BoundaryCounter counter_;
  std::vector<Node> candidates_;
  std::vector<char> allowed_;
  std::vector<Node> best_;
  std::size_t best_size_ = 0, best_boundary_ = 0;
  std::size_t evaluated_ = 0;
  std::string method_;
};

}  // namespace detail

/// Looks for a connected U with |∂_r U|/|U| < delta.
///
/// Heuristic mode grows balls around the most central candidates, then runs
/// steepest descent over single-vertex swaps; exhaustive mode enumerates every
/// connected subset up to the cap. Either way the best set seen is returned.
inline FolnerResult folner_search(const FiniteGraph& g, std::size_t r, const Rational& delta,
                                  const FolnerOptions& opt = {}) {
  if (r == 0) throw SpecError("boundary radius must be positive");
  if (delta <= 0) throw SpecError("delta must be positive");
  if (opt.cap == 0) throw SpecError("Følner cap must be positive");
  return detail::FolnerSearch(g, r, delta, opt).run();
}

/// Recounts the boundary of a reported set; true when the stored ratio is exact.
inline bool recount(const FiniteGraph& g, const FolnerResult& res) {
  if (res.U.empty()) return res.ratio == 0 && res.boundary == 0;
  auto b = boundary_set(g, res.U, res.r).size();
  return b == res.boundary && Rational(b, res.U.size()) == res.ratio;
}

// ---- uniformly finite homology, degree 0 -----------------------------------

/// Endpoints past the window. Each missing edge at v is its own virtual point
/// kOutsideBase + j, so a cell (v, kOutsideBase + j) is one escaping 1-cell.
inline constexpr Node kOutsideBase = 0xFFFFFF00u;
inline bool is_outside(Node v) { return v >= kOutsideBase; }

struct UFChain {
  int degree = 0;
  std::map<std::vector<Node>, Rational> coefficients;
  std::size_t R = 0;
  Rational K = 0;
};

enum class BoundaryPolicy { open, closed };

inline std::string to_string(BoundaryPolicy p) { return p == BoundaryPolicy::open ? "open" : "closed"; }

inline BoundaryPolicy parse_policy(const std::string& s) {
  if (s == "open") return BoundaryPolicy::open;
  if (s == "closed") return BoundaryPolicy::closed;
  throw SpecError("unknown boundary policy '" + s + "' (expected open or closed)");
}

/// Σ_x [x] over every vertex of the window.
inline UFChain fundamental_class(const FiniteGraph& g) {
  UFChain phi;
  for (Node v = 0; v < g.size(); ++v) phi.coefficients[{v}] = 1;
  return phi;
}

/// ∂[x,y] = [y] − [x], extended linearly; includes virtual outside points.
inline std::map<Node, Rational> boundary_of(const UFChain& psi) {
  if (psi.degree != 1) throw SpecError("boundary_of expects a 1-chain");
  std::map<Node, Rational> out;
  for (const auto& [cell, a] : psi.coefficients) {
    if (cell.size() != 2) throw FormatError("1-chain cell must have two endpoints");
    out[cell[1]] += a;
    out[cell[0]] -= a;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

/// Default interior: the whole window under `open` (escaping cells carry the
/// excess), the non-frontier vertices under `closed`.
inline std::vector<Node> default_interior(const FiniteGraph& g, BoundaryPolicy policy) {
  std::vector<Node> out;
  for (Node v = 0; v < g.size(); ++v)
    if (policy == BoundaryPolicy::open || g.missing_degree(v) == 0) out.push_back(v);
  return out;
}

struct UFResult {
  bool feasible = false;
  BoundaryPolicy policy = BoundaryPolicy::closed;
  std::vector<Node> interior;
  UFChain witness;  // degree 1, present when feasible
  Rational demand = 0;  // flow that had to be routed
  Rational routed = 0;
};

struct UFCheck {
  bool bounded = true;  // |a_z| <= K
  bool propagation = true;  // cells inside the window have 1 <= d < R
  bool boundary = true;  // ∂ψ = φ on the interior
  std::optional<Node> bad_vertex;
  bool ok() const { return bounded && propagation && boundary; }
};

namespace detail {

/// Edmonds–Karp over exact rationals.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : head_(n, -1) {}

  int add_arc(std::size_t u, std::size_t v, const Rational& cap) {
    arcs_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(arcs_.size() - 1);
    arcs_.push_back({u, head_[v], 0});
    head_[v] = static_cast<int>(arcs_.size() - 1);
    return static_cast<int>(arcs_.size() - 2);
  }

  Rational run(std::size_t s, std::size_t t) {
    Rational total = 0;
    while (true) {
      std::vector<int> via(head_.size(), -1);
      std::vector<char> seen(head_.size(), 0);
      std::deque<std::size_t> queue{s};
      seen[s] = 1;
      while (!queue.empty() && !seen[t]) {
        auto u = queue.front();
        queue.pop_front();
        for (int e = head_[u]; e != -1; e = arcs_[e].next)
          if (arcs_[e].cap > 0 && !seen[arcs_[e].to]) {
            seen[arcs_[e].to] = 1;
            via[arcs_[e].to] = e;
            queue.push_back(arcs_[e].to);
          }
      }
      if (!seen[t]) return total;
      Rational push = -1;
      for (auto v = t; v != s; v = arcs_[via[v] ^ 1].to)
        if (push < 0 || arcs_[via[v]].cap < push) push = arcs_[via[v]].cap;
      for (auto v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= push;
        arcs_[via[v] ^ 1].cap += push;
      }
      total += push;
    }
  }

  /// Flow on a forward arc = residual capacity of its reverse arc.
  const Rational& flow(int arc) const { return arcs_[arc ^ 1].cap; }

 private:
  struct Arc {
    std::size_t to;
    int next;
    Rational cap;
  };
  std::vector<int> head_;
  std::vector<Arc> arcs_;
};

}  // namespace detail

/// 1-cells allowed by propagation bound R: window pairs x < y with 1 <= d(x,y) < R.
inline std::vector<std::pair<Node, Node>> uf_cells(const FiniteGraph& g, std::size_t R) {
  std::vector<std::pair<Node, Node>> out;
  if (R < 2) return out;
  for (Node x = 0; x < g.size(); ++x) {
    auto d = g.distances({x}, R - 1);
    for (Node y = x + 1; y < g.size(); ++y)
      if (d[y] >= 1 && d[y] < R) out.emplace_back(x, y);
  }
  return out;
}

/// Is there a 1-chain ψ with |a_z| <= K and propagation < R whose boundary
/// equals φ on the interior? Under `open`, each edge the window cut off at a
/// frontier vertex is an extra 1-cell leading out of the window.
///
/// Solved as an exact max-flow: cells are arcs of capacity K both ways,
/// interior vertices carry their φ-demand, and non-interior vertices together
/// with the outside are one free hub.
inline UFResult uf_boundary_solve(const FiniteGraph& g, const UFChain& phi, std::size_t R, const Rational& K,
                                  BoundaryPolicy policy, std::optional<std::vector<Node>> interior = std::nullopt) {
  if (phi.degree != 0) throw SpecError("uf test expects a 0-chain");
  if (K < 0) throw SpecError("coefficient bound K must be nonnegative");
  UFResult res;
  res.policy = policy;
  res.interior = interior ? *interior : default_interior(g, policy);
  std::sort(res.interior.begin(), res.interior.end());
  res.interior.erase(std::unique(res.interior.begin(), res.interior.end()), res.interior.end());
  std::vector<char> inner(g.size(), 0);
  for (Node v : res.interior) inner.at(v) = 1;
  std::vector<Rational> demand(g.size(), 0);
  for (const auto& [cell, a] : phi.coefficients) {
    if (cell.size() != 1 || cell[0] >= g.size()) throw FormatError("0-chain cell outside the window");
    demand[cell[0]] += a;
  }

  const std::size_t hub = g.size(), S = hub + 1, T = hub + 2;
  detail::MaxFlow flow(g.size() + 3);
  auto cells = uf_cells(g, R);
  Rational big = 1;
  for (Node v = 0; v < g.size(); ++v) big += abs(demand[v]);
  big += K * Rational(2 * cells.size() + 2 * g.size() * g.full_degree());
  std::vector<std::pair<int, int>> cell_arcs;
  for (auto [x, y] : cells) cell_arcs.emplace_back(flow.add_arc(x, y, K), flow.add_arc(y, x, K));
  std::vector<std::pair<int, int>> out_arcs(g.size(), {-1, -1});
  if (policy == BoundaryPolicy::open && R >= 2)
    for (Node v = 0; v < g.size(); ++v)
      if (auto m = g.missing_degree(v)) {
        Rational cap = K * Rational(m);
        out_arcs[v] = {flow.add_arc(v, hub, cap), flow.add_arc(hub, v, cap)};
      }
  Rational D = 0, supply = 0;
  for (Node v = 0; v < g.size(); ++v) {
    if (!inner[v]) {
      flow.add_arc(v, hub, big);
      flow.add_arc(hub, v, big);
      continue;
    }
    D += demand[v];
    if (demand[v] > 0) flow.add_arc(v, T, demand[v]);
    if (demand[v] < 0) {
      flow.add_arc(S, v, -demand[v]);
      supply -= demand[v];
    }
  }
  if (D > 0) {
    flow.add_arc(S, hub, D);
    supply += D;
  } else if (D < 0) {
    flow.add_arc(hub, T, -D);
  }
  res.demand = supply;
  res.routed = flow.run(S, T);
  res.feasible = res.routed == supply;
  if (!res.feasible) return res;

  auto& psi = res.witness;
  psi.degree = 1;
  psi.R = R;
  psi.K = K;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Rational a = flow.flow(cell_arcs[i].first) - flow.flow(cell_arcs[i].second);
    if (a != 0) psi.coefficients[{cells[i].first, cells[i].second}] = a;
  }
  for (Node v = 0; v < g.size(); ++v) {
    if (out_arcs[v].first < 0) continue;
    Rational net = flow.flow(out_arcs[v].first) - flow.flow(out_arcs[v].second);
    if (net == 0) continue;
    auto m = g.missing_degree(v);
    for (std::size_t j = 0; j < m; ++j)
      psi.coefficients[{v, static_cast<Node>(kOutsideBase + j)}] = net / Rational(m);
  }
  return res;
}

/// Independent check of a witness: bounds, propagation, and ∂ψ = φ cell by cell.
inline UFCheck check_uf_witness(const FiniteGraph& g, const UFChain& phi, const UFChain& psi,
                                const std::vector<Node>& interior) {
  UFCheck c;
  for (const auto& [cell, a] : psi.coefficients) {
    if (abs(a) > psi.K) c.bounded = false;
    if (cell.size() != 2) {
      c.propagation = false;
      continue;
    }
    auto [x, y] = std::pair{cell[0], cell[1]};
    if (is_outside(x)) c.propagation = false;
    if (is_outside(y)) {
      if (y - kOutsideBase >= g.missing_degree(x)) c.propagation = false;
      continue;
    }
    auto d = g.distance(x, y);
    if (d == 0 || d == kUnreached || d >= psi.R) c.propagation = false;
  }
  auto bd = boundary_of(psi);
  for (Node v : interior) {
    Rational want = 0;
    if (auto it = phi.coefficients.find({v}); it != phi.coefficients.end()) want = it->second;
    Rational got = bd.count(v) ? bd[v] : Rational(0);
    if (got != want) {
      c.boundary = false;
      if (!c.bad_vertex) c.bad_vertex = v;
    }
  }
  return c;
}

}  // namespace relcert
