#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "relcert/error.hpp"
#include "relcert/group.hpp"

namespace relcert {

using Node = std::uint32_t;
inline constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

/// Undirected simple graph with the integer path metric.
///
/// A finite window of an infinite bounded-geometry space loses edges at its
/// edge; `full_degree` is the degree every vertex would have in the ambient
/// space (default: the maximum degree), and vertices below it form the frontier.
class FiniteGraph {
 public:
  FiniteGraph() = default;
  explicit FiniteGraph(std::size_t n) : adj_(n), labels_(n) {}

  std::size_t size() const { return adj_.size(); }
  const std::vector<Node>& neighbors(Node v) const { return adj_.at(v); }
  std::size_t degree(Node v) const { return adj_.at(v).size(); }

  void add_edge(Node u, Node v) {
    if (u >= size() || v >= size()) throw SpecError("edge endpoint out of range");
    if (u == v) throw SpecError("self-loops are not allowed");
    auto& a = adj_[u];
    if (std::find(a.begin(), a.end(), v) != a.end()) return;
    a.push_back(v);
    adj_[v].push_back(u);
  }

  /// Sorts adjacency lists so traversal order is canonical.
  void finalize() {
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& a : adj_) d = std::max(d, a.size());
    return d;
  }

  std::size_t full_degree() const { return full_degree_ ? full_degree_ : max_degree(); }
  void set_full_degree(std::size_t d) { full_degree_ = d; }

  /// Edges the ambient space has at v that the window cut off.
  std::size_t missing_degree(Node v) const {
    auto d = full_degree();
    return degree(v) < d ? d - degree(v) : 0;
  }

  std::vector<Node> frontier() const {
    std::vector<Node> out;
    for (Node v = 0; v < size(); ++v)
      if (missing_degree(v)) out.push_back(v);
    return out;
  }

  std::vector<std::pair<Node, Node>> edges() const {
    std::vector<std::pair<Node, Node>> out;
    for (Node u = 0; u < size(); ++u)
      for (Node v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  const std::string& label(Node v) const { return labels_.at(v); }
  void set_label(Node v, std::string s) { labels_.at(v) = std::move(s); }

  /// Distances from a source set, stopping after `limit` (kUnreached beyond it).
  std::vector<std::size_t> distances(const std::vector<Node>& sources, std::size_t limit = kUnreached) const {
    std::vector<std::size_t> d(size(), kUnreached);
    std::deque<Node> queue;
    for (Node s : sources) {
      if (d.at(s) == 0) continue;
      d[s] = 0;
      queue.push_back(s);
    }
    while (!queue.empty()) {
      Node u = queue.front();
      queue.pop_front();
      if (d[u] >= limit) continue;
      for (Node v : adj_[u])
        if (d[v] == kUnreached) {
          d[v] = d[u] + 1;
          queue.push_back(v);
        }
    }
    return d;
  }

  std::size_t distance(Node u, Node v) const { return distances({u})[v]; }

  /// Component index per vertex, numbered in order of smallest member.
  std::vector<std::uint32_t> components() const {
    std::vector<std::uint32_t> comp(size(), std::numeric_limits<std::uint32_t>::max());
    std::uint32_t next = 0;
    for (Node s = 0; s < size(); ++s) {
      if (comp[s] != std::numeric_limits<std::uint32_t>::max()) continue;
      for (auto [v, dv] : enumerate_reached(s)) comp[v] = next;
      ++next;
    }
    return comp;
  }

  std::size_t component_count() const {
    auto c = components();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
  }

 private:
  std::vector<std::pair<Node, std::size_t>> enumerate_reached(Node s) const {
    auto d = distances({s});
    std::vector<std::pair<Node, std::size_t>> out;
    for (Node v = 0; v < size(); ++v)
      if (d[v] != kUnreached) out.emplace_back(v, d[v]);
    return out;
  }

  std::vector<std::vector<Node>> adj_;
  std::vector<std::string> labels_;
  std::size_t full_degree_ = 0;
};

// ---- builders --------------------------------------------------------------

/// Path 0 - 1 - ... - (n-1): a window of ℤ.
inline FiniteGraph path_graph(std::size_t n) {
  FiniteGraph g(n);
  for (Node i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  for (Node i = 0; i < n; ++i) g.set_label(i, std::to_string(i));
  g.set_full_degree(2);
  g.finalize();
  return g;
}

namespace detail {

inline FiniteGraph grid(std::size_t w, std::size_t h, bool diagonals) {
  FiniteGraph g(w * h);
  auto id = [&](std::size_t x, std::size_t y) { return static_cast<Node>(y * w + x); };
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      g.set_label(id(x, y), std::to_string(x) + "," + std::to_string(y));
      if (x + 1 < w) g.add_edge(id(x, y), id(x + 1, y));
      if (y + 1 < h) g.add_edge(id(x, y), id(x, y + 1));
      if (diagonals && x + 1 < w && y + 1 < h) {
        g.add_edge(id(x, y), id(x + 1, y + 1));
        g.add_edge(id(x + 1, y), id(x, y + 1));
      }
    }
  g.set_full_degree(diagonals ? 8 : 4);
  g.finalize();
  return g;
}

}  // namespace detail

/// w × h window of ℤ² with the 4-neighbour (ℓ¹) metric. Vertex id = y·w + x.
inline FiniteGraph grid_graph(std::size_t w, std::size_t h) { return detail::grid(w, h, false); }

/// w × h window of ℤ² with the 8-neighbour (ℓ∞) metric, whose balls are boxes.
inline FiniteGraph king_grid(std::size_t w, std::size_t h) { return detail::grid(w, h, true); }

/// Cayley graph of ball(radius), vertices in shortlex order, labelled by words.
inline FiniteGraph cayley_ball(const Group& group, std::size_t radius) {
  auto ball = group.ball(radius);
  std::unordered_map<Word, Node, WordHash> index;
  for (Node i = 0; i < ball.size(); ++i) index.emplace(ball[i].word, i);
  FiniteGraph g(ball.size());
  std::size_t full = 0;
  for (Node i = 0; i < ball.size(); ++i) {
    g.set_label(i, group.format(ball[i]));
    for (GeneratorIndex s = 0; s < group.rank(); ++s) {
      auto y = group.multiply(ball[i], group.generator(s));
      if (y.word == ball[i].word) continue;
      if (auto it = index.find(y.word); it != index.end()) g.add_edge(i, it->second);
    }
  }
  // Neighbours of the identity within radius 1 are all distinct generators.
  if (radius >= 1) {
    std::set<Word, ShortlexLess> nbrs;
    for (GeneratorIndex s = 0; s < group.rank(); ++s)
      for (bool inv : {false, true}) {
        auto y = group.generator(s, inv);
        if (!y.is_identity()) nbrs.insert(y.word);
      }
    full = nbrs.size();
  }
  g.set_full_degree(full);
  g.finalize();
  return g;
}

// ---- edge-list text --------------------------------------------------------
//
//   # comment
//   vertices 5
//   full-degree 2      (optional)
//   0 1
//   1 2

inline FiniteGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::optional<FiniteGraph> g;
  std::size_t full = 0;
  std::vector<std::pair<Node, Node>> pending;
  std::size_t max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto fail = [&](const std::string& what) {
      throw FormatError("edge list line " + std::to_string(lineno) + ": " + what);
    };
    if (first == "vertices" || first == "full-degree") {
      std::size_t n;
      if (!(ls >> n)) fail("expected a count after '" + first + "'");
      if (first == "vertices") {
        if (g) fail("duplicate 'vertices' line");
        g.emplace(n);
      } else {
        full = n;
      }
    } else {
      std::size_t u, v;
      std::istringstream es(line);
      if (!(es >> u >> v)) fail("expected two vertex ids");
      std::string extra;
      if (es >> extra) fail("trailing text '" + extra + "'");
      if (u == v) fail("self-loop");
      pending.emplace_back(static_cast<Node>(u), static_cast<Node>(v));
      max_id = std::max({max_id, u, v});
      any = true;
    }
  }
  if (!g) g.emplace(any ? max_id + 1 : 0);
  for (auto [u, v] : pending) {
    if (u >= g->size() || v >= g->size()) throw FormatError("edge endpoint exceeds declared vertex count");
    g->add_edge(u, v);
  }
  for (Node i = 0; i < g->size(); ++i) g->set_label(i, std::to_string(i));
  if (full) g->set_full_degree(full);
  g->finalize();
  return *g;
}

inline std::string to_edge_list(const FiniteGraph& g) {
  std::ostringstream out;
  out << "vertices " << g.size() << "\n";
  out << "full-degree " << g.full_degree() << "\n";
  for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
  return out.str();
}

}  // namespace relcert
