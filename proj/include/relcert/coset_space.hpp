#pragma once

#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "relcert/error.hpp"
#include "relcert/group.hpp"
#include "relcert/membership.hpp"

namespace relcert {

struct SubgroupSpec {
  std::string label;
  std::vector<Word> generators;
};

using VertexId = std::uint32_t;

/// A coset gH_i, identified by its component i and the shortlex-least element
/// of the coset (which is also its minimal transporter).
struct Vertex {
  std::uint32_t component = 0;
  Word key;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct CosetSpaceOptions {
  /// Maximum number of subgroup-generator factors tried by bounded membership search.
  std::size_t membership_bound = 10;
  std::size_t max_cells = default_max_cells();
};

struct SchreierEdge {
  GeneratorIndex generator;
  VertexId from;
  VertexId to;
};

/// The cofinite G-set K = ⊔ G/H_i truncated to cosets whose shortest element has
/// length <= depth.
///
/// Vertices are ordered by component, then by shortlex key. Component i's
/// representative is the coset H_i itself, whose transporter is the identity.
/// Immutable after construction.
class CosetSpace {
 public:
  static CosetSpace build(std::shared_ptr<const Group> group, std::vector<SubgroupSpec> family,
                          std::size_t depth, CosetSpaceOptions options = {}) {
    if (depth < 1) throw SpecError("coset space depth must be >= 1");
    CosetSpace cs(std::move(group), std::move(family), depth, options);
    auto ball = cs.group_->ball(depth, options.max_cells);
    for (std::uint32_t i = 0; i < cs.family_.size(); ++i) {
      for (const auto& g : ball) {
        if (cs.find(i, g.word)) continue;
        cs.add_vertex(Vertex{i, g.word});
      }
    }
    cs.link();
    return cs;
  }

  /// Rebuilds a space from persisted vertices, checking every vertex against
  /// the membership oracles.
  static CosetSpace restore(std::shared_ptr<const Group> group, std::vector<SubgroupSpec> family,
                            std::size_t depth, CosetSpaceOptions options, const std::vector<Vertex>& vertices) {
    CosetSpace cs(std::move(group), std::move(family), depth, options);
    for (const auto& v : vertices) {
      if (v.component >= cs.family_.size()) throw FormatError("vertex component out of range");
      cs.group_->check(v.key);
      if (cs.group_->element(v.key).word != v.key) throw FormatError("vertex key is not in normal form");
      if (v.key.size() > depth) throw FormatError("vertex key longer than depth");
      if (cs.find(v.component, v.key)) throw FormatError("duplicate coset in vertex list");
      cs.add_vertex(v);
    }
    cs.link();
    auto rebuilt = build(cs.group_, cs.family_, depth, options);
    if (rebuilt.vertices_ != cs.vertices_) throw FormatError("vertex list does not match enumeration at this depth");
    return cs;
  }

  const Group& group() const { return *group_; }
  const std::shared_ptr<const Group>& group_ptr() const { return group_; }
  const std::vector<SubgroupSpec>& family() const { return family_; }
  std::size_t depth() const { return depth_; }
  const CosetSpaceOptions& options() const { return options_; }
  std::size_t size() const { return vertices_.size(); }
  std::size_t components() const { return family_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
  const std::vector<VertexId>& representatives() const { return representatives_; }
  const std::vector<VertexId>& component_vertices(std::uint32_t i) const { return by_component_.at(i); }

  /// g_v: the minimal-length, shortlex-least g with g·r_v = v.
  Element transporter(VertexId v) const { return Element{vertex(v).key, group_->id()}; }

  /// The enumerated vertex for the coset gH_i, if any.
  std::optional<VertexId> find(std::uint32_t component, const Word& g) const {
    const auto& oracle = *oracles_.at(component);
    if (auto key = oracle.coset_key(g)) {
      auto it = key_index_[component].find(*key);
      if (it == key_index_[component].end()) return std::nullopt;
      return it->second;
    }
    for (VertexId u : by_component_[component]) {
      if (oracle.contains(concat(inverse(vertices_[u].key), g))) return u;
    }
    return std::nullopt;
  }

  /// s·v for a single letter, where both endpoints are enumerated.
  std::optional<VertexId> edge(Letter s, VertexId v) const { return edges_.at(v).at(s.code); }

  std::optional<VertexId> try_act(const Word& g, VertexId v) const {
    VertexId at = v;
    bool ok = true;
    for (auto it = g.rbegin(); it != g.rend(); ++it) {
      auto next = edges_[at][it->code];
      if (!next) {
        ok = false;
        break;
      }
      at = *next;
    }
    if (ok) return at;
    return find(vertices_[v].component, concat(g, vertices_[v].key));
  }

  VertexId act(const Element& g, VertexId v) const {
    if (auto r = try_act(g.word, v)) return *r;
    throw OutOfWindow("g·v leaves the enumerated coset space (g = " + group_->format(g) +
                      ", v = " + describe(v) + ", depth " + std::to_string(depth_) + ")");
  }

  /// ρ(g,v) = ℓ(g_{g⁻¹v}).
  std::size_t rho(const Element& g, VertexId v) const {
    auto u = try_act(relcert::inverse(g.word), v);
    if (!u)
      throw OutOfWindow("rho: g^-1 v not enumerated (g = " + group_->format(g) + ", v = " + describe(v) +
                        "); deepen the coset space");
    return vertices_[*u].key.size();
  }

  /// True when every generator maps every vertex to an enumerated vertex.
  bool closed() const {
    for (const auto& row : edges_)
      for (const auto& e : row)
        if (!e) return false;
    return true;
  }

  std::vector<SchreierEdge> schreier_edges() const {
    std::vector<SchreierEdge> out;
    for (VertexId v = 0; v < vertices_.size(); ++v)
      for (GeneratorIndex g = 0; g < group_->rank(); ++g)
        if (auto to = edges_[v][Letter::positive(g).code]) out.push_back({g, v, *to});
    return out;
  }

  std::string describe(VertexId v) const {
    const auto& x = vertex(v);
    return group_->format(x.key) + "·" + family_[x.component].label;
  }

 private:
  CosetSpace(std::shared_ptr<const Group> group, std::vector<SubgroupSpec> family, std::size_t depth,
             CosetSpaceOptions options)
      : group_(std::move(group)), family_(std::move(family)), depth_(depth), options_(options) {
    if (family_.empty()) throw SpecError("subgroup family must be nonempty");
    for (const auto& h : family_) {
      if (h.label.empty()) throw SpecError("subgroup label must be nonempty");
      for (const auto& w : h.generators) group_->check(w);
      oracles_.push_back(std::make_shared<const SubgroupOracle>(group_, h.generators, options_.membership_bound));
    }
    key_index_.resize(family_.size());
    by_component_.resize(family_.size());
  }

  void add_vertex(Vertex v) {
    if (vertices_.size() >= options_.max_cells)
      throw ResourceLimit("coset space exceeds cap of " + std::to_string(options_.max_cells) + " vertices");
    auto id = static_cast<VertexId>(vertices_.size());
    if (auto key = oracles_[v.component]->coset_key(v.key)) key_index_[v.component].emplace(*key, id);
    if (v.key.empty()) representatives_.push_back(id);
    by_component_[v.component].push_back(id);
    vertices_.push_back(std::move(v));
  }

  void link() {
    edges_.assign(vertices_.size(), std::vector<std::optional<VertexId>>(2 * group_->rank()));
    for (VertexId v = 0; v < vertices_.size(); ++v)
      for (std::uint32_t code = 0; code < 2 * group_->rank(); ++code)
        edges_[v][code] = find(vertices_[v].component, concat(Word{Letter{code}}, vertices_[v].key));
    if (representatives_.size() != family_.size()) throw InvariantError("missing component representative");
  }

  std::shared_ptr<const Group> group_;
  std::vector<SubgroupSpec> family_;
  std::size_t depth_;
  CosetSpaceOptions options_;
  std::vector<std::shared_ptr<const SubgroupOracle>> oracles_;
  std::vector<Vertex> vertices_;
  std::vector<VertexId> representatives_;
  std::vector<std::vector<VertexId>> by_component_;
  std::vector<std::unordered_map<std::string, VertexId>> key_index_;
  std::vector<std::vector<std::optional<VertexId>>> edges_;
};

inline CosetSpace build_coset_space(std::shared_ptr<const Group> group, std::vector<SubgroupSpec> family,
                                    std::size_t depth, CosetSpaceOptions options = {}) {
  return CosetSpace::build(std::move(group), std::move(family), depth, options);
}

/// Builds a SubgroupSpec from word texts.
inline SubgroupSpec subgroup(const Group& g, std::string label, const std::vector<std::string>& words) {
  SubgroupSpec h{std::move(label), {}};
  for (const auto& w : words) h.generators.push_back(g.parse_word(w));
  return h;
}

}  // namespace relcert
