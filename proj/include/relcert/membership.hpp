#pragma once

#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "relcert/error.hpp"
#include "relcert/group.hpp"
#include "relcert/rational.hpp"

namespace relcert {

/// Integer lattice kept in row echelon form with positive pivots.
class IntegerLattice {
 public:
  explicit IntegerLattice(std::size_t dim) : dim_(dim) {}

  std::size_t dimension() const { return dim_; }

  void add(std::vector<BigInt> v) {
    v.resize(dim_);
    std::size_t r = 0;
    while (true) {
      std::size_t lead = leading(v);
      if (lead == dim_) return;
      while (r < rows_.size() && pivot(rows_[r]) < lead) ++r;
      if (r == rows_.size() || pivot(rows_[r]) > lead) {
        if (v[lead] < 0) negate(v);
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(r), std::move(v));
        return;
      }
      auto& row = rows_[r];
      BigInt p = row[lead], a = v[lead];
      auto [g, s, t] = extended_gcd(p, a);
      std::vector<BigInt> combined(dim_), rest(dim_);
      BigInt ap = a / g, pp = p / g;
      for (std::size_t i = 0; i < dim_; ++i) {
        combined[i] = s * row[i] + t * v[i];
        rest[i] = ap * row[i] - pp * v[i];
      }
      if (combined[lead] < 0) negate(combined);
      row = std::move(combined);
      v = std::move(rest);
      ++r;
    }
  }

  /// Canonical representative of v + L.
  std::vector<BigInt> reduce(std::vector<BigInt> v) const {
    v.resize(dim_);
    for (const auto& row : rows_) {
      std::size_t c = pivot(row);
      BigInt q = floor_div(v[c], row[c]);
      if (q != 0)
        for (std::size_t i = c; i < dim_; ++i) v[i] -= q * row[i];
    }
    return v;
  }

  bool contains(const std::vector<BigInt>& v) const {
    for (const auto& x : reduce(v))
      if (x != 0) return false;
    return true;
  }

 private:
  std::size_t leading(const std::vector<BigInt>& v) const {
    for (std::size_t i = 0; i < dim_; ++i)
      if (v[i] != 0) return i;
    return dim_;
  }
  std::size_t pivot(const std::vector<BigInt>& row) const { return leading(row); }
  static void negate(std::vector<BigInt>& v) {
    for (auto& x : v) x = -x;
  }
  static BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
  }
  static std::tuple<BigInt, BigInt, BigInt> extended_gcd(BigInt a, BigInt b) {
    BigInt s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
      BigInt q = floor_div(a, b);
      BigInt r = a - q * b;
      a = b;
      b = r;
      BigInt s2 = s0 - q * s1, t2 = t0 - q * t1;
      s0 = s1;
      s1 = s2;
      t0 = t1;
      t1 = t2;
    }
    if (a < 0) return {-a, -s0, -t0};
    return {a, s0, t0};
  }

  std::size_t dim_;
  std::vector<std::vector<BigInt>> rows_;
};

namespace detail {

inline std::vector<BigInt> exponent_sums(const Word& w, std::size_t rank) {
  std::vector<BigInt> v(rank);
  for (auto l : w) v[l.generator()] += l.is_inverse() ? -1 : 1;
  return v;
}

inline void abelian_relations(const GroupSpec& spec, GeneratorIndex offset, std::size_t rank,
                              std::vector<std::vector<BigInt>>& out) {
  switch (spec.kind) {
    case GroupKind::free:
    case GroupKind::abelian:
      return;
    case GroupKind::cyclic_product:
      for (GeneratorIndex g = 0; g < spec.rank(); ++g) {
        if (spec.orders[g] == 0) continue;
        std::vector<BigInt> row(rank);
        row[g + offset] = BigInt(spec.orders[g]);
        out.push_back(std::move(row));
      }
      return;
    case GroupKind::direct_product: {
      GeneratorIndex start = offset;
      for (const auto& f : spec.factors) {
        abelian_relations(f, start, rank, out);
        start += static_cast<GeneratorIndex>(f.rank());
      }
      return;
    }
    case GroupKind::rewriting:
      for (const auto& rule : spec.rules) {
        std::vector<BigInt> row(rank);
        for (auto l : rule.lhs) row[l.generator() + offset] += l.is_inverse() ? -1 : 1;
        for (auto l : rule.rhs) row[l.generator() + offset] -= l.is_inverse() ? -1 : 1;
        out.push_back(std::move(row));
      }
      return;
  }
}

inline std::string encode(const std::vector<BigInt>& v) {
  std::string s;
  for (const auto& x : v) s += x.str() + ",";
  return s;
}

/// Folded Stallings graph of a finitely generated subgroup of a free group.
class StallingsGraph {
 public:
  StallingsGraph(const std::vector<Word>& generators) {
    struct Edge {
      std::uint32_t from, code, to;
    };
    std::vector<Edge> edges;
    std::uint32_t count = 1;
    for (const auto& raw : generators) {
      Word w = free_reduce(raw);
      if (w.empty()) continue;
      std::uint32_t at = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        std::uint32_t next = (i + 1 == w.size()) ? 0 : count++;
        edges.push_back({at, w[i].code, next});
        edges.push_back({next, w[i].inverse().code, at});
        at = next;
      }
    }
    std::vector<std::uint32_t> parent(count);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (bool changed = true; changed;) {
      changed = false;
      std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> seen;
      for (const auto& e : edges) {
        auto key = std::make_pair(find(e.from), e.code);
        auto to = find(e.to);
        auto [it, fresh] = seen.emplace(key, to);
        if (!fresh && find(it->second) != to) {
          std::uint32_t a = find(it->second), b = to;
          // keep the base vertex as a root
          if (b == 0) std::swap(a, b);
          parent[b] = a;
          changed = true;
        }
      }
    }
    std::map<std::uint32_t, std::uint32_t> relabel{{find(0), 0}};
    for (std::uint32_t v = 0; v < count; ++v) relabel.emplace(find(v), static_cast<std::uint32_t>(relabel.size()));
    out_.assign(relabel.size(), {});
    for (const auto& e : edges) out_[relabel[find(e.from)]][e.code] = relabel[find(e.to)];
  }

  /// Follows w from the base vertex as far as possible.
  std::pair<std::uint32_t, std::size_t> read(const Word& w) const {
    std::uint32_t at = 0;
    std::size_t i = 0;
    for (; i < w.size(); ++i) {
      auto it = out_[at].find(w[i].code);
      if (it == out_[at].end()) break;
      at = it->second;
    }
    return {at, i};
  }

  std::size_t size() const { return out_.size(); }

 private:
  std::vector<std::map<std::uint32_t, std::uint32_t>> out_;
};

}  // namespace detail

/// Decides g ∈ H for H = ⟨generators⟩ and, where possible, produces a canonical
/// key for the left coset gH.
///
/// Free groups use Stallings folding and abelian groups use a Hermite lattice;
/// both are exact. Other kinds search products of H's generators up to `bound`
/// factors and refute membership through the abelianization; anything else is
/// reported as SearchExhausted.
class SubgroupOracle {
 public:
  SubgroupOracle(std::shared_ptr<const Group> group, std::vector<Word> generators, std::size_t bound)
      : group_(std::move(group)), generators_(std::move(generators)), bound_(bound),
        ab_(group_->rank()) {
    const auto& spec = group_->spec();
    trivial_ = true;
    for (const auto& w : generators_)
      if (!group_->element(w).is_identity()) trivial_ = false;

    std::vector<std::vector<BigInt>> relations;
    detail::abelian_relations(spec, 0, group_->rank(), relations);
    for (auto& r : relations) ab_.add(r);
    for (const auto& w : generators_) ab_.add(detail::exponent_sums(w, group_->rank()));

    if (trivial_) {
      mode_ = Mode::trivial;
    } else if (spec.kind == GroupKind::free) {
      mode_ = Mode::free;
      stallings_ = std::make_unique<detail::StallingsGraph>(generators_);
    } else if (spec.kind == GroupKind::abelian) {
      mode_ = Mode::abelian;
    } else {
      mode_ = Mode::bounded;
      enumerate();
    }
  }

  bool exact() const { return mode_ != Mode::bounded || finite_; }

  bool contains(const Word& g) const {
    Element e = group_->element(g);
    switch (mode_) {
      case Mode::trivial:
        return e.is_identity();
      case Mode::free: {
        auto [end, read] = stallings_->read(e.word);
        return read == e.word.size() && end == 0;
      }
      case Mode::abelian:
        return ab_.contains(detail::exponent_sums(e.word, group_->rank()));
      case Mode::bounded:
        if (members_.count(e.word)) return true;
        if (finite_) return false;
        if (!ab_.contains(detail::exponent_sums(e.word, group_->rank()))) return false;
        throw SearchExhausted("membership of " + group_->format(e) + " undecided after products of " +
                              std::to_string(bound_) + " subgroup generators");
    }
    return false;
  }

  /// Canonical key of the coset gH when an exact key is available.
  std::optional<std::string> coset_key(const Word& g) const {
    switch (mode_) {
      case Mode::trivial:
        return key_of(group_->element(g).word);
      case Mode::free: {
        Word u = group_->element(inverse(g)).word;
        auto [end, read] = stallings_->read(u);
        return "v" + std::to_string(end) + ":" + key_of(Word(u.begin() + static_cast<std::ptrdiff_t>(read), u.end()));
      }
      case Mode::abelian:
        return detail::encode(ab_.reduce(detail::exponent_sums(group_->element(g).word, group_->rank())));
      case Mode::bounded:
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  enum class Mode { trivial, free, abelian, bounded };

  static std::string key_of(const Word& w) {
    std::string s;
    for (auto l : w) s += std::to_string(l.code) + ".";
    return s;
  }

  void enumerate() {
    std::vector<Word> steps;
    for (const auto& w : generators_) {
      steps.push_back(w);
      steps.push_back(inverse(w));
    }
    members_.insert(Word{});
    std::vector<Word> frontier{Word{}};
    std::size_t level = 0;
    for (; level < bound_ && !frontier.empty(); ++level) {
      std::vector<Word> next;
      for (const auto& h : frontier)
        for (const auto& s : steps) {
          Word x = group_->element(concat(h, s)).word;
          if (members_.insert(x).second) {
            if (members_.size() > default_max_cells())
              throw ResourceLimit("subgroup enumeration exceeds cell cap");
            next.push_back(std::move(x));
          }
        }
      frontier = std::move(next);
    }
    finite_ = frontier.empty();
  }

  std::shared_ptr<const Group> group_;
  std::vector<Word> generators_;
  std::size_t bound_;
  Mode mode_ = Mode::bounded;
  bool trivial_ = false;
  bool finite_ = false;
  IntegerLattice ab_;
  std::unique_ptr<detail::StallingsGraph> stallings_;
  std::unordered_set<Word, WordHash> members_;
};

}  // namespace relcert
