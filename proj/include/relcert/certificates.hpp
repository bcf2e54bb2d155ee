#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "relcert/coset_space.hpp"
#include "relcert/rational.hpp"

namespace relcert {

/// Where supports are measured from.
///
/// reiter: f(x) is supported near x, i.e. ρ(x,k) < S, and the variation compares
/// f(x) with f(y) for nearby x, y.
/// identity: μ(g) is supported near the representatives, i.e. ρ(e,k) < S, and the
/// variation compares g·μ(w) with μ(gw).
enum class Convention { reiter, identity };

inline std::string to_string(Convention c) { return c == Convention::reiter ? "reiter-centered" : "identity-centered"; }

inline Convention parse_convention(std::string_view s) {
  if (s == "reiter-centered" || s == "reiter") return Convention::reiter;
  if (s == "identity-centered" || s == "identity") return Convention::identity;
  throw FormatError("unknown convention '" + std::string(s) + "'");
}

struct CertParams {
  std::size_t R = 1;  // pairs at distance 1..R are compared
  Rational epsilon = 0;
  std::size_t S = 1;
  std::size_t window = 1;  // x ranges over ball(window)

  void validate() const {
    if (epsilon < 0) throw SpecError("epsilon must be nonnegative");
    if (window < R) throw SpecError("window must be >= R");
  }
};

using Cell = std::pair<VertexId, std::uint32_t>;  // (k, j) in K × ℕ
using CellSet = std::set<Cell>;
using Counts = std::map<VertexId, std::uint64_t>;
using Measure = std::map<VertexId, Rational>;

template <class T>
using Entries = std::map<Word, T, ShortlexLess>;

struct SetFamilyCertificate {
  Convention convention = Convention::reiter;
  Entries<CellSet> entries;
};

struct IntegerCertificate {
  Convention convention = Convention::reiter;
  Entries<Counts> entries;
};

struct ProbCertificate {
  Convention convention = Convention::reiter;
  Entries<Measure> entries;
};

using AnyCertificate = std::variant<SetFamilyCertificate, IntegerCertificate, ProbCertificate>;

inline std::string form_name(const SetFamilyCertificate&) { return "sets"; }
inline std::string form_name(const IntegerCertificate&) { return "integer"; }
inline std::string form_name(const ProbCertificate&) { return "prob"; }
inline std::string form_name(const AnyCertificate& c) {
  return std::visit([](const auto& x) { return form_name(x); }, c);
}

// ---- validation ------------------------------------------------------------

/// Nonempty and normalized: indices per vertex form {1..m}.
inline void validate(const SetFamilyCertificate& c) {
  for (const auto& [x, a] : c.entries) {
    if (a.empty()) throw FormatError("empty set A_x");
    std::map<VertexId, std::uint32_t> expect;
    for (const auto& [k, j] : a)
      if (j != ++expect[k]) throw FormatError("multiplicity indices are not an initial segment");
  }
}

inline void validate(const IntegerCertificate& c) {
  for (const auto& [x, xi] : c.entries) {
    std::uint64_t mass = 0;
    for (const auto& [k, n] : xi) mass += n;
    if (mass == 0) throw FormatError("integer function with zero mass");
  }
}

inline void validate(const ProbCertificate& c) {
  for (const auto& [x, f] : c.entries) {
    Rational total = 0;
    for (const auto& [k, p] : f) {
      if (p < 0) throw FormatError("negative probability");
      total += p;
    }
    if (total != 1) throw FormatError("probability masses sum to " + to_string(total) + ", not 1");
  }
}

// ---- conversions -----------------------------------------------------------

inline IntegerCertificate sets_to_integer(const SetFamilyCertificate& c) {
  IntegerCertificate out{c.convention, {}};
  for (const auto& [x, a] : c.entries) {
    auto& xi = out.entries[x];
    for (const auto& cell : a) ++xi[cell.first];
  }
  return out;
}

inline SetFamilyCertificate integer_to_sets(const IntegerCertificate& c) {
  SetFamilyCertificate out{c.convention, {}};
  for (const auto& [x, xi] : c.entries) {
    auto& a = out.entries[x];
    for (const auto& [k, n] : xi)
      for (std::uint32_t j = 1; j <= n; ++j) a.emplace(k, j);
  }
  return out;
}

inline Measure normalize(const Counts& xi) {
  std::uint64_t mass = 0;
  for (const auto& [k, n] : xi) mass += n;
  if (mass == 0) throw SpecError("cannot normalize a zero-mass function");
  Measure f;
  for (const auto& [k, n] : xi)
    if (n) f[k] = Rational(n, mass);
  return f;
}

inline ProbCertificate integer_to_prob(const IntegerCertificate& c) {
  ProbCertificate out{c.convention, {}};
  for (const auto& [x, xi] : c.entries) out.entries[x] = normalize(xi);
  return out;
}

/// Largest-remainder rounding of M·f to integers summing to M. Ties go to the
/// smaller vertex id, which is the shortlex vertex order.
inline Counts round_to_integer(const Measure& f, std::uint64_t M) {
  if (M < 1) throw SpecError("M must be >= 1");
  Counts xi;
  std::vector<std::pair<Rational, VertexId>> remainders;
  std::uint64_t assigned = 0;
  for (const auto& [k, p] : f) {
    Rational scaled = p * M;
    BigInt whole = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    auto n = whole.convert_to<std::uint64_t>();
    xi[k] = n;
    assigned += n;
    remainders.emplace_back(scaled - Rational(whole), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < M && i < remainders.size(); ++i, ++assigned) ++xi[remainders[i].second];
  for (auto it = xi.begin(); it != xi.end();) it = it->second == 0 ? xi.erase(it) : std::next(it);
  return xi;
}

inline IntegerCertificate prob_to_integer(const ProbCertificate& c, std::uint64_t M) {
  IntegerCertificate out{c.convention, {}};
  for (const auto& [x, f] : c.entries) out.entries[x] = round_to_integer(f, M);
  return out;
}

// ---- norms -----------------------------------------------------------------

inline Rational l1_distance(const Measure& a, const Measure& b) {
  Rational d = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      d += abs(i->second);
      ++i;
    } else if (i == a.end() || j->first < i->first) {
      d += abs(j->second);
      ++j;
    } else {
      d += abs(i->second - j->second);
      ++i;
      ++j;
    }
  }
  return d;
}

inline std::uint64_t l1_distance(const Counts& a, const Counts& b) {
  std::uint64_t d = 0;
  std::map<VertexId, std::pair<std::uint64_t, std::uint64_t>> both;
  for (const auto& [k, n] : a) both[k].first = n;
  for (const auto& [k, n] : b) both[k].second = n;
  for (const auto& [k, p] : both) d += p.first > p.second ? p.first - p.second : p.second - p.first;
  return d;
}

inline std::uint64_t mass(const Counts& xi) {
  std::uint64_t m = 0;
  for (const auto& [k, n] : xi) m += n;
  return m;
}

inline std::size_t symmetric_difference_size(const CellSet& a, const CellSet& b) {
  std::vector<Cell> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

/// g·μ, pushing each point through the action.
template <class T>
std::map<VertexId, T> translate(const CosetSpace& cs, const Element& g, const std::map<VertexId, T>& mu) {
  std::map<VertexId, T> out;
  for (const auto& [k, p] : mu) out[cs.act(g, k)] += p;
  return out;
}

// ---- verification ----------------------------------------------------------

struct SupportWitness {
  Word x;
  VertexId k = 0;
  std::size_t rho = 0;
};

/// An ordered pair that realises the achieved variation. For the identity
/// convention x = w, y = g·w and g is recorded.
struct PairWitness {
  Word x;
  Word y;
  Word g;
  Rational value = 0;
};

struct VerificationReport {
  CertParams params;
  Convention convention = Convention::reiter;
  std::string form;
  bool support_ok = true;
  std::optional<SupportWitness> support_witness;  // largest ρ over the support
  bool variation_ok = true;
  std::optional<PairWitness> variation_witness;
  Rational achieved_variation = 0;
  std::size_t pairs_checked = 0;

  bool passed() const { return support_ok && variation_ok; }
};

/// One compared pair with its exact variation.
struct PairVariation {
  Word x, y, g;
  Rational value;
};

namespace detail {

template <class T>
const T& entry_at(const Entries<T>& entries, const Element& x, const Group& g) {
  auto it = entries.find(x.word);
  if (it == entries.end()) throw OutOfWindow("certificate has no entry for " + g.format(x));
  return it->second;
}

inline Measure as_measure(const Counts& xi) {
  Measure m;
  for (const auto& [k, n] : xi) m[k] = Rational(n);
  return m;
}

inline Counts as_counts(const CellSet& a) {
  Counts xi;
  for (const auto& c : a) ++xi[c.first];
  return xi;
}

/// Per-form pieces used by the generic pair loop: the value compared per point
/// (always a Measure here, rescaled by the form's denominator) and its support.
struct Normalized {
  Measure values;
  Rational scale = 1;  // the ratio is ‖·‖₁ / scale
};

inline Normalized normalized(const Measure& f) { return {f, 1}; }
inline Normalized normalized(const Counts& xi) { return {as_measure(xi), Rational(mass(xi))}; }
inline Normalized normalized(const CellSet& a) {
  auto xi = as_counts(a);
  return {as_measure(xi), Rational(mass(xi))};
}

template <class T>
std::vector<PairVariation> pair_variations(const Entries<T>& entries, Convention convention, const CosetSpace& cs,
                                           std::size_t R, std::size_t window) {
  const auto& group = cs.group();
  auto xs = group.ball(window);
  auto gs = group.ball(R);
  std::set<Word, ShortlexLess> in_window;
  for (const auto& x : xs) in_window.insert(x.word);
  std::vector<PairVariation> out;
  for (const auto& x : xs) {
    auto nx = normalized(entry_at(entries, x, group));
    if (nx.scale == 0) throw FormatError("zero-mass entry");
    for (const auto& g : gs) {
      if (g.is_identity()) continue;
      if (convention == Convention::reiter) {
        auto y = group.multiply(x, g);
        if (!in_window.count(y.word)) continue;
        auto ny = normalized(entry_at(entries, y, group));
        out.push_back({x.word, y.word, g.word, l1_distance(nx.values, ny.values) / nx.scale});
      } else {
        auto y = group.multiply(g, x);
        if (!in_window.count(y.word)) continue;
        auto ny = normalized(entry_at(entries, y, group));
        auto moved = translate(cs, g, nx.values);
        out.push_back({x.word, y.word, g.word, l1_distance(moved, ny.values) / nx.scale});
      }
    }
  }
  return out;
}

template <class T>
VerificationReport verify_entries(const Entries<T>& entries, Convention convention, std::string form,
                                  const CosetSpace& cs, const CertParams& p) {
  p.validate();
  VerificationReport rep;
  rep.params = p;
  rep.convention = convention;
  rep.form = std::move(form);
  const auto& group = cs.group();
  for (const auto& x : group.ball(p.window)) {
    const auto& e = entry_at(entries, x, group);
    for (const auto& [k, value] : normalized(e).values) {
      if (k >= cs.size()) throw OutOfWindow("support vertex " + std::to_string(k) + " is not in the coset space");
      std::size_t r = convention == Convention::reiter ? cs.rho(x, k) : cs.vertex(k).key.size();
      if (!rep.support_witness || r > rep.support_witness->rho) rep.support_witness = SupportWitness{x.word, k, r};
      if (r >= p.S) rep.support_ok = false;
    }
  }
  auto pairs = pair_variations(entries, convention, cs, p.R, p.window);
  rep.pairs_checked = pairs.size();
  for (auto& pv : pairs) {
    if (!rep.variation_witness || pv.value > rep.achieved_variation) {
      rep.achieved_variation = pv.value;
      rep.variation_witness = PairWitness{pv.x, pv.y, pv.g, pv.value};
    }
  }
  rep.variation_ok = rep.achieved_variation < p.epsilon;
  return rep;
}

}  // namespace detail

/// Checks the support and variation conditions over ball(window).
///
/// Set and integer forms use the ratio ‖ξ_x − ξ_y‖₁ / ‖ξ_x‖₁ on ordered pairs; the
/// probability form uses ‖f(x) − f(y)‖₁. Both conditions are strict.
/// If `expected` is given and differs from the certificate's convention, throws
/// SpecError.
inline VerificationReport verify(const AnyCertificate& cert, const CosetSpace& cs, const CertParams& p,
                                 std::optional<Convention> expected = std::nullopt) {
  return std::visit(
      [&](const auto& c) {
        if (expected && *expected != c.convention)
          throw SpecError("convention mismatch: certificate is " + to_string(c.convention) + ", expected " +
                          to_string(*expected));
        validate(c);
        return detail::verify_entries(c.entries, c.convention, form_name(c), cs, p);
      },
      cert);
}

template <class C>
std::vector<PairVariation> pair_variations(const C& cert, const CosetSpace& cs, std::size_t R, std::size_t window) {
  return detail::pair_variations(cert.entries, cert.convention, cs, R, window);
}

}  // namespace relcert
