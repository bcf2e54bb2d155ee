#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace relcert {

using GeneratorIndex = std::uint32_t;

/// A generator or its inverse. Codes order letters a < a^-1 < b < b^-1 < ...,
/// which is the letter order behind every shortlex comparison in the library.
struct Letter {
  std::uint32_t code = 0;

  static constexpr Letter positive(GeneratorIndex g) { return Letter{2 * g}; }
  static constexpr Letter negative(GeneratorIndex g) { return Letter{2 * g + 1}; }
  static constexpr Letter of(GeneratorIndex g, bool inverse) {
    return inverse ? negative(g) : positive(g);
  }

  constexpr GeneratorIndex generator() const { return code >> 1; }
  constexpr bool is_inverse() const { return (code & 1u) != 0; }
  constexpr Letter inverse() const { return Letter{code ^ 1u}; }

  friend constexpr auto operator<=>(Letter, Letter) = default;
};

using Word = std::vector<Letter>;

inline bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct ShortlexLess {
  bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto l : w) {
      h ^= l.code + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline Word inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Cancels adjacent inverse pairs.
inline Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto l : w) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

}  // namespace relcert
