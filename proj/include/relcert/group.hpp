#pragma once

#include <cctype>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "relcert/error.hpp"
#include "relcert/limits.hpp"
#include "relcert/word.hpp"

namespace relcert {

enum class GroupKind { free, abelian, cyclic_product, direct_product, rewriting };

struct Generator {
  std::string symbol;
  GeneratorIndex index = 0;
};

struct RewriteRule {
  Word lhs;
  Word rhs;
};

/// A finitely generated group with a cheap canonical normal form.
///
/// Generator indices are global: for a direct product the factors' generators
/// are numbered consecutively in factor order, and `factors[i]` keeps its own
/// local numbering starting at 0.
struct GroupSpec {
  GroupKind kind = GroupKind::free;
  std::vector<Generator> generators;
  std::vector<std::uint64_t> orders;  // cyclic_product: order per generator, 0 = infinite
  std::vector<GroupSpec> factors;     // direct_product
  std::vector<RewriteRule> rules;     // rewriting
  bool confluent = false;             // rewriting: user-declared confluence
  bool default_names = false;         // abelian / cyclic_product written by count

  std::size_t rank() const { return generators.size(); }
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::string format_word(const Word& w, const std::vector<Generator>& gens) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long long exponent = static_cast<long long>(j - i);
    if (!out.empty()) out += ' ';
    out += gens.at(w[i].generator()).symbol;
    if (w[i].is_inverse())
      out += "^-" + std::to_string(exponent);
    else if (exponent != 1)
      out += "^" + std::to_string(exponent);
    i = j;
  }
  return out;
}

/// Reads a word starting at `pos`, stopping at the first character that cannot
/// continue a word. Symbols are matched longest-first.
inline Word read_word(std::string_view text, std::size_t& pos, const std::vector<Generator>& gens,
                      std::size_t base_offset) {
  Word out;
  auto skip = [&] {
    while (pos < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '*' || text[pos] == '.'))
      ++pos;
  };
  skip();
  while (pos < text.size()) {
    char c = text[pos];
    if (c == '1' && (pos + 1 == text.size() || !ident_char(text[pos + 1]))) {
      ++pos;
      skip();
      continue;
    }
    if (!ident_start(c)) break;
    std::size_t best_len = 0;
    GeneratorIndex best = 0;
    for (const auto& g : gens) {
      if (g.symbol.size() > best_len && text.substr(pos, g.symbol.size()) == g.symbol) {
        best_len = g.symbol.size();
        best = g.index;
      }
    }
    if (best_len == 0) throw SyntaxError("unknown generator", base_offset + pos);
    pos += best_len;
    long long exponent = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      bool negative = false;
      if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
      }
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) throw SyntaxError("expected exponent", base_offset + pos);
      if (pos - start > 9) throw SyntaxError("exponent too large", base_offset + start);
      exponent = std::stoll(std::string(text.substr(start, pos - start)));
      if (negative) exponent = -exponent;
    }
    Letter l = Letter::of(best, exponent < 0);
    for (long long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) out.push_back(l);
    skip();
  }
  return out;
}

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  GroupSpec parse() {
    GroupSpec spec = parse_spec();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
    return spec;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  std::string keyword() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (ident_char(text_[pos_]) || text_[pos_] == '-')) ++pos_;
    if (start == pos_) throw SyntaxError("expected group kind", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }
  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) throw SyntaxError("expected identifier", pos_);
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  std::uint64_t integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError("expected integer", pos_);
    if (pos_ - start > 18) throw SyntaxError("integer too large", start);
    return std::stoull(std::string(text_.substr(start, pos_ - start)));
  }
  bool at_digit() {
    skip_ws();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  static void add_generator(GroupSpec& spec, std::string symbol, std::size_t offset) {
    if (symbol == "e")
      throw SpecError("generator symbol 'e' is reserved (offset " + std::to_string(offset) + ")");
    for (const auto& g : spec.generators)
      if (g.symbol == symbol) throw SpecError("duplicate generator symbol '" + symbol + "'");
    spec.generators.push_back({std::move(symbol), static_cast<GeneratorIndex>(spec.generators.size())});
  }

  std::vector<std::pair<std::string, std::size_t>> identifier_list() {
    std::vector<std::pair<std::string, std::size_t>> ids;
    do {
      skip_ws();
      std::size_t at = pos_;
      ids.emplace_back(identifier(), at);
    } while (peek(',') && (++pos_, true));
    return ids;
  }

  GroupSpec parse_spec() {
    skip_ws();
    std::size_t kind_at = pos_;
    std::string kind = keyword();
    GroupSpec spec;
    if (kind == "free") {
      spec.kind = GroupKind::free;
      expect('(');
      for (auto& [id, at] : identifier_list()) add_generator(spec, id, at);
      expect(')');
    } else if (kind == "abelian") {
      spec.kind = GroupKind::abelian;
      expect('(');
      if (at_digit()) {
        std::size_t at = pos_;
        auto n = integer();
        if (n == 0) throw SpecError("abelian rank must be >= 1 (offset " + std::to_string(at) + ")");
        for (std::uint64_t i = 1; i <= n; ++i) add_generator(spec, "x" + std::to_string(i), at);
        spec.default_names = true;
      } else {
        for (auto& [id, at] : identifier_list()) add_generator(spec, id, at);
      }
      expect(')');
    } else if (kind == "cyclic-product") {
      spec.kind = GroupKind::cyclic_product;
      expect('(');
      bool named = !at_digit();
      std::size_t i = 0;
      do {
        ++i;
        skip_ws();
        std::size_t at = pos_;
        if (named) {
          auto id = identifier();
          expect(':');
          add_generator(spec, id, at);
        } else {
          add_generator(spec, "x" + std::to_string(i), at);
        }
        spec.orders.push_back(integer());
      } while (peek(',') && (++pos_, true));
      spec.default_names = !named;
      expect(')');
    } else if (kind == "product") {
      spec.kind = GroupKind::direct_product;
      expect('(');
      do {
        spec.factors.push_back(parse_spec());
      } while (peek(';') && (++pos_, true));
      expect(')');
      if (spec.factors.size() < 2) throw SyntaxError("product needs at least two factors", pos_);
      for (const auto& f : spec.factors)
        for (const auto& g : f.generators) add_generator(spec, g.symbol, kind_at);
    } else if (kind == "rewriting") {
      spec.kind = GroupKind::rewriting;
      expect('(');
      for (auto& [id, at] : identifier_list()) add_generator(spec, id, at);
      expect('|');
      skip_ws();
      if (!peek(')')) {
        do {
          skip_ws();
          std::size_t at = pos_;
          Word lhs = read_word(text_, pos_, spec.generators, 0);
          skip_ws();
          if (text_.substr(pos_, 2) != "->") throw SyntaxError("expected '->'", pos_);
          pos_ += 2;
          Word rhs = read_word(text_, pos_, spec.generators, 0);
          lhs = free_reduce(lhs);
          rhs = free_reduce(rhs);
          if (lhs.empty()) throw SpecError("rewriting rule at offset " + std::to_string(at) + " has trivial left side");
          spec.rules.push_back({std::move(lhs), std::move(rhs)});
        } while (peek(',') && (++pos_, true));
      }
      expect(')');
      skip_ws();
      if (text_.substr(pos_).starts_with("confluent")) {
        pos_ += 9;
        spec.confluent = true;
      }
      for (std::size_t r = 0; r < spec.rules.size(); ++r) {
        const auto& rule = spec.rules[r];
        if (rule.lhs.size() > rule.rhs.size()) continue;
        if (!spec.confluent)
          throw SpecError("rewriting rule " + std::to_string(r + 1) +
                          " is not length-reducing and the system is not declared confluent");
        if (!shortlex_less(rule.rhs, rule.lhs))
          throw SpecError("rewriting rule " + std::to_string(r + 1) + " is not shortlex-reducing");
      }
    } else {
      throw SpecError("unsupported group kind '" + kind + "' (offset " + std::to_string(kind_at) + ")");
    }
    if (spec.rank() == 0) throw SpecError("group rank must be >= 1");
    return spec;
  }
};

}  // namespace detail

/// Parses the group grammar: `free(a,b)`, `abelian(2)`, `abelian(u,v)`,
/// `cyclic-product(2,0)`, `cyclic-product(a:2,b:3)`, `product(spec;spec)`,
/// `rewriting(a,b | b a->a b, ...) confluent`.
inline GroupSpec parse_group_spec(std::string_view text) { return detail::SpecParser(text).parse(); }

/// Canonical text; parse_group_spec(to_text(s)) reproduces s.
inline std::string to_text(const GroupSpec& spec) {
  std::string out;
  auto symbols = [&] {
    std::string s;
    for (const auto& g : spec.generators) s += (s.empty() ? "" : ",") + g.symbol;
    return s;
  };
  switch (spec.kind) {
    case GroupKind::free:
      return "free(" + symbols() + ")";
    case GroupKind::abelian:
      return spec.default_names ? "abelian(" + std::to_string(spec.rank()) + ")" : "abelian(" + symbols() + ")";
    case GroupKind::cyclic_product:
      out = "cyclic-product(";
      for (std::size_t i = 0; i < spec.rank(); ++i) {
        if (i) out += ",";
        if (!spec.default_names) out += spec.generators[i].symbol + ":";
        out += std::to_string(spec.orders[i]);
      }
      return out + ")";
    case GroupKind::direct_product:
      out = "product(";
      for (std::size_t i = 0; i < spec.factors.size(); ++i) out += (i ? ";" : "") + to_text(spec.factors[i]);
      return out + ")";
    case GroupKind::rewriting:
      out = "rewriting(" + symbols() + " |";
      for (std::size_t i = 0; i < spec.rules.size(); ++i) {
        out += (i ? ", " : " ") + detail::format_word(spec.rules[i].lhs, spec.generators) + "->" +
               detail::format_word(spec.rules[i].rhs, spec.generators);
      }
      out += ")";
      if (spec.confluent) out += " confluent";
      return out;
  }
  return out;
}

/// A group element in canonical form. `length()` is the word length ℓ_G.
struct Element {
  Word word;
  std::uint64_t group = 0;

  std::size_t length() const { return word.size(); }
  bool is_identity() const { return word.empty(); }

  friend bool operator==(const Element& a, const Element& b) { return a.group == b.group && a.word == b.word; }
  friend bool operator<(const Element& a, const Element& b) { return shortlex_less(a.word, b.word); }
};

namespace detail {

inline void reduce_into(const GroupSpec& spec, GeneratorIndex offset, const Word& input, Word& out);

inline Word reduce_cyclic(const GroupSpec& spec, GeneratorIndex offset, const Word& input) {
  struct Syllable {
    GeneratorIndex gen;
    long long exponent;
  };
  std::vector<Syllable> stack;
  auto canonical = [](long long e, std::uint64_t order) {
    if (order == 0) return e;
    long long n = static_cast<long long>(order);
    e %= n;
    if (e < 0) e += n;
    if (2 * e > n) e -= n;
    return e;
  };
  for (auto l : input) {
    GeneratorIndex g = l.generator() - offset;
    long long step = l.is_inverse() ? -1 : 1;
    if (!stack.empty() && stack.back().gen == g) {
      stack.back().exponent = canonical(stack.back().exponent + step, spec.orders[g]);
      if (stack.back().exponent == 0) stack.pop_back();
    } else {
      long long e = canonical(step, spec.orders[g]);
      if (e != 0) stack.push_back({g, e});
    }
  }
  Word out;
  for (const auto& s : stack) {
    Letter l = Letter::of(s.gen + offset, s.exponent < 0);
    for (long long k = 0; k < (s.exponent < 0 ? -s.exponent : s.exponent); ++k) out.push_back(l);
  }
  return out;
}

inline Word reduce_rewriting(const GroupSpec& spec, GeneratorIndex offset, const Word& input) {
  auto shift = [&](Letter l) { return Letter{l.code + 2 * offset}; };
  Word stack;
  std::vector<Letter> pending(input.rbegin(), input.rend());
  while (!pending.empty()) {
    Letter l = pending.back();
    pending.pop_back();
    if (!stack.empty() && stack.back() == l.inverse()) {
      stack.pop_back();
      continue;
    }
    stack.push_back(l);
    for (const auto& rule : spec.rules) {
      const auto& lhs = rule.lhs;
      if (lhs.size() > stack.size()) continue;
      bool match = true;
      for (std::size_t i = 0; i < lhs.size() && match; ++i)
        match = stack[stack.size() - lhs.size() + i] == shift(lhs[i]);
      if (!match) continue;
      stack.resize(stack.size() - lhs.size());
      for (auto it = rule.rhs.rbegin(); it != rule.rhs.rend(); ++it) pending.push_back(shift(*it));
      break;
    }
  }
  return stack;
}

inline void reduce_into(const GroupSpec& spec, GeneratorIndex offset, const Word& input, Word& out) {
  switch (spec.kind) {
    case GroupKind::free: {
      Word r = free_reduce(input);
      out.insert(out.end(), r.begin(), r.end());
      return;
    }
    case GroupKind::abelian: {
      std::vector<long long> e(spec.rank(), 0);
      for (auto l : input) e[l.generator() - offset] += l.is_inverse() ? -1 : 1;
      for (GeneratorIndex g = 0; g < spec.rank(); ++g) {
        Letter l = Letter::of(g + offset, e[g] < 0);
        for (long long k = 0; k < (e[g] < 0 ? -e[g] : e[g]); ++k) out.push_back(l);
      }
      return;
    }
    case GroupKind::cyclic_product: {
      Word r = reduce_cyclic(spec, offset, input);
      out.insert(out.end(), r.begin(), r.end());
      return;
    }
    case GroupKind::direct_product: {
      GeneratorIndex start = offset;
      for (const auto& f : spec.factors) {
        GeneratorIndex end = start + static_cast<GeneratorIndex>(f.rank());
        Word part;
        for (auto l : input)
          if (l.generator() >= start && l.generator() < end) part.push_back(l);
        reduce_into(f, start, part, out);
        start = end;
      }
      return;
    }
    case GroupKind::rewriting: {
      Word r = reduce_rewriting(spec, offset, input);
      out.insert(out.end(), r.begin(), r.end());
      return;
    }
  }
}

}  // namespace detail

/// Normal-form engine over an immutable GroupSpec.
class Group {
 public:
  explicit Group(GroupSpec spec) : spec_(std::move(spec)), text_(to_text(spec_)) {
    id_ = std::hash<std::string>{}(text_) | 1u;
  }

  static std::shared_ptr<const Group> parse(std::string_view text) {
    return std::make_shared<const Group>(parse_group_spec(text));
  }

  const GroupSpec& spec() const { return spec_; }
  const std::string& text() const { return text_; }
  std::uint64_t id() const { return id_; }
  std::size_t rank() const { return spec_.rank(); }
  const std::vector<Generator>& generators() const { return spec_.generators; }

  void check(const Word& w) const {
    for (auto l : w)
      if (l.generator() >= rank()) throw SpecError("word references an unknown generator");
  }

  Element identity() const { return Element{{}, id_}; }

  Element element(const Word& w) const {
    check(w);
    Element e{{}, id_};
    detail::reduce_into(spec_, 0, w, e.word);
    return e;
  }
  Element element(std::string_view text) const { return element(parse_word(text)); }

  Element generator(GeneratorIndex g, bool inverse = false) const {
    return element(Word{Letter::of(g, inverse)});
  }

  Element multiply(const Element& a, const Element& b) const {
    same(a);
    same(b);
    return element(concat(a.word, b.word));
  }
  Element inverse(const Element& a) const {
    same(a);
    return element(relcert::inverse(a.word));
  }

  /// d(g,h) = ℓ(g⁻¹h).
  std::size_t distance(const Element& g, const Element& h) const {
    same(g);
    same(h);
    return element(concat(relcert::inverse(g.word), h.word)).length();
  }

  /// All elements of length <= radius in shortlex order.
  std::vector<Element> ball(std::size_t radius, std::size_t cap = default_max_cells()) const {
    std::unordered_set<Word, WordHash> seen{Word{}};
    std::vector<Word> frontier{Word{}};
    for (std::size_t r = 0; r < radius && !frontier.empty(); ++r) {
      std::vector<Word> next;
      for (const auto& w : frontier) {
        for (std::uint32_t code = 0; code < 2 * rank(); ++code) {
          Word x = element(concat(w, Word{Letter{code}})).word;
          if (seen.insert(x).second) {
            if (seen.size() > cap)
              throw ResourceLimit("ball of radius " + std::to_string(radius) + " exceeds cap of " +
                                  std::to_string(cap) + " elements");
            next.push_back(std::move(x));
          }
        }
      }
      frontier = std::move(next);
    }
    std::vector<Element> out;
    out.reserve(seen.size());
    for (auto& w : seen) out.push_back(Element{w, id_});
    std::sort(out.begin(), out.end());
    return out;
  }

  Word parse_word(std::string_view text) const {
    std::size_t pos = 0;
    Word w = detail::read_word(text, pos, spec_.generators, 0);
    if (pos != text.size()) throw SyntaxError("unexpected character in word", pos);
    return w;
  }

  std::string format(const Word& w) const { return detail::format_word(w, spec_.generators); }
  std::string format(const Element& e) const { return format(e.word); }

 private:
  void same(const Element& e) const {
    if (e.group != id_) throw SpecError("element belongs to a different group");
  }

  GroupSpec spec_;
  std::string text_;
  std::uint64_t id_ = 0;
};

inline Element normal_form(const Word& w, const Group& g) { return g.element(w); }

}  // namespace relcert
