#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "relcert/error.hpp"

namespace relcert {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Canonical "p/q" form, always with an explicit denominator.
inline std::string to_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

/// Accepts "p/q", "p", and finite decimals such as "0.6" or "-1.25".
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return FormatError("invalid rational '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  auto digits_only = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!digits_only(num, true) || !digits_only(den, false)) throw fail();
    BigInt d{std::string(den)};
    if (d == 0) throw fail();
    std::string n(num);
    if (n[0] == '+') n.erase(0, 1);
    return Rational(BigInt(n), d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot), frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
    if ((!whole.empty() && !digits_only(whole, false)) || !digits_only(frac, false)) throw fail();
    std::string all = std::string(whole.empty() ? "0" : whole) + std::string(frac);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational r(BigInt(all), scale);
    return negative ? Rational(-r) : r;
  }
  if (!digits_only(text, true)) throw fail();
  std::string n(text);
  if (n[0] == '+') n.erase(0, 1);
  return Rational(BigInt(n));
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace relcert
