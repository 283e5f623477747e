#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "errors.hpp"

namespace xclab {

// gmpxx keeps every arithmetic result in lowest terms with a positive
// denominator, so equality on Rational is structural.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw InputError("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(const Integer& num, const Integer& den = 1) {
  if (den == 0) throw InputError("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "p/q" or "p" (optional leading sign). Rejects anything else.
inline Rational parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false))
    throw InputError("malformed rational '" + std::string(text) + "'");
  std::string n(num);
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  Integer p(n, 10), q(std::string(den), 10);
  if (q == 0) throw InputError("rational with zero denominator '" + std::string(text) + "'");
  return make_rational(p, q);
}

inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Smallest integer >= r.
inline Integer ceil(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

/// Largest integer <= r.
inline Integer floor(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

}  // namespace xclab
