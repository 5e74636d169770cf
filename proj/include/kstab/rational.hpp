/**
 * Exact scalars for the kstab library.
 *
 * Rat is a GMP rational that is always kept in lowest terms with a positive
 * denominator. Int is the matching arbitrary-precision integer.
 */
#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kstab {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using Vec = std::vector<Rat>;
using IntVec = std::vector<Int>;

/// Thrown for malformed text input (exit code 4 in the CLI).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an input violates a geometric or algebraic precondition (exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a computation would exceed its enumeration budget (exit code 3).
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Int numer(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int denom(const Rat& q) { return boost::multiprecision::denominator(q); }

inline Int gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }
inline Int lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / gcd(a, b) * b);
}

inline int sign(const Rat& q) { return q.sign(); }
inline Rat abs(const Rat& q) { return q.sign() < 0 ? Rat(-q) : q; }

inline Int floor_div(const Rat& q) {
  Int n = numer(q), d = denom(q);
  Int f = n / d;  // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

inline Int ceil_div(const Rat& q) { return -floor_div(-q); }

inline bool is_integer(const Rat& q) { return denom(q) == 1; }

/// "p/q", or "p" when q = 1.
inline std::string to_string(const Rat& q) {
  if (denom(q) == 1) return numer(q).str();
  return numer(q).str() + "/" + denom(q).str();
}

inline std::string to_string(const Int& z) { return z.str(); }

/// Parses "p", "-p", "p/q". Rejects zero denominators and stray characters.
inline Rat parse_rat(std::string_view text) {
  auto digits_ok = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  if (!digits_ok(num, true)) throw ParseError("malformed rational '" + std::string(text) + "'");
  std::string ns(num);
  if (ns[0] == '+') ns.erase(0, 1);
  Int n(ns);
  if (slash == std::string_view::npos) return Rat(n);
  std::string_view den = text.substr(slash + 1);
  if (!digits_ok(den, false)) throw ParseError("malformed rational '" + std::string(text) + "'");
  Int d{std::string(den)};
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rat(n, d);
}

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

/// Least common multiple of the denominators of a range of rationals.
template <typename Range>
Int denominator_lcm(const Range& values) {
  Int l = 1;
  for (const Rat& v : values) l = lcm(l, denom(v));
  return l;
}

inline Rat dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(const Rat& s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline Vec to_vec(const IntVec& v) {
  Vec r;
  r.reserve(v.size());
  for (const Int& z : v) r.emplace_back(z);
  return r;
}

/// Scales a rational vector to the primitive integer vector with the same direction.
inline IntVec primitive(const Vec& v) {
  Int l = denominator_lcm(v);
  IntVec r(v.size());
  Int g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    r[i] = numer(v[i] * l);
    g = gcd(g, r[i]);
  }
  if (g == 0) throw std::invalid_argument("primitive: zero vector");
  for (Int& z : r) z /= g;
  return r;
}

inline bool is_lattice_point(const Vec& v) {
  for (const Rat& q : v)
    if (!is_integer(q)) return false;
  return true;
}

inline std::string to_string(const Vec& v, std::string_view sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += to_string(v[i]);
  }
  return s;
}

inline std::string to_string(const IntVec& v, std::string_view sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i].str();
  }
  return s;
}

}  // namespace kstab
