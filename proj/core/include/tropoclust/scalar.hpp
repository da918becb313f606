#pragma once

// Numeric field abstraction: computations run either over exact rationals
// (GMP-backed, decidable equality) or over binary64 with tolerance-based
// comparisons. The mode is a template parameter fixed per computation.

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tropo {

using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

// Raised on malformed inputs: bad LP shapes, Newick syntax errors,
// non-ultrametric vectors, inconsistent CLI flags, ...
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rat> = true;

template <class S>
inline double to_double(const S& x) {
  if constexpr (is_exact_v<S>) {
    return static_cast<double>(x);
  } else {
    return x;
  }
}

// Absolute-tolerance equality; exact mode ignores the tolerance.
template <class S>
inline bool scalar_near(const S& a, const S& b, double tol = 1e-9) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol;
  }
}

template <class S>
inline S scalar_abs(const S& x) {
  using std::abs;
  return x < S(0) ? S(-x) : x;
}

namespace detail {

inline Rat rat_pow10(int e) {
  Rat r(1);
  Rat ten(10);
  for (int i = 0; i < e; ++i) r *= ten;
  return r;
}

}  // namespace detail

// Parses "p/q", integers and decimal/scientific literals. Decimal literals
// convert exactly (e.g. "0.1" -> 1/10).
inline Rat rat_from_string(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ValidationError("empty numeric literal");
  if (s.find('/') != std::string::npos) {
    try {
      return Rat(s);
    } catch (const std::exception&) {
      throw ValidationError("bad rational literal: " + s);
    }
  }
  bool neg = false;
  size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  int frac_len = 0;
  bool seen_digit = false, seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac_len;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  int exp10 = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    bool eneg = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      eneg = s[pos] == '-';
      ++pos;
    }
    if (pos >= s.size()) throw ValidationError("bad exponent in literal: " + s);
    int e = 0;
    for (; pos < s.size(); ++pos) {
      if (s[pos] < '0' || s[pos] > '9') break;
      e = e * 10 + (s[pos] - '0');
      if (e > 100000) throw ValidationError("exponent out of range: " + s);
    }
    exp10 = eneg ? -e : e;
  }
  if (!seen_digit || pos != s.size())
    throw ValidationError("bad numeric literal: " + s);
  Rat value(BigInt(digits.empty() ? "0" : digits));
  int shift = exp10 - frac_len;
  if (shift > 0)
    value *= detail::rat_pow10(shift);
  else if (shift < 0)
    value /= detail::rat_pow10(-shift);
  return neg ? Rat(-value) : value;
}

template <class S>
inline S scalar_from_string(std::string_view text) {
  if constexpr (is_exact_v<S>) {
    return rat_from_string(text);
  } else {
    std::string s(text);
    if (s.find('/') != std::string::npos) {
      return to_double(rat_from_string(s));
    }
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ValidationError("bad numeric literal: " + s);
    return v;
  }
}

// Shortest round-trip form for doubles; for rationals an exact decimal when
// the denominator is 2^a 5^b and "p/q" otherwise.
inline std::string scalar_to_string(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string scalar_to_string(const Rat& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  int twos = 0, fives = 0;
  BigInt d = den;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return num.str() + "/" + den.str();
  int digits = std::max(twos, fives);
  BigInt scaled = num;
  for (int i = twos; i < digits; ++i) scaled *= 2;
  for (int i = fives; i < digits; ++i) scaled *= 5;
  bool neg = scaled < 0;
  std::string body = (neg ? BigInt(-scaled) : scaled).str();
  if (digits == 0) return (neg ? "-" : "") + body;
  if (static_cast<int>(body.size()) <= digits)
    body.insert(0, digits + 1 - body.size(), '0');
  body.insert(body.size() - digits, ".");
  return (neg ? "-" : "") + body;
}

}  // namespace tropo
