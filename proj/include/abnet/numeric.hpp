#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abnet {

/// Arbitrary-precision integer used for letter counts and lattice entries.
using Int = boost::multiprecision::cpp_int;
/// Arbitrary-precision rational, always kept in lowest terms.
using Rational = boost::multiprecision::cpp_rational;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contract was violated by the caller (bad input shape, negative counts, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two independent computations that must agree did not.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

inline Int numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

/// num/den in lowest terms. Boost 1.74 rejects a negative denominator in the
/// two-argument constructor, so the sign is moved to the numerator first.
inline Rational make_rational(const Int& num, const Int& den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  return den < 0 ? Rational(Int(-num), Int(-den)) : Rational(num, den);
}

inline Int gcd(const Int& a, const Int& b) {
  Int x = abs(a), y = abs(b);
  while (y != 0) {
    Int t = x % y;
    x = std::move(y);
    y = std::move(t);
  }
  return x;
}

inline Int lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / gcd(a, b) * b);
}

/// Floor division (rounds toward negative infinity).
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::string to_string(const Int& v) { return v.str(); }

/// "n" for integral values, "num/den" otherwise.
inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Int parse_int(std::string_view text) {
  if (text.empty()) throw InvalidArgument("empty integer literal");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) throw InvalidArgument("malformed integer literal '" + std::string(text) + "'");
  for (std::size_t k = i; k < text.size(); ++k)
    if (text[k] < '0' || text[k] > '9')
      throw InvalidArgument("malformed integer literal '" + std::string(text) + "'");
  Int v(std::string(text.substr(i)));
  return text[0] == '-' ? Int(-v) : v;
}

/// Accepts "n" or "num/den"; the result is canonical.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  Int num = parse_int(text.substr(0, slash));
  Int den = parse_int(text.substr(slash + 1));
  if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  return make_rational(num, den);
}

}  // namespace abnet
