#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace orbitdens {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using i128 = __int128;

inline Rational ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }

/// Exact 2^e for any integer exponent.
inline Rational pow2(std::int64_t e) {
  BigInt one = 1;
  if (e >= 0) return Rational(one << static_cast<unsigned>(e));
  return Rational(BigInt(1), one << static_cast<unsigned>(-e));
}

/// Exact rational value of a finite double (doubles are dyadic rationals).
Rational fromDouble(double x);

inline double toDouble(const Rational& r) { return r.convert_to<double>(); }

/// r^p for integer p >= 0.
inline Rational powInt(const Rational& r, unsigned p) {
  Rational acc = 1;
  for (unsigned i = 0; i < p; ++i) acc *= r;
  return acc;
}

std::string toString(const Rational& r);

}  // namespace orbitdens
