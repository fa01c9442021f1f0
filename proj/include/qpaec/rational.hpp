#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace qpaec {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// 2^e as an exact rational; e may be negative.
inline Rational pow2_rational(long e) {
  BigInt p = BigInt(1) << static_cast<unsigned>(e < 0 ? -e : e);
  return e >= 0 ? Rational(p) : Rational(1, p);
}

/// "3/4" for proper fractions, "2" for integers.
inline std::string rational_to_string(const Rational& r) { return r.str(); }

inline Rational rational_from_string(const std::string& s) { return Rational(s); }

inline double rational_to_double(const Rational& r) { return r.template convert_to<double>(); }

}  // namespace qpaec
