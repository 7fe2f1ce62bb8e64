#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

#include "mflow/error.hpp"

namespace mflow {

// Exact arithmetic backbone. Table values, heights and flow times are kept
// rational so that Birkhoff sums, the flow group law and coboundary checks
// come out with zero residual.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

// Every finite double is a dyadic rational; the conversion below is lossless.
inline Rational rat_of(double x) {
    if (!std::isfinite(x)) fail(Err::ValidationError, "non-finite number");
    return Rational(x);
}

inline BigInt floor_div(const BigInt& num, const BigInt& den) {
    BigInt q = num / den, r = num % den;
    if (r != 0 && ((r < 0) != (den < 0))) --q;
    return q;
}

inline BigInt rat_floor(const Rational& r) {
    return floor_div(numerator(r), denominator(r));
}

inline long rat_floor_long(const Rational& r) {
    return rat_floor(r).template convert_to<long>();
}

// r mod 1, in [0,1)
inline Rational rat_mod1(const Rational& r) { return r - Rational(rat_floor(r)); }

// Parses "3", "-1.25" or "2/7" exactly.
Rational parse_rational(const std::string& text);

std::string rational_str(const Rational& r);

} // namespace mflow
