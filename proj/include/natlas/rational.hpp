// Exact rational scalar type used for all polynomial coefficients.
//
// Algebraic facts in this toolkit (invariance of curves, divergence
// identities, parameter formulas) are polynomial identities; keeping
// coefficients rational lets tests assert them with zero tolerance.
// Conversion to double happens only at evaluation time.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace natlas {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
    return Rational(x);
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational rational_from_string(const std::string& s) { return Rational(s); }

} // namespace natlas
