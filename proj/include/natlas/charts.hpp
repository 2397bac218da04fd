// Localization of quadratic fields at the singular point at infinity in the
// y-direction chart, the closed-form normal-form parameters (a, b, eta), and
// classification of finite singular points.

#pragma once

#include "natlas/field.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace natlas {

// Field in chart coordinates (v, z) = (x/y, 1/y), time rescaled by z so that
// both components are polynomial. {z = 0} is the line at infinity and is
// invariant: the z-component is exactly divisible by z.
struct InfinityChart {
    PolynomialField field; // components (dv/ds, dz/ds) in variables (v, z)
    std::string chart_id;  // "y-direction"
    bool triple = false;   // chart origin is a multiplicity-3 singular point
};

// Localize a degree-<=2 field at the point at infinity on the y-axis.
// Requires the chart origin to be a singular point with nilpotent linear
// part; throws NotNilpotentAtInfinity otherwise, naming the offending
// coefficients. A zero linear part is allowed (it is nilpotent); the triple
// flag is computed either way.
InfinityChart localize_at_infinity(const PolynomialField& f);

// Coefficients of the smooth saddle normal form at the nilpotent point.
struct NormalFormParams {
    Rational a;   // quadratic coefficient; a < 0 in the saddle case
    Rational b;   // linear damping coefficient; vanishes at B = 3/2
    Rational eta; // higher-order modulus; vanishes iff gamma = 0
};

// Exact parameter values for the quadratic family: a = 1-B, b = 3-2B,
// eta = -gamma (B-1)^2 (5B^2 - 4B + 11). Requires B > 1 (saddle type);
// throws NotSaddleType otherwise.
NormalFormParams normal_form_params(const QuadraticParams& q);

enum class SingularityType {
    Saddle,
    Node,
    FocusOrCenter,
    SaddleNode,
    Nilpotent,
    Degenerate,
};

std::string to_string(SingularityType t);

struct Singularity {
    std::array<double, 2> point;
    SingularityType type;
    std::array<std::complex<double>, 2> eigenvalues;
};

// All real singular points with |x|, |y| <= box, classified by the linear
// part (trace/determinant rules; "nilpotent" means a nonzero nilpotent linear
// part). Throws NonIsolatedSingularities when the components share a factor.
std::vector<Singularity> classify_finite_singularities(const PolynomialField& f,
                                                       double box = 10.0);

} // namespace natlas
