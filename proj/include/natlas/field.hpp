// Planar polynomial vector fields with exact rational coefficients.

#pragma once

#include "natlas/poly.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace natlas {

// A planar field (dx/dt, dy/dt) = (px(x,y), py(x,y)).
struct PolynomialField {
    Poly2 px;
    Poly2 py;

    // Degree is recomputed from the components, never stored.
    int degree() const { return std::max(px.total_degree(), py.total_degree()); }

    bool operator==(const PolynomialField& o) const {
        return px == o.px && py == o.py;
    }
    bool operator!=(const PolynomialField& o) const { return !(*this == o); }
};

// Parameters of the one-parabola quadratic family
//   dx/dt = delta*x - y + B*x^2,   dy/dt = x + gamma*y + x*y.
struct QuadraticParams {
    Rational delta;
    Rational gamma;
    Rational b_cap; // the coefficient written B
};

PolynomialField quadratic_from_params(const QuadraticParams& p);

std::array<double, 2> eval_field(const PolynomialField& f, const std::array<double, 2>& pt);

Poly2 divergence(const PolynomialField& f);

Eigen::Matrix2d jacobian(const PolynomialField& f, const std::array<double, 2>& pt);

// JSON serialization keeps coefficients exact (numerator/denominator strings).
std::string field_to_json(const PolynomialField& f);
PolynomialField field_from_json(const std::string& text);

} // namespace natlas
