// Weighted blow-up of the three-dimensional family (x, y, nu), the family
// rescaling field, the critical points P1..P4 with their closed-form
// eigenvalues, the Hamiltonian / first-integral structure on the blown-up
// sphere, and the logarithmic compensator.

#pragma once

#include "natlas/field.hpp"

#include <array>
#include <string>
#include <vector>

namespace natlas {

// Point in blow-up coordinates: (x, y, nu) = (r xbar, r^2 ybar, r rho).
struct BlowupPoint {
    double r = 0;
    double xbar = 0;
    double ybar = 0;
    double rho = 0;
};

// (x, y, nu) image of a blow-up point.
std::array<double, 3> blowdown(const BlowupPoint& p);

// Sphere-normalized preimage (xbar^2 + ybar^2 + rho^2 = 1, r >= 0) of a
// downstairs point with nu >= 0. The origin maps to the r = 0 representative
// (0, 0, 1, 0).
BlowupPoint normalize_blowup(double x, double y, double nu);

struct RescalingParams {
    double a = -0.5;
    double mu1bar = 0;
    double mu2bar = 0;
    double mu3bar = 0;
};

// The planar family-rescaling field in (xbar, ybar):
//   dxbar/dt = ybar + a xbar^2 + mu2bar,
//   dybar/dt = mu1bar + mu3bar ybar + xbar ybar.
// Coefficients are the exact dyadic values of the double inputs, so symbolic
// identities (divergence = (2a+1) xbar + mu3bar) hold exactly.
PolynomialField rescaled_field(const RescalingParams& p);

struct CriticalPoint {
    std::string label;                   // "P1".."P4"
    int chart_sign;                      // directional chart xbar = +1 or -1
    double ybar;                         // ybar coordinate in that chart
    std::array<double, 3> eigenvalues;   // in (r, rho, y) order
};

// The four singular points on r = rho = 0 with closed-form eigenvalues:
//   P1: (-a, a, -(1-2a)),  P2: (a, -a, 1-2a),
//   P3: (1/2, -1/2, -(1-2a)),  P4: (-1/2, 1/2, 1-2a).
// Throws DegenerateBlowup when a = 1/2 (the points collide).
std::vector<CriticalPoint> critical_points(double a);

// A polynomial vector field on one chart of the blown-up space.
struct Field3 {
    std::array<Poly3, 3> comp;            // d(vars[i])/dt
    std::array<std::string, 3> vars;
    std::string chart_id;
};

// The blown-up model field (unfolding tails truncated to zero) in one of the
// charts "rescaling" (rho = 1, variables (r, xbar, ybar)), "x-positive" or
// "x-negative" (xbar = +-1, variables (r, rho, ybar)). The radial-weight
// product r*rho (resp. r in the rescaling chart) is a symbolic first
// integral. Throws UnknownChart for any other chart name.
Field3 blown_up_field_3d(const RescalingParams& p, const std::string& chart);

// H = ybar^2/2 - xbar^2 ybar / 2 + mu2bar ybar - mu1bar xbar; conserved by
// the rescaled field when a = -1/2 and mu3bar = 0.
double hamiltonian(double xbar, double ybar, double mu1bar, double mu2bar);

// First integral of the directional-chart field at a = -1/2, mu3bar = 0, in
// the localized coordinate z = ybar - 1:
//   z^2/(2 rho^4) + z/(2 rho^4) + mu2bar (z+1)/rho^2 -+ mu1bar / rho,
// with sign = +1 for the x-positive chart and -1 for the x-negative chart.
// Throws DivisionByZero when rho <= 0 (the critical locus).
double first_integral_pm(double z, double rho, double mu1bar, double mu2bar, int sign);

// Compensator omega(x, alpha) = (x^{-alpha} - 1)/alpha, continued by -ln x at
// alpha = 0; a series branch keeps it numerically smooth for |alpha| < 1e-8.
// Throws NonpositiveArgument when x <= 0.
double compensator(double x, double alpha);

} // namespace natlas
