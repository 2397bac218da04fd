#include "natlas/blowup.hpp"

#include "natlas/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace natlas {

std::array<double, 3> blowdown(const BlowupPoint& p) {
    return {p.r * p.xbar, p.r * p.r * p.ybar, p.r * p.rho};
}

BlowupPoint normalize_blowup(double x, double y, double nu) {
    if (nu < 0) throw std::invalid_argument("normalize_blowup: nu must be >= 0");
    if (x == 0 && y == 0 && nu == 0) return BlowupPoint{0, 0, 1, 0};
    // Solve x^2/r^2 + y^2/r^4 + nu^2/r^2 = 1 for r > 0. With u = 1/r^2 this
    // is quadratic, and the rationalized root is stable for small y.
    double a = x * x + nu * nu;
    double u = 2.0 / (a + std::sqrt(a * a + 4 * y * y));
    double r = 1.0 / std::sqrt(u);
    return BlowupPoint{r, x / r, y / (r * r), nu / r};
}

PolynomialField rescaled_field(const RescalingParams& p) {
    using E = Poly2::Exponents;
    Rational a = rational_from_double(p.a);
    Rational m1 = rational_from_double(p.mu1bar);
    Rational m2 = rational_from_double(p.mu2bar);
    Rational m3 = rational_from_double(p.mu3bar);
    PolynomialField f;
    f.px.add_term(E{0, 1}, Rational(1));
    f.px.add_term(E{2, 0}, a);
    f.px.add_term(E{0, 0}, m2);
    f.py.add_term(E{0, 0}, m1);
    f.py.add_term(E{0, 1}, m3);
    f.py.add_term(E{1, 1}, Rational(1));
    return f;
}

std::vector<CriticalPoint> critical_points(double a) {
    if (a == 0.5)
        throw DegenerateBlowup("critical points collide when a = 1/2");
    double s = 1 - 2 * a; // the common eigenvalue scale on the y-direction
    double yb = s / 2;
    return {
        CriticalPoint{"P1", -1, 0.0, {-a, a, -s}},
        CriticalPoint{"P2", +1, 0.0, {a, -a, s}},
        CriticalPoint{"P3", +1, yb, {0.5, -0.5, -s}},
        CriticalPoint{"P4", -1, yb, {-0.5, 0.5, s}},
    };
}

Field3 blown_up_field_3d(const RescalingParams& p, const std::string& chart) {
    using E = Poly3::Exponents;
    Rational a = rational_from_double(p.a);
    Rational m1 = rational_from_double(p.mu1bar);
    Rational m2 = rational_from_double(p.mu2bar);
    Rational m3 = rational_from_double(p.mu3bar);

    Field3 f;
    f.chart_id = chart;
    if (chart == "rescaling") {
        // rho = 1, variables (r, xbar, ybar); nu = r is constant.
        f.vars = {"r", "xbar", "ybar"};
        f.comp[0] = Poly3(); // dr/dt = 0
        f.comp[1].add_term(E{0, 0, 1}, Rational(1));
        f.comp[1].add_term(E{0, 2, 0}, a);
        f.comp[1].add_term(E{0, 0, 0}, m2);
        f.comp[2].add_term(E{0, 0, 0}, m1);
        f.comp[2].add_term(E{0, 0, 1}, m3);
        f.comp[2].add_term(E{0, 1, 1}, Rational(1));
        return f;
    }

    int sign;
    if (chart == "x-positive")
        sign = +1;
    else if (chart == "x-negative")
        sign = -1;
    else
        throw UnknownChart("no chart named '" + chart +
                           "' (use rescaling, x-positive, x-negative)");

    // xbar = sign, variables (r, rho, ybar). With G = ybar + a + mu2 rho^2:
    //   dr/dt = sign r G,  drho/dt = -sign rho G,
    //   dybar/dt = sign[(1-2a) ybar - 2 ybar^2 - 2 mu2 rho^2 ybar]
    //              + mu3 rho ybar + mu1 rho^3.
    f.vars = {"r", "rho", "ybar"};
    Rational s(sign);
    Poly3 g;
    g.add_term(E{0, 0, 1}, Rational(1));
    g.add_term(E{0, 0, 0}, a);
    g.add_term(E{0, 2, 0}, m2);
    f.comp[0] = s * (Poly3::variable(0) * g);
    f.comp[1] = -s * (Poly3::variable(1) * g);
    f.comp[2].add_term(E{0, 0, 1}, s * (1 - 2 * a));
    f.comp[2].add_term(E{0, 0, 2}, -2 * s);
    f.comp[2].add_term(E{0, 2, 1}, -2 * s * m2);
    f.comp[2].add_term(E{0, 1, 1}, m3);
    f.comp[2].add_term(E{0, 3, 0}, m1);
    return f;
}

double hamiltonian(double xbar, double ybar, double mu1bar, double mu2bar) {
    return 0.5 * ybar * ybar - 0.5 * xbar * xbar * ybar + mu2bar * ybar - mu1bar * xbar;
}

double first_integral_pm(double z, double rho, double mu1bar, double mu2bar, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("first_integral_pm: sign must be +1 or -1");
    if (rho <= 0)
        throw DivisionByZero("first integral evaluated on the critical locus rho <= 0");
    double r2 = rho * rho, r4 = r2 * r2;
    return z * z / (2 * r4) + z / (2 * r4) + mu2bar * (z + 1) / r2 - sign * mu1bar / rho;
}

double compensator(double x, double alpha) {
    if (x <= 0)
        throw NonpositiveArgument("compensator needs x > 0, got x = " + std::to_string(x));
    double lx = std::log(x);
    if (alpha == 0) return -lx;
    if (std::abs(alpha) < 1e-8) {
        // Series branch: -ln x (1 + (alpha/2)(-ln x) + (alpha^2/6) ln^2 x);
        // stays smooth through alpha = 0 without cancellation.
        return -lx * (1.0 + 0.5 * alpha * (-lx) + alpha * alpha / 6.0 * lx * lx);
    }
    return std::expm1(-alpha * lx) / alpha;
}

} // namespace natlas
