#include <doctest.h>

#include "natlas/blowup.hpp"
#include "natlas/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace natlas;

namespace {

using E3 = Poly3::Exponents;

// Eigenvalues of the field's Jacobian at a point, as a sorted real triple.
std::array<double, 3> jacobian_spectrum(const Field3& f, const std::array<double, 3>& p) {
    Eigen::Matrix3d j;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) j(i, k) = f.comp[i].derivative(k).eval(p);
    Eigen::EigenSolver<Eigen::Matrix3d> es(j);
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        REQUIRE(std::abs(es.eigenvalues()[i].imag()) < 1e-10);
        out[i] = es.eigenvalues()[i].real();
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("blowdown") {
    auto z = blowdown({0.0, 0.7, -0.3, 0.64});
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    CHECK(z[2] == 0.0);

    auto p = blowdown({2.0, 1.0, 1.0, 0.5});
    CHECK(p[0] == doctest::Approx(2.0));
    CHECK(p[1] == doctest::Approx(4.0));
    CHECK(p[2] == doctest::Approx(1.0));

    auto q = blowdown({1.0, 0.0, -1.0, 1.0});
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(-1.0));
    CHECK(q[2] == doctest::Approx(1.0));
}

TEST_CASE("blowdown and normalized blowup are mutually inverse off the critical locus") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(0.1, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        double xb = u(rng), yb = u(rng), rho = std::abs(u(rng)) + 1e-3;
        double n = std::sqrt(xb * xb + yb * yb + rho * rho);
        BlowupPoint p{radius(rng), xb / n, yb / n, rho / n};

        auto d = blowdown(p);
        BlowupPoint q = normalize_blowup(d[0], d[1], d[2]);
        CHECK(q.r == doctest::Approx(p.r).epsilon(1e-12));
        CHECK(q.xbar == doctest::Approx(p.xbar).epsilon(1e-12));
        CHECK(q.ybar == doctest::Approx(p.ybar).epsilon(1e-12));
        CHECK(q.rho == doctest::Approx(p.rho).epsilon(1e-12));
        CHECK(q.xbar * q.xbar + q.ybar * q.ybar + q.rho * q.rho ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    BlowupPoint origin = normalize_blowup(0, 0, 0);
    CHECK(origin.r == 0.0);
}

TEST_CASE("rescaled field and its divergence") {
    using E = Poly2::Exponents;
    SUBCASE("a=-1, mu=0 gives (ybar - xbar^2, xbar ybar)") {
        PolynomialField f = rescaled_field({-1.0, 0, 0, 0});
        Poly2 ex;
        ex.add_term(E{0, 1}, Rational(1));
        ex.add_term(E{2, 0}, Rational(-1));
        Poly2 ey;
        ey.add_term(E{1, 1}, Rational(1));
        CHECK(f.px == ex);
        CHECK(f.py == ey);
    }
    SUBCASE("divergence is (2a+1) xbar + mu3bar, exactly") {
        std::mt19937 rng(67);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 30; ++trial) {
            RescalingParams p{u(rng), u(rng), u(rng), u(rng)};
            Poly2 expected;
            expected.add_term(E{1, 0}, 2 * rational_from_double(p.a) + 1);
            expected.add_term(E{0, 0}, rational_from_double(p.mu3bar));
            CHECK(divergence(rescaled_field(p)) == expected);
        }
    }
    SUBCASE("Hamiltonian slice has zero divergence; mu3bar alone survives") {
        CHECK(divergence(rescaled_field({-0.5, 0.3, -0.7, 0.0})).is_zero());
        Poly2 d = divergence(rescaled_field({-0.5, 0, 0, 0.25}));
        Poly2 expected;
        expected.add_term(E{0, 0}, Rational(1, 4));
        CHECK(d == expected);
    }
}

TEST_CASE("critical points carry the closed-form eigenvalues") {
    auto pts = critical_points(-0.5);
    REQUIRE(pts.size() == 4);

    CHECK(pts[0].label == "P1");
    CHECK(pts[0].chart_sign == -1);
    CHECK(pts[0].ybar == 0.0);
    CHECK(pts[0].eigenvalues == std::array<double, 3>{0.5, -0.5, -2.0});

    CHECK(pts[1].label == "P2");
    CHECK(pts[1].chart_sign == +1);
    CHECK(pts[1].eigenvalues == std::array<double, 3>{-0.5, 0.5, 2.0});

    CHECK(pts[2].label == "P3");
    CHECK(pts[2].ybar == doctest::Approx(1.0)); // (1-2a)/2 at a = -1/2
    CHECK(pts[2].eigenvalues == std::array<double, 3>{0.5, -0.5, -2.0});

    CHECK(pts[3].label == "P4");
    CHECK(pts[3].eigenvalues == std::array<double, 3>{-0.5, 0.5, 2.0});

    auto deep = critical_points(-1.0);
    CHECK(deep[3].eigenvalues == std::array<double, 3>{-0.5, 0.5, 3.0});
    CHECK(deep[2].ybar == doctest::Approx(1.5));

    CHECK_THROWS_AS(critical_points(0.5), DegenerateBlowup);
}

TEST_CASE("directional charts reproduce the (rho, ybar) system at r = 0") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        RescalingParams p{-0.5, u(rng), u(rng), 0.0};
        Rational m1 = rational_from_double(p.mu1bar);
        Rational m2 = rational_from_double(p.mu2bar);
        for (int sign : {+1, -1}) {
            Field3 f = blown_up_field_3d(p, sign > 0 ? "x-positive" : "x-negative");
            Rational s(sign);

            // drho/dt = -+ rho (ybar - 1/2 + mu2 rho^2)
            Poly3 erho;
            erho.add_term(E3{0, 1, 1}, -s);
            erho.add_term(E3{0, 1, 0}, s * Rational(1, 2));
            erho.add_term(E3{0, 3, 0}, -s * m2);
            CHECK(f.comp[1] == erho);

            // dybar/dt = +-2 ybar -+ 2 ybar^2 -+ 2 mu2 ybar rho^2 + mu1 rho^3
            Poly3 ey;
            ey.add_term(E3{0, 0, 1}, 2 * s);
            ey.add_term(E3{0, 0, 2}, -2 * s);
            ey.add_term(E3{0, 2, 1}, -2 * s * m2);
            ey.add_term(E3{0, 3, 0}, m1);
            CHECK(f.comp[2] == ey);
        }
    }

    SUBCASE("pinned example: x-positive, mu1=mu2=0") {
        Field3 f = blown_up_field_3d({-0.5, 0, 0, 0}, "x-positive");
        Poly3 erho; // -rho(ybar - 1/2)
        erho.add_term(E3{0, 1, 1}, Rational(-1));
        erho.add_term(E3{0, 1, 0}, Rational(1, 2));
        Poly3 ey; // 2 ybar - 2 ybar^2
        ey.add_term(E3{0, 0, 1}, Rational(2));
        ey.add_term(E3{0, 0, 2}, Rational(-2));
        CHECK(f.comp[1] == erho);
        CHECK(f.comp[2] == ey);
    }
}

TEST_CASE("the radial foliation is invariant in every chart") {
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        RescalingParams p{u(rng), u(rng), u(rng), u(rng)};
        for (const char* chart : {"x-positive", "x-negative"}) {
            Field3 f = blown_up_field_3d(p, chart);
            // d(r rho)/dt = comp_r * rho + comp_rho * r must vanish identically.
            Poly3 lie = f.comp[0] * Poly3::variable(1) + f.comp[1] * Poly3::variable(0);
            CHECK(lie.is_zero());
        }
        Field3 f = blown_up_field_3d(p, "rescaling");
        CHECK(f.comp[0].is_zero()); // nu = r is frozen in the rescaling chart
    }
    CHECK_THROWS_AS(blown_up_field_3d({}, "y-direction"), UnknownChart);
}

TEST_CASE("rescaling chart restricts to the planar rescaled field") {
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        RescalingParams p{u(rng), u(rng), u(rng), u(rng)};
        Field3 f3 = blown_up_field_3d(p, "rescaling");
        PolynomialField f2 = rescaled_field(p);
        // Project (xbar, ybar) components of the 3D field onto Poly2.
        for (int c = 1; c <= 2; ++c) {
            Poly2 proj;
            for (const auto& [e, coef] : f3.comp[c].terms()) {
                CHECK(e[0] == 0); // no r-dependence
                proj.add_term(Poly2::Exponents{e[1], e[2]}, coef);
            }
            CHECK(proj == (c == 1 ? f2.px : f2.py));
        }
    }
}

TEST_CASE("Jacobian spectra at P1..P4 match the closed forms") {
    std::mt19937 rng(83);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double a : {-0.3, -0.5, -0.7, -1.0}) {
        RescalingParams p{a, u(rng), u(rng), u(rng)}; // eigenvalues are mu-independent
        auto pts = critical_points(a);
        for (const auto& cp : pts) {
            Field3 f = blown_up_field_3d(p, cp.chart_sign > 0 ? "x-positive" : "x-negative");
            auto got = jacobian_spectrum(f, {0.0, 0.0, cp.ybar});
            auto expected = cp.eigenvalues;
            std::sort(expected.begin(), expected.end());
            for (int i = 0; i < 3; ++i)
                CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("Hamiltonian values and conservation identity") {
    CHECK(hamiltonian(0, 0, 0.3, -0.4) == 0.0);
    CHECK(hamiltonian(1, 1, 0, 0) == 0.0);

    // Symbolic chain rule in variables (xbar, ybar, mu1, mu2, mu3):
    // dH/dt along the rescaled field at a = -1/2 equals mu3 * ybar * dH/dybar.
    using P5 = Poly<5>;
    using E5 = P5::Exponents;
    P5 xb = P5::variable(0), yb = P5::variable(1);
    P5 m1 = P5::variable(2), m2 = P5::variable(3), m3 = P5::variable(4);

    P5 h = Rational(1, 2) * (yb * yb) - Rational(1, 2) * (xb * xb * yb) + m2 * yb - m1 * xb;
    P5 fx = yb - Rational(1, 2) * (xb * xb) + m2;
    P5 fy = m1 + m3 * yb + xb * yb;

    P5 dhdt = h.derivative(0) * fx + h.derivative(1) * fy;
    CHECK(dhdt == m3 * yb * h.derivative(1));

    // mu3 = 0 collapses the drift to zero: substitute mu3 -> 0.
    P5 zero3 = dhdt.substitute(4, P5());
    CHECK(zero3.is_zero());
    (void)E5{};
}

TEST_CASE("first integrals of the directional system") {
    SUBCASE("rho^-5 integrating factor identity, exactly") {
        // Variables (z, rho, mu1, mu2); chart sign s: the localized system is
        //   dz/dt = -s 2 z(z+1) - s 2 mu2 (z+1) rho^2 + mu1 rho^3,
        //   drho/dt = -s rho (z + 1/2 + mu2 rho^2),
        // and Z = z^2/2 + z/2 + mu2 (z+1) rho^2 - s mu1 rho^3 satisfies
        // dZ/dt * rho - 4 Z * drho/dt = 0.
        using P4 = Poly<4>;
        P4 z = P4::variable(0), rho = P4::variable(1);
        P4 m1 = P4::variable(2), m2 = P4::variable(3);
        P4 one = P4::constant(Rational(1));
        for (int sign : {+1, -1}) {
            Rational s(sign);
            P4 zdot = Rational(-2) * s * (z * (z + one)) -
                      Rational(2) * s * (m2 * (z + one) * rho * rho) + m1 * rho * rho * rho;
            P4 rhodot = -s * (rho * (z + Rational(1, 2) * one + m2 * rho * rho));
            P4 big = Rational(1, 2) * (z * z) + Rational(1, 2) * z +
                     m2 * ((z + one) * rho * rho) - s * (m1 * rho * rho * rho);
            P4 lie = (big.derivative(0) * zdot + big.derivative(1) * rhodot) * rho -
                     Rational(4) * (big * rhodot);
            CHECK(lie.is_zero());
        }
    }
    SUBCASE("pinned values and the sign symmetry") {
        for (double rho : {0.2, 0.7, 1.3})
            CHECK(first_integral_pm(0.0, rho, 0.0, 0.0, +1) == 0.0);
        std::mt19937 rng(89);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            double z = u(rng), rho = std::abs(u(rng)) + 0.05;
            double m1 = u(rng), m2 = u(rng);
            CHECK(first_integral_pm(z, rho, m1, m2, +1) ==
                  doctest::Approx(first_integral_pm(z, rho, -m1, m2, -1)).epsilon(1e-14));
        }
        CHECK_THROWS_AS(first_integral_pm(0.1, 0.0, 0, 0, +1), DivisionByZero);
        CHECK_THROWS_AS(first_integral_pm(0.1, -0.3, 0, 0, -1), DivisionByZero);
        CHECK_THROWS_AS(first_integral_pm(0.1, 0.5, 0, 0, 2), std::invalid_argument);
    }
}

TEST_CASE("compensator") {
    SUBCASE("omega(1, alpha) = 0 on both branches") {
        for (double alpha : {0.0, 0.3, -0.7, 1e-12, -1e-9})
            CHECK(compensator(1.0, alpha) == 0.0);
    }
    SUBCASE("alpha = 0 branch is -ln x") {
        for (double x : {0.01, 0.1, 0.5, 0.9, 1.0})
            CHECK(compensator(x, 0.0) == -std::log(x));
    }
    SUBCASE("direct-evaluation oracle") {
        CHECK(compensator(0.5, 0.1) ==
              doctest::Approx(0.717734625362931).epsilon(1e-13));
        CHECK(std::abs(compensator(0.5, 1e-12) - std::log(2.0)) < 1e-9);
    }
    SUBCASE("branches agree at the threshold") {
        for (double x : {0.01, 0.37, 0.93}) {
            double below = compensator(x, 0.999999e-8);
            double above = compensator(x, 1.000001e-8);
            CHECK(below == doctest::Approx(above).epsilon(1e-11));
        }
    }
    SUBCASE("quadratic expansion bound with frozen constant") {
        const double c_frozen = 0.20;
        for (double x = 0.01; x <= 1.0; x += 0.0199) {
            double lx = std::log(x);
            for (double alpha = -0.1; alpha <= 0.1001; alpha += 0.004) {
                if (alpha == 0 || x == 1.0) continue;
                double err = std::abs(compensator(x, alpha) + lx - 0.5 * alpha * lx * lx);
                CHECK(err <= c_frozen * alpha * alpha * std::abs(lx * lx * lx) + 1e-15);
            }
        }
    }
    SUBCASE("scaling derivative identity x d/dx omega = -x^{-alpha}") {
        for (double x : {0.05, 0.3, 0.8}) {
            for (double alpha : {-0.4, -1e-10, 0.2, 0.7}) {
                double h = 1e-6 * x;
                double fd = (compensator(x + h, alpha) - compensator(x - h, alpha)) / (2 * h);
                CHECK(x * fd == doctest::Approx(-std::pow(x, -alpha)).epsilon(1e-6));
            }
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(compensator(0.0, 0.1), NonpositiveArgument);
        CHECK_THROWS_AS(compensator(-2.0, 0.0), NonpositiveArgument);
    }
}
