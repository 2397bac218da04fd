#include <doctest.h>

#include "natlas/errors.hpp"
#include "natlas/field.hpp"

#include <random>

using namespace natlas;

namespace {

// Small random rationals with denominators up to 40; good enough to exercise
// exact arithmetic without blowing up term sizes.
Rational random_rational(std::mt19937& rng, int lo = -20, int hi = 20) {
    std::uniform_int_distribution<int> num(lo, hi);
    std::uniform_int_distribution<int> den(1, 40);
    return Rational(num(rng), den(rng));
}

} // namespace

TEST_CASE("quadratic family has the advertised monomials") {
    QuadraticParams p{Rational(1, 10), Rational(-2, 15), Rational(3, 2)};
    PolynomialField f = quadratic_from_params(p);

    using E = Poly2::Exponents;
    CHECK(f.px.coeff(E{1, 0}) == Rational(1, 10));
    CHECK(f.px.coeff(E{0, 1}) == Rational(-1));
    CHECK(f.px.coeff(E{2, 0}) == Rational(3, 2));
    CHECK(f.px.terms().size() == 3);

    CHECK(f.py.coeff(E{1, 0}) == Rational(1));
    CHECK(f.py.coeff(E{0, 1}) == Rational(-2, 15));
    CHECK(f.py.coeff(E{1, 1}) == Rational(1));
    CHECK(f.py.terms().size() == 3);

    CHECK(f.degree() == 2);
}

TEST_CASE("degree is recomputed, not cached") {
    QuadraticParams p{Rational(0), Rational(0), Rational(2)};
    PolynomialField f = quadratic_from_params(p);
    CHECK(f.degree() == 2);

    // Cancel the only quadratic terms; the degree must drop with them.
    f.px.add_term(Poly2::Exponents{2, 0}, Rational(-2));
    f.py.add_term(Poly2::Exponents{1, 1}, Rational(-1));
    CHECK(f.degree() == 1);
}

TEST_CASE("coefficient storage is canonical") {
    Poly2 p;
    p.add_term(Poly2::Exponents{1, 2}, Rational(5, 7));
    p.add_term(Poly2::Exponents{1, 2}, Rational(-5, 7));
    CHECK(p.is_zero());
    CHECK(p.terms().empty());
    CHECK(p.total_degree() == -1);

    // Same polynomial assembled in different orders compares equal.
    Poly2 a, b;
    a.add_term(Poly2::Exponents{0, 1}, Rational(1, 3));
    a.add_term(Poly2::Exponents{2, 0}, Rational(4));
    b.add_term(Poly2::Exponents{2, 0}, Rational(4));
    b.add_term(Poly2::Exponents{0, 1}, Rational(1, 3));
    CHECK(a == b);
}

TEST_CASE("divergence of the quadratic family is delta + gamma + (2B+1) x") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        QuadraticParams p{random_rational(rng), random_rational(rng), random_rational(rng)};
        PolynomialField f = quadratic_from_params(p);

        Poly2 expected;
        expected.add_term(Poly2::Exponents{0, 0}, p.delta + p.gamma);
        expected.add_term(Poly2::Exponents{1, 0}, 2 * p.b_cap + 1);
        CHECK(divergence(f) == expected);
    }
}

TEST_CASE("eval_field matches a hand computation") {
    QuadraticParams p{Rational(1, 10), Rational(-2, 15), Rational(3, 2)};
    PolynomialField f = quadratic_from_params(p);

    auto v = eval_field(f, {2.0, -1.0});
    // px = 0.1*2 + 1 + 1.5*4 = 7.2 ; py = 2 + (2/15) - 2 = 2/15
    CHECK(v[0] == doctest::Approx(7.2).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
}

TEST_CASE("jacobian agrees with central finite differences") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        QuadraticParams p{random_rational(rng), random_rational(rng), random_rational(rng)};
        PolynomialField f = quadratic_from_params(p);
        std::array<double, 2> x{coord(rng), coord(rng)};

        Eigen::Matrix2d j = jacobian(f, x);
        const double h = 1e-6;
        for (int col = 0; col < 2; ++col) {
            auto xp = x, xm = x;
            xp[col] += h;
            xm[col] -= h;
            auto fp = eval_field(f, xp), fm = eval_field(f, xm);
            for (int row = 0; row < 2; ++row) {
                double fd = (fp[row] - fm[row]) / (2 * h);
                CHECK(j(row, col) == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("JSON round-trip is exact") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        QuadraticParams p{random_rational(rng), random_rational(rng), random_rational(rng)};
        PolynomialField f = quadratic_from_params(p);
        PolynomialField g = field_from_json(field_to_json(f));
        CHECK(f == g);
    }

    // Coefficients that are not exactly representable in binary survive too.
    PolynomialField f;
    f.px.add_term(Poly2::Exponents{3, 1}, Rational(-22, 7));
    f.py.add_term(Poly2::Exponents{0, 0}, Rational(1, 3));
    CHECK(field_from_json(field_to_json(f)) == f);
}

TEST_CASE("malformed JSON raises a validation error") {
    CHECK_THROWS_AS(field_from_json("{not json"), Error);
    try {
        field_from_json("{\"px\": []}"); // missing py
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.category() == Error::Category::Validation);
    }
}
