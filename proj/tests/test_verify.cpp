#include <doctest.h>

#include "natlas/errors.hpp"
#include "natlas/maps.hpp"
#include "natlas/verify.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace natlas;

namespace {

constexpr double PI = std::numbers::pi;

// Residual of a candidate parabola under the full family, used to probe
// both invariance and its failure.
Poly1 residual_for(const Rational& b_cap, const Rational& delta, const Rational& gamma,
                   const Parabola& p) {
    return parabola_invariance_residual(QuadraticParams{delta, gamma, b_cap}, p);
}

} // namespace

// ---------------------------------------------------------------------------
// Invariant parabola
// ---------------------------------------------------------------------------

TEST_CASE("invariant parabola: exact coefficients at hand-checked parameters") {
    SUBCASE("B = 3/2, delta = 0") {
        const InvariantParabola ip = invariant_parabola(Rational(3, 2), Rational(0));
        CHECK(ip.parabola.c2 == Rational(1));
        CHECK(ip.parabola.c1 == Rational(0));
        CHECK(ip.parabola.c0 == Rational(-1, 3));
        CHECK(ip.gamma == Rational(0));
    }
    SUBCASE("B = 3/2, delta = 1/10") {
        const InvariantParabola ip = invariant_parabola(Rational(3, 2), Rational(1, 10));
        CHECK(ip.parabola.c2 == Rational(1));
        // (2 - 2/3) * 1/10 = 2/15
        CHECK(ip.parabola.c1 == Rational(2, 15));
        // -(3/2 - 2/100) / (2 * 9/4) = -(148/100) / (9/2) = -74/225
        CHECK(ip.parabola.c0 == Rational(-74, 225));
        // (1 - 3) * (1/10) / (3/2) = -2/15
        CHECK(ip.gamma == Rational(-2, 15));
    }
}

TEST_CASE("invariant parabola: the residual polynomial vanishes identically") {
    const InvariantParabola ip = invariant_parabola(Rational(3, 2), Rational(1, 10));
    const Poly1 r = residual_for(Rational(3, 2), Rational(1, 10), ip.gamma, ip.parabola);
    CHECK(r.terms().empty());
}

TEST_CASE("invariant parabola: B = 2, delta = 0 checked against a manual parabola") {
    // Directly posit y = 3/2 x^2 - 1/4 and verify invariance by the residual
    // alone, independent of the constructor.
    const Parabola manual{Rational(3, 2), Rational(0), Rational(-1, 4)};
    const Poly1 r = residual_for(Rational(2), Rational(0), Rational(0), manual);
    CHECK(r.terms().empty());
    const InvariantParabola ip = invariant_parabola(Rational(2), Rational(0));
    CHECK(ip.parabola.c2 == manual.c2);
    CHECK(ip.parabola.c0 == manual.c0);
    CHECK(ip.gamma == Rational(0));
}

TEST_CASE("invariant parabola: excluded capital-B values throw") {
    CHECK_THROWS_AS(invariant_parabola(Rational(0), Rational(1, 10)), ExcludedB);
    CHECK_THROWS_AS(invariant_parabola(Rational(1, 2), Rational(1, 10)), ExcludedB);
}

TEST_CASE("invariant parabola: the gamma tie is necessary, not just sufficient") {
    const InvariantParabola ip = invariant_parabola(Rational(7, 5), Rational(1, 8));
    const Rational off = ip.gamma + Rational(1, 100);
    const Poly1 r = residual_for(Rational(7, 5), Rational(1, 8), off, ip.parabola);
    CHECK_FALSE(r.terms().empty());
}

TEST_CASE("invariant parabola: 100 random rational parameter pairs are exactly invariant") {
    std::mt19937 rng(424242u);
    std::uniform_int_distribution<int> num(1, 400), den(401, 800), dnum(-100, 100);
    for (int i = 0; i < 100; ++i) {
        // B in (1, 2), delta in (-1/4, 1/4), both exact rationals.
        const Rational b_cap = Rational(1) + Rational(num(rng), den(rng));
        const Rational delta = Rational(dnum(rng), 400);
        if (b_cap == Rational(1, 2) || b_cap == 0) continue; // unreachable, by range
        const InvariantParabola ip = invariant_parabola(b_cap, delta);
        const Poly1 r = residual_for(b_cap, delta, ip.gamma, ip.parabola);
        REQUIRE(r.terms().empty());
        // And the tie is tight: perturbing gamma by 1/1000 breaks invariance.
        const Poly1 bad =
            residual_for(b_cap, delta, ip.gamma + Rational(1, 1000), ip.parabola);
        REQUIRE_FALSE(bad.terms().empty());
    }
}

// ---------------------------------------------------------------------------
// Return-map multiplier
// ---------------------------------------------------------------------------

TEST_CASE("multiplier: delta = 0 gives exactly 1 in both routes") {
    CHECK(pprime_closed_form(1.5, 0.0) == 1.0);
    CHECK(pprime_numeric(1.5, 0.0, 10.0) == 1.0);
    CHECK(pprime_numeric(1.5, 0.0, 100.0) == 1.0);
    CHECK(pprime_numeric(1.5, 0.0, 1e4) == 1.0);
    CHECK(pprime_numeric(1.8, 0.0, 1e4) == 1.0);
}

TEST_CASE("multiplier: B = 1 degenerates to 1 for any admissible delta") {
    CHECK(pprime_closed_form(1.0, 0.3) == 1.0);
    CHECK(pprime_numeric(1.0, 0.3, 1e3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multiplier: closed form matches its explicit expression and contracts") {
    const double b_cap = 1.5, delta = 0.2;
    const double expected =
        std::exp(4.0 * PI * delta * std::sqrt(b_cap) * (1.0 - b_cap) /
                 std::sqrt(1.0 - b_cap * delta * delta));
    CHECK(pprime_closed_form(b_cap, delta) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(pprime_closed_form(b_cap, delta) < 1.0); // stable graphic: contraction
}

TEST_CASE("multiplier: input validation") {
    CHECK_THROWS_AS(pprime_closed_form(0.9, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(pprime_numeric(0.9, 0.1, 1e3), std::invalid_argument);
    CHECK_THROWS_AS(pprime_numeric(1.5, 0.1, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(pprime_log_tail(1.5, 0.1, 5.0), std::invalid_argument);
    // A singular point lands on the parabola once 1 - B delta^2 <= 0.
    CHECK_THROWS_AS(pprime_closed_form(1.5, 0.9), SingularOnParabola);
    CHECK_THROWS_AS(pprime_numeric(1.5, 0.9, 1e3), SingularOnParabola);
    CHECK_THROWS_AS(pprime_closed_form(1.5, std::sqrt(1.0 / 1.5) * (1 + 1e-12)),
                    SingularOnParabola);
}

TEST_CASE("multiplier: delta -> -delta inverts the multiplier") {
    for (const double b_cap : {1.2, 1.5, 1.8}) {
        for (const double delta : {0.05, 0.1, 0.2}) {
            const double prod =
                pprime_closed_form(b_cap, delta) * pprime_closed_form(b_cap, -delta);
            CHECK(prod == doctest::Approx(1.0).epsilon(1e-14));
            const double prod_num =
                pprime_numeric(b_cap, delta, 1e3) * pprime_numeric(b_cap, -delta, 1e3);
            CHECK(prod_num == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("multiplier: quadrature route agrees with the closed form on the grid") {
    for (const double b_cap : {1.2, 1.5, 1.8}) {
        for (const double delta : {0.05, 0.1, 0.2}) {
            const double closed = pprime_closed_form(b_cap, delta);
            const double numeric = pprime_numeric(b_cap, delta, 1e4);
            CHECK(std::abs(numeric - closed) / closed < 1e-9);
        }
    }
}

TEST_CASE("multiplier: window integral reconstructed from the pieces matches the "
          "independently integrated divergence") {
    // -log(multiplier at cutoff c) + tail(c) equals the divergence integral
    // over |x| <= c alone; at c = 50 that window integral was pinned by
    // direct orbit quadrature elsewhere in the suite.
    const double window =
        -std::log(pprime_numeric(1.5, 0.1, 50.0)) + pprime_log_tail(1.5, 0.1, 50.0);

    // Antiderivative evaluated at the endpoints: (1+2B) log D + Cp arctan u.
    const double b_cap = 1.5, delta = 0.1;
    const double e = (1.0 - b_cap) * delta / b_cap;
    const double cD = ((1.0 - 2.0 * b_cap) * delta * delta + b_cap) / (2.0 * b_cap * b_cap);
    const double disc = 1.0 - b_cap * delta * delta;
    const double cp = 4.0 * delta * std::sqrt(b_cap) * (1.0 - b_cap) / std::sqrt(disc);
    auto F = [&](double x) {
        const double d = 0.5 * x * x + e * x + cD;
        const double u = (-b_cap * x + (b_cap - 1.0) * delta) / std::sqrt(b_cap * disc);
        return (1.0 + 2.0 * b_cap) * std::log(d) + cp * std::atan(u);
    };
    CHECK(window == doctest::Approx(F(50.0) - F(-50.0)).epsilon(1e-10));
}

TEST_CASE("multiplier: the analytic tail shrinks as the window grows") {
    const double t2 = std::abs(pprime_log_tail(1.5, 0.1, 1e2));
    const double t3 = std::abs(pprime_log_tail(1.5, 0.1, 1e3));
    const double t4 = std::abs(pprime_log_tail(1.5, 0.1, 1e4));
    CHECK(t2 > t3);
    CHECK(t3 > t4);
    CHECK(t4 < 1e-4);
    // Meanwhile the assembled multiplier is already converged at every cutoff,
    // because the tail is analytic rather than truncated.
    const double closed = pprime_closed_form(1.5, 0.1);
    for (const double c : {1e2, 1e3, 1e4})
        CHECK(std::abs(pprime_numeric(1.5, 0.1, c) - closed) / closed < 1e-9);
}

// ---------------------------------------------------------------------------
// Desk-scale scan
// ---------------------------------------------------------------------------

TEST_CASE("cycle scan: reduced grid, hyperbolic cells carry no interior fixed points") {
    CycleScanConfig cfg;
    cfg.b_values = {1.4, 1.6};
    cfg.delta_values = {0.0, 0.1};
    cfg.annulus_lo = 5e-3;
    cfg.annulus_hi = 0.3;
    cfg.annulus_samples = 5;
    cfg.tmax = 400;
    const CycleScanResult res = cycle_scan(cfg);
    REQUIRE(res.rows.size() == 4);

    for (const CycleScanRow& row : res.rows) {
        CAPTURE(row.b_cap);
        CAPTURE(row.delta);
        REQUIRE(row.status == "ok");
        if (row.delta == 0.0) {
            // Integrable slice: both routes are exactly 1 and the scan flags
            // the displacement as below resolution rather than counting noise.
            CHECK(row.pprime_closed == 1.0);
            CHECK(row.pprime_numeric == 1.0);
            CHECK(row.gamma == 0.0);
            CHECK(row.fixed_points == -1);
        } else {
            CHECK(row.pprime_closed < 1.0);
            CHECK(row.relerr < 1e-6);
            // Decisively hyperbolic graphic: no return-map fixed points in
            // the annulus.
            CHECK(std::abs(row.pprime_closed - 1.0) > cfg.fixed_point_margin);
            CHECK(row.fixed_points == 0);
        }
    }
    SUBCASE("grid order is b-major") {
        CHECK(res.rows[0].b_cap == 1.4);
        CHECK(res.rows[1].b_cap == 1.4);
        CHECK(res.rows[2].b_cap == 1.6);
        CHECK(res.rows[0].delta == 0.0);
        CHECK(res.rows[1].delta == 0.1);
    }
}

TEST_CASE("cycle scan: invalid cells are reported per-row, not thrown") {
    CycleScanConfig cfg;
    cfg.b_values = {0.9, 1.5};  // 0.9 violates B >= 1
    cfg.delta_values = {0.9};   // and at B=1.5 this puts a singular point on the parabola
    cfg.annulus_samples = 2;
    const CycleScanResult res = cycle_scan(cfg);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].status != "ok");
    CHECK(res.rows[1].status != "ok");
    CHECK(res.rows[0].fixed_points == -1);
    CHECK(std::isnan(res.rows[1].pprime_closed));
}

TEST_CASE("cycle scan: CSV header and shape") {
    CycleScanConfig cfg;
    cfg.b_values = {1.5};
    cfg.delta_values = {0.0};
    cfg.annulus_samples = 2;
    cfg.tmax = 100;
    const std::string csv = cycle_scan_to_csv(cycle_scan(cfg));
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "B,delta,gamma,pprime_closed,pprime_numeric,relerr,fixed_points,status");
    REQUIRE(std::getline(in, line));
    CHECK(line.substr(0, 4) == "1.5,");
    // Exactly 8 columns: 7 commas.
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    CHECK_FALSE(std::getline(in, line));
}

// ---------------------------------------------------------------------------
// Sxhh catalog
// ---------------------------------------------------------------------------

TEST_CASE("sxhh catalog: shape, labels, and the JSON round trip") {
    const SxhhCatalog cat = builtin_sxhh_catalog();
    CHECK(cat.schema_version == 1);
    REQUIRE(cat.templates.size() == 10);

    std::set<std::string> labels;
    for (const SxhhTemplate& t : cat.templates) labels.insert(t.label);
    CHECK(labels.size() == 10); // labels unique
    for (int i = 1; i <= 10; ++i)
        CHECK(labels.count("Sxhh" + std::to_string(i)) == 1);

    int matchable = 0;
    for (const SxhhTemplate& t : cat.templates) {
        if (!t.matchable) continue;
        ++matchable;
        REQUIRE(t.chain.size() >= 3);
        CHECK(t.chain.front() == "P4");
        CHECK(t.chain.back() == "P3");
    }
    CHECK(matchable == 8);

    const std::string text = sxhh_catalog_to_json(cat);
    const SxhhCatalog back = sxhh_catalog_from_json(text);
    CHECK(back.schema_version == cat.schema_version);
    REQUIRE(back.templates.size() == cat.templates.size());
    for (std::size_t i = 0; i < cat.templates.size(); ++i) {
        CHECK(back.templates[i].label == cat.templates[i].label);
        CHECK(back.templates[i].mu1 == cat.templates[i].mu1);
        CHECK(back.templates[i].chain == cat.templates[i].chain);
        CHECK(back.templates[i].line_singulars == cat.templates[i].line_singulars);
        CHECK(back.templates[i].matchable == cat.templates[i].matchable);
        CHECK(back.templates[i].notes == cat.templates[i].notes);
    }
    // Serialization is canonical: a second pass is byte-identical.
    CHECK(sxhh_catalog_to_json(back) == text);
}

TEST_CASE("sxhh catalog: shipped data file matches the built-in catalog byte-for-byte") {
    const std::string path = std::string(NATLAS_SOURCE_DIR) + "/data/sxhh_catalog.json";
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing " << path);
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == sxhh_catalog_to_json(builtin_sxhh_catalog()));
}

TEST_CASE("sxhh catalog: malformed JSON is rejected with context") {
    CHECK_THROWS_AS(sxhh_catalog_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(sxhh_catalog_from_json("{\"schema_version\": 2, \"templates\": []}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(sxhh_catalog_from_json("{\"templates\": []}"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

namespace {

RescalingParams mu(double m2, double m3) {
    RescalingParams p;
    p.mu1bar = 0.0;
    p.mu2bar = m2;
    p.mu3bar = m3;
    return p;
}

} // namespace

TEST_CASE("classifier: one saddle above a free line (single-saddle region)") {
    const SxhhSignature sig = classify_sxhh(mu(-1.0, 0.0));
    CHECK(sig.label == "Sxhh1");
    CHECK(sig.integrable_symmetric);
    CHECK(sig.chain == std::vector<std::string>{"P4", "saddle", "P3"});
    REQUIRE(sig.singular_points.size() == 1);
    CHECK(sig.singular_points[0].type == "saddle");
    CHECK(sig.singular_points[0].position[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sig.singular_points[0].position[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(sig.singular_points[0].on_line);
    // The line itself is a free connection from the right end to the left.
    bool line_edge = false;
    for (const SkeletonEdge& e : sig.connections)
        line_edge = line_edge || (e.from == "P2" && e.to == "P1" && e.via == "line");
    CHECK(line_edge);
    CHECK(sig.members.size() == 3);
}

TEST_CASE("classifier: two line saddles joined by the line segment") {
    SUBCASE("generic, focus below") {
        const SxhhSignature sig = classify_sxhh(mu(0.8, 0.1));
        CHECK(sig.label == "Sxhh5");
        CHECK_FALSE(sig.integrable_symmetric);
        CHECK(sig.chain ==
              std::vector<std::string>{"P4", "saddle", "line", "saddle", "P3"});
        REQUIRE(sig.singular_points.size() == 3);
        // Sorted by position: S- , the antisaddle below the line, S+.
        CHECK(sig.singular_points[0].type == "saddle");
        CHECK(sig.singular_points[0].on_line);
        CHECK(sig.singular_points[1].type == "focus");
        CHECK(sig.singular_points[1].stability == 1);
        CHECK(sig.singular_points[1].position[1] < 0);
        CHECK(sig.singular_points[2].type == "saddle");
        const double s = std::sqrt(2.0 * 0.8);
        CHECK(sig.singular_points[0].position[0] == doctest::Approx(-s).epsilon(1e-9));
        CHECK(sig.singular_points[2].position[0] == doctest::Approx(s).epsilon(1e-9));
    }
    SUBCASE("symmetric slice carries a center below the line") {
        const SxhhSignature sig = classify_sxhh(mu(0.5, 0.0));
        CHECK(sig.label == "Sxhh5");
        CHECK(sig.integrable_symmetric);
        REQUIRE(sig.singular_points.size() == 3);
        CHECK(sig.singular_points[1].type == "center");
        CHECK(sig.singular_points[1].stability == 0);
    }
}

TEST_CASE("classifier: line saddle plus line node under an off-line saddle") {
    SUBCASE("repelling node") {
        const SxhhSignature sig = classify_sxhh(mu(0.18, 0.9));
        CHECK(sig.label == "Sxhh6");
        CHECK(sig.chain == std::vector<std::string>{"P4", "saddle", "P3"});
        bool has_repelling_line_node = false;
        for (const SingularPointInfo& q : sig.singular_points)
            has_repelling_line_node =
                has_repelling_line_node ||
                (q.type == "node" && q.on_line && q.stability == 1);
        CHECK(has_repelling_line_node);
    }
    SUBCASE("attracting node") {
        const SxhhSignature sig = classify_sxhh(mu(0.18, -0.9));
        CHECK(sig.label == "Sxhh4");
        CHECK(sig.chain == std::vector<std::string>{"P4", "saddle", "P3"});
        bool has_attracting_line_node = false;
        for (const SingularPointInfo& q : sig.singular_points)
            has_attracting_line_node =
                has_attracting_line_node ||
                (q.type == "node" && q.on_line && q.stability == -1);
        CHECK(has_attracting_line_node);
    }
}

TEST_CASE("classifier: saddle-node on the line from a saddle/antisaddle collision") {
    SUBCASE("repelling saddle-node feeds the line into the right saddle") {
        const SxhhSignature sig = classify_sxhh(mu(0.5, 1.0));
        CHECK(sig.label == "Sxhh2");
        CHECK(sig.chain ==
              std::vector<std::string>{"P4", "saddle-node", "line", "saddle", "P3"});
        REQUIRE(sig.singular_points.size() == 2);
        CHECK(sig.singular_points[0].type == "saddle-node");
        CHECK(sig.singular_points[0].stability == 1);
        CHECK(sig.singular_points[1].type == "saddle");
    }
    SUBCASE("left saddle feeds the line into an attracting saddle-node") {
        const SxhhSignature sig = classify_sxhh(mu(0.5, -1.0));
        CHECK(sig.label == "Sxhh8");
        CHECK(sig.chain ==
              std::vector<std::string>{"P4", "saddle", "line", "saddle-node", "P3"});
        REQUIRE(sig.singular_points.size() == 2);
        CHECK(sig.singular_points[0].type == "saddle");
        CHECK(sig.singular_points[1].type == "saddle-node");
        CHECK(sig.singular_points[1].stability == -1);
    }
}

TEST_CASE("classifier: fully degenerate line point under an off-line saddle") {
    SUBCASE("attracting transverse direction") {
        const SxhhSignature sig = classify_sxhh(mu(0.0, -1.0));
        CHECK(sig.label == "Sxhh3");
        bool has_line_sn = false;
        for (const SingularPointInfo& q : sig.singular_points)
            has_line_sn =
                has_line_sn || (q.type == "saddle-node" && q.on_line && q.stability == -1);
        CHECK(has_line_sn);
        CHECK(sig.chain == std::vector<std::string>{"P4", "saddle", "P3"});
    }
    SUBCASE("repelling transverse direction") {
        const SxhhSignature sig = classify_sxhh(mu(0.0, 1.0));
        CHECK(sig.label == "Sxhh7");
        bool has_line_sn = false;
        for (const SingularPointInfo& q : sig.singular_points)
            has_line_sn =
                has_line_sn || (q.type == "saddle-node" && q.on_line && q.stability == 1);
        CHECK(has_line_sn);
    }
}

TEST_CASE("classifier: a broken line (mu1 != 0) still classifies by its chain") {
    RescalingParams p;
    p.mu1bar = 0.6;
    p.mu2bar = -0.64;
    p.mu3bar = 0.48;
    const SxhhSignature sig = classify_sxhh(p);
    CHECK_FALSE(sig.integrable_symmetric);
    // No invariant line, so no line edges at all.
    for (const SkeletonEdge& e : sig.connections) CHECK(e.via != "line");
    CHECK((sig.label == "Sxhh1" || sig.label == "Unclassified"));
}

TEST_CASE("classifier: starved of integration time it reports Unclassified") {
    ClassifyConfig cfg;
    cfg.tmax = 1e-3;
    const SxhhSignature sig = classify_sxhh(mu(-1.0, 0.0), cfg);
    CHECK(sig.label == "Unclassified");
    CHECK(sig.chain.empty());
    CHECK(sig.note.find("unresolved") != std::string::npos);
}

TEST_CASE("classifier: an absurd ambiguity guard turns a landing into a throw") {
    ClassifyConfig cfg;
    cfg.ambiguity_factor = 1e6;
    CHECK_THROWS_AS(classify_sxhh(mu(0.18, -0.9), cfg), UnresolvedConnection);
}

TEST_CASE("classifier: the rescaling exponent is pinned unless explicitly widened") {
    RescalingParams p = mu(-1.0, 0.0);
    p.a = -0.3;
    CHECK_THROWS_AS(classify_sxhh(p), std::invalid_argument);
    p.a = 0.5;
    CHECK_THROWS_AS(classify_sxhh(p), std::invalid_argument);
    ClassifyConfig cfg;
    cfg.allow_other_a = true;
    p.a = -0.3;
    const SxhhSignature sig = classify_sxhh(p, cfg);
    CHECK(sig.label == "Sxhh1"); // same topology, different exponent
    p.a = 0.5;
    CHECK_THROWS_AS(classify_sxhh(p, cfg), std::invalid_argument);
}

TEST_CASE("classifier: equator arc is always present and P4/P3 always participate") {
    for (const auto& [m2, m3] : {std::pair{-1.0, 0.0}, {0.5, 0.0}, {0.18, 0.9}}) {
        const SxhhSignature sig = classify_sxhh(mu(m2, m3));
        bool equator = false;
        for (const SkeletonEdge& e : sig.connections)
            equator = equator || (e.from == "P4" && e.to == "P3" && e.via == "equator");
        CHECK(equator);
        const auto& bp = sig.boundary_points;
        CHECK(std::find(bp.begin(), bp.end(), "P3") != bp.end());
        CHECK(std::find(bp.begin(), bp.end(), "P4") != bp.end());
    }
}

TEST_CASE("classifier: circle sweep stays inside the catalog and is stable under "
          "tolerance halving") {
    const int n = 50;
    const unsigned seed = 20260822u;
    const std::vector<SxhhSignature> sigs = classify_circle_sweep(n, seed);
    REQUIRE(sigs.size() == static_cast<std::size_t>(n));

    const std::set<std::string> allowed = {"Sxhh1", "Sxhh2", "Sxhh3", "Sxhh4", "Sxhh5",
                                           "Sxhh6", "Sxhh7", "Sxhh8", "Unclassified"};
    for (const SxhhSignature& s : sigs) CHECK(allowed.count(s.label) == 1);

    ClassifyConfig cfg;
    cfg.opts.tol = IntegrationOptions{}.tol / 2;
    const std::vector<SxhhSignature> again = classify_circle_sweep(n, seed, cfg);
    REQUIRE(again.size() == sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) CHECK(again[i].label == sigs[i].label);

    // The same seed reproduces the same labels identically.
    const std::vector<SxhhSignature> repeat = classify_circle_sweep(n, seed);
    for (std::size_t i = 0; i < sigs.size(); ++i) CHECK(repeat[i].label == sigs[i].label);
}
