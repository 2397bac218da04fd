// Command-line front end: classification of the family at its nilpotent
// point, phase portraits of the rescaled field, the desk-scale scan, and the
// numeric verification suites. Every report is JSON with a schema_version and
// the effective configuration echoed; data files are CSV/SVG with fixed
// layouts and no run-varying metadata, so identical invocations produce
// identical bytes.

#include "natlas/blowup.hpp"
#include "natlas/charts.hpp"
#include "natlas/errors.hpp"
#include "natlas/maps.hpp"
#include "natlas/svg.hpp"
#include "natlas/verify.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

using namespace natlas;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
}

void emit_report(const ordered_json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) write_file(out_path, text);
}

std::string rational_str(const Rational& r) { return r.str(); }

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int cmd_classify(double b_cap, double delta, double gamma, double tol,
                 const std::string& out_path) {
    const QuadraticParams q{rational_from_double(delta), rational_from_double(gamma),
                            rational_from_double(b_cap)};
    const NormalFormParams nf = normal_form_params(q); // rejects B <= 1
    const InfinityChart chart = localize_at_infinity(quadratic_from_params(q));

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["effective_config"] = {{"B", b_cap}, {"delta", delta}, {"gamma", gamma}, {"tol", tol}};
    rep["chart"] = {{"chart_id", chart.chart_id}, {"triple", chart.triple}};
    rep["normal_form"] = {
        {"a", {{"exact", rational_str(nf.a)}, {"value", to_double(nf.a)}}},
        {"b", {{"exact", rational_str(nf.b)}, {"value", to_double(nf.b)}}},
        {"eta", {{"exact", rational_str(nf.eta)}, {"value", to_double(nf.eta)}}},
    };
    rep["eta_nonzero"] = nf.eta != 0;
    // Generic nilpotent saddle: codimension 3; the b = 0 stratum (a = -1/2,
    // i.e. B = 3/2) raises it to 4.
    rep["codimension"] = nf.b == 0 ? 4 : 3;

    const InvariantParabola ip = invariant_parabola(q.b_cap, q.delta);
    rep["invariant_parabola"] = {
        {"gamma_tie", {{"exact", rational_str(ip.gamma)}, {"value", to_double(ip.gamma)}}},
        {"tied", q.gamma == ip.gamma},
    };
    if (q.gamma == ip.gamma) {
        rep["invariant_parabola"]["coefficients"] = {rational_str(ip.parabola.c2),
                                                     rational_str(ip.parabola.c1),
                                                     rational_str(ip.parabola.c0)};
    }
    emit_report(rep, out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// portrait
// ---------------------------------------------------------------------------

// Collects a clipped polyline of the orbit from `seed` in one time direction,
// stopping at the box boundary. Chunked so an escape keeps the partial path.
std::vector<std::array<double, 2>> orbit_path(const PolynomialField& f,
                                              const std::array<double, 2>& seed, TimeDir dir,
                                              double tmax, double clip,
                                              const IntegrationOptions& opts) {
    std::vector<std::array<double, 2>> path{seed};
    std::array<double, 2> cur = seed;
    const double chunk = 0.25;
    for (double t = 0; t < tmax; t += chunk) {
        Orbit orb;
        try {
            orb = integrate(f, cur, dir == TimeDir::Forward ? chunk : -chunk, opts);
        } catch (const Error&) {
            break; // blown up inside the chunk: keep what we have
        }
        bool escaped = false;
        for (const State& st : orb.states()) {
            path.push_back({st[0], st[1]});
            if (std::abs(st[0]) > clip || std::abs(st[1]) > clip) {
                escaped = true;
                break;
            }
        }
        if (escaped) break;
        cur = {orb.states().back()[0], orb.states().back()[1]};
    }
    return path;
}

// Closed level curves of the conserved quantity around the eye center
// (0, -mu2bar), one polyline per level, assembled from the two branches of
// y = (x^2/2 - mu2bar) +- sqrt((x^2/2 - mu2bar)^2 + 2h).  Only defined on the
// volume-preserving symmetric slice (mu1bar = mu3bar = 0, a = -1/2) with
// mu2bar > 0, where the levels between the center value and 0 are ovals.
std::vector<std::vector<std::array<double, 2>>> energy_contours(double mu2bar, int count) {
    std::vector<std::vector<std::array<double, 2>>> curves;
    const double h_center = -mu2bar * mu2bar / 2;
    const int samples = 200;
    for (int k = 1; k <= count; ++k) {
        const double h = h_center * k / (count + 1);
        const double xmax = std::sqrt(2 * (mu2bar - std::sqrt(-2 * h)));
        std::vector<std::array<double, 2>> upper, lower;
        for (int i = 0; i <= samples; ++i) {
            const double x = -xmax + 2 * xmax * i / samples;
            const double half = x * x / 2 - mu2bar;
            const double disc = std::max(0.0, half * half + 2 * h);
            upper.push_back({x, half + std::sqrt(disc)});
            lower.push_back({x, half - std::sqrt(disc)});
        }
        std::vector<std::array<double, 2>> curve = upper;
        curve.insert(curve.end(), lower.rbegin(), lower.rend());
        curve.push_back(curve.front()); // close the oval
        curves.push_back(std::move(curve));
    }
    return curves;
}

int cmd_portrait(const RescalingParams& p, int grid, unsigned seed, double tol,
                 const std::string& out_path, const std::string& format, int contours) {
    if (grid < 1) throw std::invalid_argument("portrait needs --grid >= 1, got " +
                                              std::to_string(grid));
    if (contours < 0)
        throw std::invalid_argument("portrait needs --contours >= 0, got " +
                                    std::to_string(contours));
    ClassifyConfig ccfg;
    ccfg.opts.tol = tol;
    ccfg.allow_other_a = true; // exploration is fine; a >= 0 still rejected
    const SxhhSignature sig = classify_sxhh(p, ccfg);
    if (contours > 0 && !(sig.integrable_symmetric && p.mu2bar > 0))
        throw std::invalid_argument(
            "--contours needs the conserved-quantity slice: a = -1/2, "
            "mu1bar = mu3bar = 0, mu2bar > 0");
    const PolynomialField f = rescaled_field(p);

    // Orbit lattice: grid x grid seeds across the core of the disc, each
    // integrated both ways. Deterministic given the config.
    const double span = 2.5, clip = 4.0, tmax = 6.0;
    IntegrationOptions opts{.tol = std::max(tol, 1e-9)};
    opts.blowup_bound = 1e6;
    std::vector<std::vector<std::array<double, 2>>> paths;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double x = grid == 1 ? 0.0 : -span + 2 * span * i / (grid - 1);
            const double y = grid == 1 ? 0.5 : -span + 2 * span * j / (grid - 1);
            for (const TimeDir dir : {TimeDir::Forward, TimeDir::Backward})
                paths.push_back(orbit_path(f, {x, y}, dir, tmax, clip, opts));
        }

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["effective_config"] = {{"a", p.a},     {"mu1bar", p.mu1bar}, {"mu2bar", p.mu2bar},
                               {"mu3bar", p.mu3bar}, {"grid", grid}, {"seed", seed},
                               {"tol", tol},   {"format", format},  {"contours", contours}};
    rep["label"] = sig.label;
    rep["chain"] = sig.chain;
    rep["integrable_symmetric"] = sig.integrable_symmetric;

    auto orbits_csv = [&paths] {
        std::string csv = "orbit,t_index,x,y\n";
        char buf[160];
        for (std::size_t k = 0; k < paths.size(); ++k)
            for (std::size_t i = 0; i < paths[k].size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", k, i, paths[k][i][0],
                              paths[k][i][1]);
                csv += buf;
            }
        return csv;
    };
    if (format == "csv") {
        write_file(out_path, orbits_csv());
        emit_report(rep, "");
        return 0;
    }

    // SVG assembly: world box [-L, L]^2 mapped to the canvas, y up.
    const double L = 3.0, W = 640.0;
    SvgCanvas svg(W, W);
    auto X = [&](double x) { return (x + L) / (2 * L) * W; };
    auto Y = [&](double y) { return (L - y) / (2 * L) * W; };

    // Boundary circle of the rescaling disc and the line ybar = 0.
    svg.add_circle(X(0), Y(0), 0.48 * W, "none", "#202020", 1.5);
    svg.add_line(X(-L), Y(0), X(L), Y(0), p.mu1bar == 0 ? "#202020" : "#a0a0a0", 1.0,
                 p.mu1bar == 0 ? "" : "6,4");
    // Dashed ovals of the conserved quantity, drawn under the orbits so an
    // orbit tracing its own level curve is visible as solid-on-dashed overlap.
    for (const auto& curve : energy_contours(p.mu2bar, contours)) {
        std::vector<std::array<double, 2>> px;
        px.reserve(curve.size());
        for (const auto& q : curve) px.push_back({X(q[0]), Y(q[1])});
        svg.add_polyline(px, "#c05a2e", 1.2, "5,3");
    }
    for (const auto& path : paths) {
        std::vector<std::array<double, 2>> px;
        px.reserve(path.size());
        for (const auto& q : path)
            if (std::abs(q[0]) <= L && std::abs(q[1]) <= L) px.push_back({X(q[0]), Y(q[1])});
        svg.add_polyline(px, "#4878a8", 0.8);
    }
    // The four escape corners sit on the boundary circle: P1 lower-left,
    // P2 lower-right, P3 upper-right, P4 upper-left.
    const double R = 0.48 * 2 * L, c45 = std::cos(kPi / 4);
    const std::array<std::pair<std::string, std::array<double, 2>>, 4> corners{{
        {"P1", {-R * c45, -R * c45}},
        {"P2", {R * c45, -R * c45}},
        {"P3", {R * c45, R * c45}},
        {"P4", {-R * c45, R * c45}},
    }};
    for (const auto& [name, pos] : corners) {
        svg.add_circle(X(pos[0]), Y(pos[1]), 4, "#000000");
        svg.add_text(X(pos[0]) + 6, Y(pos[1]) - 6, name, 13);
    }
    auto type_color = [](const std::string& t) -> std::string {
        if (t == "saddle") return "#c62828";
        if (t == "node") return "#2e7d32";
        if (t == "focus") return "#6a1b9a";
        if (t == "center") return "#00838f";
        return "#ef6c00"; // saddle-node
    };
    for (const SingularPointInfo& q : sig.singular_points) {
        svg.add_circle(X(q.position[0]), Y(q.position[1]), 5, type_color(q.type), "#000000",
                       1.0);
        svg.add_text(X(q.position[0]) + 7, Y(q.position[1]) + 4, q.type, 11, "#404040");
    }
    std::string caption = sig.label;
    if (!sig.chain.empty()) {
        caption += ":";
        for (const std::string& t : sig.chain) caption += " " + t;
    }
    svg.add_text(12, 20, caption, 14);
    write_file(out_path, svg.to_string());
    // The raw orbit samples always ship next to the picture so the drawing can
    // be checked or replotted without rerunning the integration.
    const std::string sidecar = out_path + ".orbits.csv";
    write_file(sidecar, orbits_csv());
    rep["orbits_csv"] = sidecar;
    emit_report(rep, "");
    return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

int cmd_scan(int grid, unsigned seed, double tol, const std::string& out_path,
             const std::string& format) {
    if (grid < 1) throw std::invalid_argument("scan needs --grid >= 1, got " +
                                              std::to_string(grid));
    CycleScanConfig cfg;
    cfg.b_values.clear();
    cfg.delta_values.clear();
    for (int i = 0; i < grid; ++i) {
        const double t = grid == 1 ? 0.5 : static_cast<double>(i) / (grid - 1);
        cfg.b_values.push_back(1.2 + 0.6 * t);
        cfg.delta_values.push_back(0.2 * t);
    }
    cfg.opts.tol = tol;
    const CycleScanResult res = cycle_scan(cfg);

    double max_relerr = 0.0;
    int bad = 0;
    for (const CycleScanRow& row : res.rows) {
        if (row.status != "ok") {
            ++bad;
            continue;
        }
        max_relerr = std::max(max_relerr, row.relerr);
    }

    if (format == "json") {
        ordered_json rows = ordered_json::array();
        for (const CycleScanRow& row : res.rows)
            rows.push_back({{"B", row.b_cap},
                            {"delta", row.delta},
                            {"gamma", row.gamma},
                            {"pprime_closed", row.pprime_closed},
                            {"pprime_numeric", row.pprime_numeric},
                            {"relerr", row.relerr},
                            {"fixed_points", row.fixed_points},
                            {"status", row.status}});
        ordered_json doc;
        doc["schema_version"] = 1;
        doc["rows"] = std::move(rows);
        write_file(out_path, doc.dump(2) + "\n");
    } else {
        write_file(out_path, cycle_scan_to_csv(res));
    }

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["effective_config"] = {{"grid", grid},
                               {"seed", seed},
                               {"tol", tol},
                               {"x_cutoff", cfg.x_cutoff},
                               {"format", format}};
    rep["rows"] = res.rows.size();
    rep["cells_with_errors"] = bad;
    rep["max_relerr"] = max_relerr;
    rep["out"] = out_path;
    emit_report(rep, "");
    return 0;
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

struct CheckList {
    ordered_json checks = ordered_json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, double measured, double bound) {
        checks.push_back(
            {{"name", name}, {"pass", pass}, {"measured", measured}, {"bound", bound}});
        all_pass = all_pass && pass;
    }
    void add_flag(const std::string& name, bool pass) {
        checks.push_back({{"name", name}, {"pass", pass}});
        all_pass = all_pass && pass;
    }
};

void suite_parabola(CheckList& cl, int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> num(1, 400), den(401, 800), dnum(-100, 100);
    int exact = 0, necessary = 0;
    for (int i = 0; i < n; ++i) {
        const Rational b_cap = Rational(1) + Rational(num(rng), den(rng));
        const Rational delta = Rational(dnum(rng), 400);
        const InvariantParabola ip = invariant_parabola(b_cap, delta);
        const QuadraticParams q{delta, ip.gamma, b_cap};
        if (parabola_invariance_residual(q, ip.parabola).terms().empty()) ++exact;
        const QuadraticParams off{delta, ip.gamma + Rational(1, 100), b_cap};
        if (!parabola_invariance_residual(off, ip.parabola).terms().empty()) ++necessary;
    }
    cl.add("exact_zero_residuals", exact == n, exact, n);
    cl.add("gamma_perturbation_breaks_invariance", necessary == n, necessary, n);
}

void suite_pprime(CheckList& cl) {
    double max_relerr = 0.0;
    for (const double b_cap : {1.2, 1.5, 1.8})
        for (const double delta : {0.05, 0.1, 0.2}) {
            const double closed = pprime_closed_form(b_cap, delta);
            const double numeric = pprime_numeric(b_cap, delta, 1e4);
            max_relerr = std::max(max_relerr, std::abs(numeric - closed) / closed);
        }
    cl.add("grid_max_relative_error", max_relerr < 1e-6, max_relerr, 1e-6);
    bool exact_one = true;
    for (const double b_cap : {1.2, 1.5, 1.8})
        exact_one = exact_one && pprime_numeric(b_cap, 0.0, 1e4) == 1.0;
    cl.add_flag("delta_zero_returns_exactly_one", exact_one);
}

void suite_table1(CheckList& cl) {
    double max_err = 0.0;
    for (const double a : {-0.3, -0.5, -0.7, -1.0}) {
        RescalingParams p;
        p.a = a;
        p.mu1bar = 0.17;
        p.mu2bar = -0.4;
        p.mu3bar = 0.31; // eigenvalues are mu-independent
        for (const CriticalPoint& cp : critical_points(a)) {
            const Field3 f3 =
                blown_up_field_3d(p, cp.chart_sign > 0 ? "x-positive" : "x-negative");
            Eigen::Matrix3d j;
            const std::array<double, 3> pt{0.0, 0.0, cp.ybar};
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k) j(i, k) = f3.comp[i].derivative(k).eval(pt);
            Eigen::EigenSolver<Eigen::Matrix3d> es(j);
            std::array<double, 3> got{};
            for (int i = 0; i < 3; ++i) got[i] = es.eigenvalues()[i].real();
            std::array<double, 3> want = cp.eigenvalues;
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            for (int i = 0; i < 3; ++i) max_err = std::max(max_err, std::abs(got[i] - want[i]));
        }
    }
    cl.add("max_eigenvalue_error", max_err < 1e-8, max_err, 1e-8);
}

void suite_hamiltonian(CheckList& cl, unsigned seed) {
    // Exact structure at a = -1/2: divergence of the rescaled field is the
    // constant mu3bar, and dH/dt = mu3bar * ybar * dH/dybar symbolically.
    {
        RescalingParams p;
        p.mu1bar = 0.3;
        p.mu2bar = -0.7;
        p.mu3bar = 0.45;
        const PolynomialField f = rescaled_field(p);
        const Poly2 div = divergence(f);
        cl.add_flag("divergence_is_constant_mu3",
                    div == Poly2::constant(rational_from_double(p.mu3bar)));
    }
    {
        using P5 = Poly<5>;
        P5 xb = P5::variable(0), yb = P5::variable(1);
        P5 m1 = P5::variable(2), m2 = P5::variable(3), m3 = P5::variable(4);
        P5 h = Rational(1, 2) * (yb * yb) - Rational(1, 2) * (xb * xb * yb) + m2 * yb -
               m1 * xb;
        P5 fx = yb - Rational(1, 2) * (xb * xb) + m2;
        P5 fy = m1 + m3 * yb + xb * yb;
        P5 dhdt = h.derivative(0) * fx + h.derivative(1) * fy;
        cl.add_flag("dH_dt_identity", dhdt == m3 * yb * h.derivative(1));
        cl.add_flag("mu3_zero_conserves_H_symbolically",
                    dhdt.substitute(4, P5()).is_zero());
    }
    // Numeric drift along 10 bounded orbits of the Hamiltonian slice.
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> um2(0.2, 0.5), uy(0.2, 1.8);
    double max_drift = 0.0;
    for (int k = 0; k < 10; ++k) {
        RescalingParams p;
        p.mu2bar = um2(rng);
        const PolynomialField f = rescaled_field(p);
        const double y0 = -uy(rng) * p.mu2bar; // inside the closed eye
        const Orbit orb = integrate(f, {0.0, y0}, 50.0, {.tol = 1e-10});
        const double h0 = hamiltonian(0.0, y0, p.mu1bar, p.mu2bar);
        const State& last = orb.states().back();
        const double h1 = hamiltonian(last[0], last[1], p.mu1bar, p.mu2bar);
        max_drift = std::max(max_drift, std::abs(h1 - h0));
    }
    cl.add("max_H_drift_t50", max_drift < 1e-8, max_drift, 1e-8);
}

void suite_compensator(CheckList& cl) {
    bool zero_at_one = true;
    for (const double alpha : {0.0, 0.3, -0.7, 1e-12, -1e-9, 0.999})
        zero_at_one = zero_at_one && compensator(1.0, alpha) == 0.0;
    cl.add_flag("omega_at_x1_is_exactly_zero", zero_at_one);

    double max_log_gap = 0.0;
    for (int i = 0; i <= 25; ++i) {
        const double x = 0.01 * std::pow(100.0, i / 25.0); // [0.01, 1]
        max_log_gap = std::max(max_log_gap, std::abs(compensator(x, 1e-12) + std::log(x)));
    }
    cl.add("small_alpha_matches_minus_log", max_log_gap < 1e-9, max_log_gap, 1e-9);

    double max_fd_gap = 0.0;
    const double alpha = 0.3;
    for (const double x : {0.05, 0.2, 0.5, 0.9}) {
        const double h = 1e-6 * x;
        const double fd = x * (compensator(x + h, alpha) - compensator(x - h, alpha)) / (2 * h);
        max_fd_gap = std::max(max_fd_gap, std::abs(fd + std::pow(x, -alpha)));
    }
    cl.add("x_domega_dx_is_minus_x_to_minus_alpha", max_fd_gap < 1e-6, max_fd_gap, 1e-6);
}

void suite_saddlenode(CheckList& cl) {
    const double lambda = 1.0;
    const std::vector<SaddleNodeData> data =
        saddle_node_central_eps(lambda, 0.0, {1e-2, 1e-3}, 1.0, {.tol = 1e-12});
    double max_rel = 0.0, max_lin = 0.0;
    for (const SaddleNodeData& d : data) {
        const double exact = saddle_node_eps_closed_form(lambda, d.eta, d.x0_cap);
        max_rel = std::max(max_rel, std::abs(d.eps - exact) / exact);
        max_lin = std::max(max_lin, d.linearity_defect);
    }
    cl.add("eps_vs_closed_form", max_rel < 1e-6, max_rel, 1e-6);
    cl.add("linearity_defect", max_lin < 1e-10, max_lin, 1e-10);

    const std::vector<SaddleNodeData> tail =
        saddle_node_central_eps(lambda, 0.0, {1e-4, 5e-5}, 1.0, {.tol = 1e-12});
    const double slope = (std::log(tail[0].eps) - std::log(tail[1].eps)) /
                         (1.0 / std::sqrt(tail[0].eta) - 1.0 / std::sqrt(tail[1].eta));
    const double rel = std::abs(slope / (-kPi * lambda) - 1.0);
    cl.add("log_eps_slope_vs_minus_pi_lambda", rel < 0.01, rel, 0.01);
}

void suite_dulac(CheckList& cl, int n, unsigned seed) {
    const Section entry({0.0, 1.0}, {0.0, -1.0}, 1.0);    // seeds (x, 1)
    const Section exit({1.0, 0.0}, {1.0, 0.0}, 2.0, +1);  // arrival coordinate = y
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> lam(0.5, 3.0);
    double max_err = 0.0;
    for (int k = 0; k < n; ++k) {
        const double l1 = lam(rng), l2 = lam(rng);
        PolynomialField f;
        f.px = rational_from_double(l1) * Poly2::variable(0);
        f.py = rational_from_double(-l2) * Poly2::variable(1);
        const DulacFit fit = dulac_exponent_fit(f, {0, 0}, entry, exit, half_decade_ladder(),
                                                1e3, {.tol = 1e-10});
        max_err = std::max(max_err, std::abs(fit.tau_hat - l2 / l1));
    }
    cl.add("max_tau_hat_error", max_err < 1e-4, max_err, 1e-4);
}

int cmd_verify(const std::string& suite, int n, unsigned seed, const std::string& out_path) {
    const std::set<std::string> known = {"parabola",    "pprime",     "table1", "hamiltonian",
                                         "compensator", "saddlenode", "dulac"};
    if (!known.count(suite))
        throw std::invalid_argument("unknown suite '" + suite +
                                    "' (parabola, pprime, table1, hamiltonian, compensator, "
                                    "saddlenode, dulac)");
    CheckList cl;
    if (suite == "parabola") suite_parabola(cl, n, seed);
    if (suite == "pprime") suite_pprime(cl);
    if (suite == "table1") suite_table1(cl);
    if (suite == "hamiltonian") suite_hamiltonian(cl, seed);
    if (suite == "compensator") suite_compensator(cl);
    if (suite == "saddlenode") suite_saddlenode(cl);
    if (suite == "dulac") suite_dulac(cl, std::min(n, 20), seed);

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["effective_config"] = {{"suite", suite}, {"n", n}, {"seed", seed}};
    rep["checks"] = cl.checks;
    rep["all_pass"] = cl.all_pass;
    emit_report(rep, out_path);
    return cl.all_pass ? 0 : 1;
}

// Applies `key = value` lines of an INI file to a subcommand's options,
// skipping comments, section headers, and any option already given on the
// command line — so the precedence is CLI > file > built-in defaults.
// (The top-level --config goes through CLI11 itself and expects sections.)
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    auto trim = [](std::string t) {
        const auto a = t.find_first_not_of(" \t\r");
        const auto b = t.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not `key = value`: " + line);
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'') &&
            val.back() == val.front())
            val = val.substr(1, val.size() - 2);
        CLI::Option* op = sub->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw std::invalid_argument("config key '" + key + "' is not an option of '" +
                                        sub->get_name() + "'");
        if (op->count() > 0) continue; // explicit command line wins
        op->add_result(val);
        op->run_callback();
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nilpotent-atlas: quadratic-family and blown-up-disc toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read option defaults from an INI/TOML file");

    double b_cap = 1.5, delta = 0.0, gamma = 0.0, tol = 1e-10, scan_tol = 1e-11;
    RescalingParams resc;
    int grid = 3, n = 100;
    unsigned seed = 7;
    std::string out_path, portrait_format = "svg", scan_format = "csv", suite;

    CLI::App* c = app.add_subcommand("classify",
                                     "Normal-form parameters and codimension at the nilpotent "
                                     "point at infinity");
    c->add_option("--B", b_cap, "Quadratic coefficient B (must exceed 1)");
    c->add_option("--delta", delta, "Trace parameter delta");
    c->add_option("--gamma", gamma, "Linear coefficient gamma");
    c->add_option("--tol", tol, "Tolerance echoed into the report");
    c->add_option("--out", out_path, "Also write the JSON report here");

    CLI::App* p = app.add_subcommand("portrait",
                                     "Phase portrait of the rescaled field on the blow-up disc");
    p->add_option("--a", resc.a, "Rescaled quadratic coefficient (a < 0)");
    p->add_option("--mu1bar", resc.mu1bar, "Unfolding parameter mu1bar");
    p->add_option("--mu2bar", resc.mu2bar, "Unfolding parameter mu2bar");
    p->add_option("--mu3bar", resc.mu3bar, "Unfolding parameter mu3bar");
    p->add_option("--grid", grid, "Orbit seed lattice size (grid x grid, >= 1)");
    p->add_option("--seed", seed, "Seed echoed into the report");
    p->add_option("--tol", tol, "Integration tolerance");
    p->add_option("--out", out_path, "Output file (SVG or CSV)")->required();
    p->add_option("--format", portrait_format, "svg (default) or csv")
        ->check(CLI::IsMember({"svg", "csv"}));

    CLI::App* s = app.add_subcommand("scan", "Desk-scale multiplier/fixed-point scan");
    s->add_option("--grid", grid, "Grid size per axis (B and delta)");
    s->add_option("--seed", seed, "Seed echoed into the report");
    s->add_option("--tol", scan_tol, "Integration tolerance for the return maps");
    s->add_option("--out", out_path, "Output data file")->required();
    s->add_option("--format", scan_format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* v = app.add_subcommand("verify", "Numeric verification suites");
    v->add_option("--suite", suite,
                  "parabola | pprime | table1 | hamiltonian | compensator | saddlenode | dulac")
        ->required();
    v->add_option("--n", n, "Sample count for randomized suites");
    v->add_option("--seed", seed, "Random seed for randomized suites");
    v->add_option("--out", out_path, "Also write the JSON report here");

    std::string sub_config;
    for (CLI::App* sub : {c, p, s, v})
        sub->add_option("--config", sub_config, "Read option defaults from an INI file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!sub_config.empty())
            for (CLI::App* sub : {c, p, s, v})
                if (sub->parsed()) apply_config_file(sub, sub_config);
        if (c->parsed()) return cmd_classify(b_cap, delta, gamma, tol, out_path);
        if (p->parsed()) return cmd_portrait(resc, grid, seed, tol, out_path, portrait_format);
        if (s->parsed()) return cmd_scan(grid, seed, scan_tol, out_path, scan_format);
        if (v->parsed()) return cmd_verify(suite, n, seed, out_path);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.category() == Error::Category::Validation ? 2 : 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2; // no subcommand (unreachable behind require_subcommand)
}
