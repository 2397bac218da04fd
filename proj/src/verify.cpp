#include "natlas/verify.hpp"

#include "natlas/errors.hpp"
#include "natlas/maps.hpp"
#include "natlas/threads.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

namespace natlas {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature (fixed order, cached)
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights; // positive, sum to 2
};

// Nodes are the roots of the Legendre polynomial, found by Newton iteration
// on the three-term recurrence from the Chebyshev-based initial guess; the
// weight at x is 2 / ((1 - x^2) P_n'(x)^2). Order 24 integrates smooth
// rational integrands on a unit panel far past double precision.
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        const int n = 24;
        GaussRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        for (int i = 1; i <= (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            r.nodes[i - 1] = -x; // ascending order
            r.nodes[n - i] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.weights[i - 1] = w;
            r.weights[n - i] = w;
        }
        return r;
    }();
    return rule;
}

// Integrates f over [a, b] with one fixed-order panel.
template <class F>
double gauss_panel(const F& f, double a, double b) {
    const GaussRule& r = gauss_rule();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * f(mid + half * r.nodes[i]);
    return acc * half;
}

// ---------------------------------------------------------------------------
// Divergence data along the parabola
// ---------------------------------------------------------------------------
// With gamma tied to (B, delta) the motion along the parabola reduces to
//   dx/dt = D(x) = x^2/2 + e x + cD,   e = (1-B) delta / B,
//   cD = ((1-2B) delta^2 + B) / (2 B^2),
// and the divergence restricted to the parabola is N(x) = (1+2B) x + e.
// The log-multiplier is the principal value of -integral N/D dx over the
// real line, taken in the flow direction that keeps the graphic stable.
// An antiderivative of N/D is
//   F(x) = (1+2B) log D(x) + Cp arctan(u(x)),
//   u(x) = (-B x + (B-1) delta) / sqrt(B (1 - B delta^2)),
//   Cp = 4 delta sqrt(B) (1-B) / sqrt(1 - B delta^2),
// and the full-line principal value equals -pi Cp.

struct ParabolaDivergence {
    double bq = 0; // 1 + 2B
    double e = 0;  // (1-B) delta / B
    double cD = 0; // constant term of D
    double cp = 0; // arctan coefficient
    double su = 0; // sqrt(B (1 - B delta^2)), denominator of u
    double b_cap = 0, delta = 0;

    double d_of(double x) const { return 0.5 * x * x + e * x + cD; }
    double n_of(double x) const { return bq * x + e; }
    // Folded integrand: the odd-in-leading-order parts cancel pairwise, so
    // for delta = 0 every evaluation is exactly zero.
    double folded(double x) const { return n_of(x) / d_of(x) + n_of(-x) / d_of(-x); }
    double antiderivative(double x) const {
        const double u = (-b_cap * x + (b_cap - 1.0) * delta) / su;
        return bq * std::log(d_of(x)) + cp * std::atan(u);
    }
};

ParabolaDivergence divergence_data(double b_cap, double delta) {
    if (!(b_cap >= 1.0))
        throw std::invalid_argument("multiplier formulas need B >= 1, got B = " +
                                    std::to_string(b_cap));
    const double disc = 1.0 - b_cap * delta * delta;
    if (!(disc > 0.0))
        throw SingularOnParabola("1 - B delta^2 = " + std::to_string(disc) +
                                 " <= 0: the parabola carries a singular point");
    ParabolaDivergence pd;
    pd.b_cap = b_cap;
    pd.delta = delta;
    pd.bq = 1.0 + 2.0 * b_cap;
    pd.e = (1.0 - b_cap) * delta / b_cap;
    pd.cD = ((1.0 - 2.0 * b_cap) * delta * delta + b_cap) / (2.0 * b_cap * b_cap);
    pd.su = std::sqrt(b_cap * disc);
    pd.cp = 4.0 * delta * std::sqrt(b_cap) * (1.0 - b_cap) / std::sqrt(disc);
    return pd;
}

void check_cutoff(double x_cutoff) {
    if (!(x_cutoff >= 10.0))
        throw std::invalid_argument("x_cutoff must be >= 10, got " + std::to_string(x_cutoff));
}

// Quadrature of the folded integrand over [0, c]: unit panel near the
// origin, then doubling panels so each spans less than one octave of x.
double folded_integral(const ParabolaDivergence& pd, double c) {
    std::vector<double> cuts = {0.0};
    double b = 1.0;
    while (b < c) {
        cuts.push_back(b);
        b *= 2.0;
    }
    cuts.push_back(c);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += gauss_panel([&](double x) { return pd.folded(x); }, cuts[i], cuts[i + 1]);
    return acc;
}

} // namespace

// ---------------------------------------------------------------------------
// Invariant parabola (exact)
// ---------------------------------------------------------------------------

InvariantParabola invariant_parabola(const Rational& b_cap, const Rational& delta) {
    if (b_cap == 0 || b_cap == Rational(1, 2))
        throw ExcludedB("B = " + b_cap.str() + " is excluded: no invariant parabola");
    const Rational one(1), two(2);
    InvariantParabola ip;
    ip.parabola.c2 = b_cap - Rational(1, 2);
    ip.parabola.c1 = (two - one / b_cap) * delta;
    ip.parabola.c0 = -(b_cap + (one - two * b_cap) * delta * delta) / (two * b_cap * b_cap);
    ip.gamma = (one - two * b_cap) * delta / b_cap;
    return ip;
}

Poly1 parabola_invariance_residual(const QuadraticParams& q, const Parabola& p) {
    const Poly2 graph = Poly2::monomial_var(0, 2, p.c2) + Poly2::monomial_var(0, 1, p.c1) +
                        Poly2::constant(p.c0);
    const Poly2 slope = graph.derivative(0);
    const PolynomialField f = quadratic_from_params(q);
    // Substitute y = p(x) into both components; the invariance defect is
    // ydot - p'(x) xdot along the graph.
    const Poly2 defect = f.py.substitute(1, graph) - slope * f.px.substitute(1, graph);
    Poly1 out;
    for (const auto& [e, c] : defect.terms())
        out = out + Poly1::monomial_var(0, e[0], c);
    return out;
}

// ---------------------------------------------------------------------------
// Multiplier
// ---------------------------------------------------------------------------

double pprime_closed_form(double b_cap, double delta) {
    const ParabolaDivergence pd = divergence_data(b_cap, delta);
    return std::exp(kPi * pd.cp);
}

double pprime_numeric(double b_cap, double delta, double x_cutoff) {
    const ParabolaDivergence pd = divergence_data(b_cap, delta);
    check_cutoff(x_cutoff);
    const double window = folded_integral(pd, x_cutoff);
    // The tail |x| > cutoff from the antiderivative: full-line value minus
    // the window it already accounts for.
    const double f_window = pd.antiderivative(x_cutoff) - pd.antiderivative(-x_cutoff);
    const double tail = -kPi * pd.cp - f_window;
    return std::exp(-(window + tail));
}

double pprime_log_tail(double b_cap, double delta, double x_cutoff) {
    const ParabolaDivergence pd = divergence_data(b_cap, delta);
    check_cutoff(x_cutoff);
    const double f_window = pd.antiderivative(x_cutoff) - pd.antiderivative(-x_cutoff);
    return f_window + kPi * pd.cp;
}

// ---------------------------------------------------------------------------
// Desk-scale scan
// ---------------------------------------------------------------------------

namespace {

void scan_cell(const CycleScanConfig& cfg, CycleScanRow& row) {
    const Rational br = rational_from_double(row.b_cap);
    const Rational dr = rational_from_double(row.delta);
    InvariantParabola ip;
    try {
        ip = invariant_parabola(br, dr);
        row.gamma = to_double(ip.gamma);
        row.pprime_closed = pprime_closed_form(row.b_cap, row.delta);
        row.pprime_numeric = pprime_numeric(row.b_cap, row.delta, cfg.x_cutoff);
        row.relerr = std::abs(row.pprime_numeric - row.pprime_closed) /
                     std::abs(row.pprime_closed);
    } catch (const std::exception& e) {
        row.pprime_closed = row.pprime_numeric = row.relerr =
            std::numeric_limits<double>::quiet_NaN();
        row.fixed_points = -1;
        row.status = e.what();
        return;
    }

    const QuadraticParams qp{dr, ip.gamma, br};
    const PolynomialField f = quadratic_from_params(qp);
    const double c0 = to_double(ip.parabola.c0); // parabola height at x = 0, negative here
    const double hi = std::min(cfg.annulus_hi, 0.8 * std::abs(c0));
    const double lo = cfg.annulus_lo;
    const Section sec({0.0, c0}, {1.0, 0.0}, hi + 1e-3);

    // Geometric ladder of seeds through the annulus; the return toward the
    // graphic runs against the flow, where the parabola side is stable.
    std::vector<double> disp;
    std::vector<bool> ok;
    for (int i = 0; i < cfg.annulus_samples; ++i) {
        const double t = cfg.annulus_samples == 1
                             ? 0.0
                             : static_cast<double>(i) / (cfg.annulus_samples - 1);
        const double s = lo * std::pow(hi / lo, t);
        try {
            const double out =
                return_map_point(f, sec, s, TimeDir::Backward, cfg.tmax, cfg.opts);
            disp.push_back(out - s);
            ok.push_back(true);
        } catch (const std::exception& e) {
            disp.push_back(std::numeric_limits<double>::quiet_NaN());
            ok.push_back(false);
            if (row.status == "ok") row.status = e.what();
        }
    }

    double max_abs = 0.0;
    int changes = 0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < disp.size(); ++i) {
        if (!ok[i]) continue;
        max_abs = std::max(max_abs, std::abs(disp[i]));
        if (!std::isnan(prev) && prev * disp[i] < 0.0) ++changes;
        prev = disp[i];
    }
    // Below resolution the displacement is roundoff and a sign-change count
    // would be noise; -1 marks the count as undefined (near-integrable cell).
    row.fixed_points = max_abs < 1e-7 ? -1 : changes;
}

} // namespace

CycleScanResult cycle_scan(const CycleScanConfig& cfg) {
    CycleScanResult res;
    res.rows.resize(cfg.b_values.size() * cfg.delta_values.size());
    const std::size_t nd = cfg.delta_values.size();
    for (std::size_t ib = 0; ib < cfg.b_values.size(); ++ib)
        for (std::size_t id = 0; id < nd; ++id) {
            CycleScanRow& row = res.rows[ib * nd + id];
            row.b_cap = cfg.b_values[ib];
            row.delta = cfg.delta_values[id];
        }
    parallel_for(res.rows.size(), [&](std::size_t i) { scan_cell(cfg, res.rows[i]); });
    return res;
}

std::string cycle_scan_to_csv(const CycleScanResult& r) {
    std::string out = "B,delta,gamma,pprime_closed,pprime_numeric,relerr,fixed_points,status\n";
    char buf[512];
    for (const CycleScanRow& row : r.rows) {
        std::string status = row.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,", row.b_cap,
                      row.delta, row.gamma, row.pprime_closed, row.pprime_numeric, row.relerr,
                      row.fixed_points);
        out += buf;
        out += status;
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sxhh catalog
// ---------------------------------------------------------------------------

SxhhCatalog builtin_sxhh_catalog() {
    SxhhCatalog c;
    c.schema_version = 1;
    auto add = [&](std::string label, std::string mu1, std::vector<std::string> chain,
                   std::vector<std::string> line, bool matchable, std::string notes) {
        c.templates.push_back({std::move(label), std::move(mu1), std::move(chain),
                               std::move(line), matchable, std::move(notes)});
    };
    add("Sxhh1", "any", {"P4", "saddle", "P3"}, {}, true,
        "one interior saddle off the line carries the lower connection; the line "
        "(when invariant) is a free boundary arc");
    add("Sxhh2", "zero", {"P4", "saddle-node", "line", "saddle", "P3"},
        {"saddle-node:+1", "saddle:0"}, true,
        "repelling saddle-node on the line feeds the line segment into a line saddle");
    add("Sxhh3", "zero", {"P4", "saddle", "P3"}, {"saddle-node:-1"}, true,
        "degenerate saddle-node at the line (attracting transverse direction) below "
        "an interior saddle that carries the connection");
    add("Sxhh4", "zero", {"P4", "saddle", "P3"}, {"node:-1", "saddle:0"}, true,
        "line saddle and attracting line node below an interior saddle that carries "
        "the connection");
    add("Sxhh5", "zero", {"P4", "saddle", "line", "saddle", "P3"},
        {"saddle:0", "saddle:0"}, true,
        "two line saddles joined by the invariant-line segment; integrable and "
        "symmetric on the mu3bar = 0 slice");
    add("Sxhh6", "zero", {"P4", "saddle", "P3"}, {"node:+1", "saddle:0"}, true,
        "line saddle and repelling line node below an interior saddle that carries "
        "the connection");
    add("Sxhh7", "zero", {"P4", "saddle", "P3"}, {"saddle-node:+1"}, true,
        "degenerate saddle-node at the line (repelling transverse direction) below "
        "an interior saddle that carries the connection");
    add("Sxhh8", "zero", {"P4", "saddle", "line", "saddle-node", "P3"},
        {"saddle-node:-1", "saddle:0"}, true,
        "line saddle feeds the line segment into an attracting saddle-node on the line");
    add("Sxhh9", "nonzero", {}, {}, false,
        "non-invariant-line variant; portrait template not encoded, documentation only");
    add("Sxhh10", "nonzero", {}, {}, false,
        "non-invariant-line variant; portrait template not encoded, documentation only");
    return c;
}

std::string sxhh_catalog_to_json(const SxhhCatalog& c) {
    nlohmann::ordered_json j;
    j["schema_version"] = c.schema_version;
    j["templates"] = nlohmann::ordered_json::array();
    for (const SxhhTemplate& t : c.templates) {
        nlohmann::ordered_json jt;
        jt["label"] = t.label;
        jt["mu1"] = t.mu1;
        jt["chain"] = t.chain;
        jt["line_singulars"] = t.line_singulars;
        jt["matchable"] = t.matchable;
        jt["notes"] = t.notes;
        j["templates"].push_back(std::move(jt));
    }
    return j.dump(2) + "\n";
}

SxhhCatalog sxhh_catalog_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("catalog JSON parse error: ") + e.what());
    }
    SxhhCatalog c;
    try {
        c.schema_version = j.at("schema_version").get<int>();
        if (c.schema_version != 1)
            throw std::invalid_argument("unsupported catalog schema_version " +
                                        std::to_string(c.schema_version));
        for (const auto& jt : j.at("templates")) {
            SxhhTemplate t;
            t.label = jt.at("label").get<std::string>();
            t.mu1 = jt.at("mu1").get<std::string>();
            t.chain = jt.at("chain").get<std::vector<std::string>>();
            t.line_singulars = jt.at("line_singulars").get<std::vector<std::string>>();
            t.matchable = jt.at("matchable").get<bool>();
            t.notes = jt.at("notes").get<std::string>();
            c.templates.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("catalog JSON shape error: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

namespace {

struct InteriorPoint {
    std::array<double, 2> pos{};
    std::string id;
    SingularPointInfo info;
    Eigen::Matrix2d jac;
};

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// A unit null vector of a (near-)singular 2x2 matrix, from whichever row is
// better conditioned.
std::array<double, 2> null_direction(const Eigen::Matrix2d& m) {
    std::array<double, 2> v{};
    if (std::hypot(m(0, 0), m(0, 1)) >= std::hypot(m(1, 0), m(1, 1)))
        v = {m(0, 1), -m(0, 0)};
    else
        v = {m(1, 1), -m(1, 0)};
    const double n = std::hypot(v[0], v[1]);
    if (n == 0.0) return {1.0, 0.0};
    return {v[0] / n, v[1] / n};
}

void type_point(const ClassifyConfig& cfg, InteriorPoint& p) {
    const double tr = p.jac.trace();
    const double det = p.jac.determinant();
    if (std::abs(det) <= cfg.degenerate_tol) {
        p.info.type = "saddle-node";
        p.info.stability = sign_of(tr);
    } else if (det < 0.0) {
        p.info.type = "saddle";
        p.info.stability = 0;
    } else if (std::abs(tr) <= cfg.center_tol) {
        p.info.type = "center";
        p.info.stability = 0;
    } else {
        p.info.type = tr * tr - 4.0 * det >= 0.0 ? "node" : "focus";
        p.info.stability = sign_of(tr);
    }
}

// Where an orbit that leaves the disc is heading. The velocity (taken in
// the traversal direction) disambiguates: far right-moving states ride the
// parabolic directions, far left-moving states hug low heights, and the
// vertical triggers pick the upper or lower boundary arc. Returns "" when
// the state is beyond the radius but still moving inward (not an escape).
std::string escape_target(const PolynomialField& f, const std::array<double, 2>& s,
                          TimeDir dir, double radius, bool force) {
    const std::array<double, 2> vel0 = eval_field(f, s);
    const double sgn = dir == TimeDir::Forward ? 1.0 : -1.0;
    const double vx = sgn * vel0[0], vy = sgn * vel0[1];
    const double r2 = radius * radius;
    const bool y_out = std::abs(s[1]) >= r2 && s[1] * vy > 0.0;
    const bool x_out = std::abs(s[0]) >= radius && s[0] * vx > 0.0;
    if (y_out || (force && std::abs(vy) >= std::abs(vx) && s[1] * vy > 0.0)) {
        if (vy > 0.0) return dir == TimeDir::Forward ? "P3" : "P4";
        return dir == TimeDir::Forward ? "P1" : "P2";
    }
    if (x_out || (force && s[0] * vx > 0.0)) {
        if (vx > 0.0) return dir == TimeDir::Forward ? "P3" : "P2";
        return dir == TimeDir::Forward ? "P1" : "P4";
    }
    return "";
}

// Traces one separatrix ray to its target: an interior landing (by id), a
// boundary corner P1..P4, or "unknown" when tmax runs out. Integration runs
// in bounded chunks so escapes are read off recorded states; a hard blowup
// inside a chunk is itself an escape, classified from the last good state.
std::string trace_ray(const PolynomialField& f, const std::vector<InteriorPoint>& pts,
                      int source, std::array<double, 2> seed, TimeDir dir,
                      const ClassifyConfig& cfg) {
    const double chunk = 0.25;
    const double cap2 = cfg.capture_radius * cfg.capture_radius;
    double elapsed = 0.0;
    std::array<double, 2> cur = seed;
    IntegrationOptions opts = cfg.opts;
    while (elapsed < cfg.tmax) {
        Orbit orb;
        try {
            orb = integrate(f, cur, dir == TimeDir::Forward ? chunk : -chunk, opts);
        } catch (const BlowupDetected&) {
            const std::string t = escape_target(f, cur, dir, cfg.disc_radius, true);
            return t.empty() ? "unknown" : t;
        }
        for (const State& st : orb.states()) {
            const std::array<double, 2> p{st[0], st[1]};
            // Landing test against every interior point except the source.
            int nearest = -1, second = -1;
            double dn = std::numeric_limits<double>::infinity(), ds = dn;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (static_cast<int>(j) == source) continue;
                const double dx = p[0] - pts[j].pos[0], dy = p[1] - pts[j].pos[1];
                const double d2 = dx * dx + dy * dy;
                if (d2 < dn) {
                    ds = dn;
                    second = nearest;
                    dn = d2;
                    nearest = static_cast<int>(j);
                } else if (d2 < ds) {
                    ds = d2;
                    second = static_cast<int>(j);
                }
            }
            if (nearest >= 0 && dn <= cap2) {
                const double guard = cfg.ambiguity_factor * cfg.capture_radius;
                if (second >= 0 && ds <= guard * guard)
                    throw UnresolvedConnection(
                        "separatrix landing ambiguous between " + pts[nearest].id + " and " +
                        pts[second].id + " (both within " + std::to_string(guard) + ")");
                return pts[nearest].id;
            }
            if (std::abs(p[0]) >= cfg.disc_radius ||
                std::abs(p[1]) >= cfg.disc_radius * cfg.disc_radius) {
                const std::string t = escape_target(f, p, dir, cfg.disc_radius, false);
                if (!t.empty()) return t;
            }
        }
        cur = {orb.states().back()[0], orb.states().back()[1]};
        elapsed += chunk;
    }
    return "unknown";
}

struct EdgeSet {
    std::vector<SkeletonEdge> edges;
    void add(std::string from, std::string to, std::string via) {
        for (const SkeletonEdge& e : edges)
            if (e.from == from && e.to == to && e.via == via) return;
        edges.push_back({std::move(from), std::move(to), std::move(via)});
    }
};

bool is_corner(const std::string& id) {
    return id.size() == 2 && id[0] == 'P';
}

} // namespace

SxhhSignature classify_sxhh(const RescalingParams& p, const ClassifyConfig& cfg,
                            const SxhhCatalog& catalog) {
    if (!(p.a < 0.0))
        throw std::invalid_argument("classification needs a < 0, got a = " +
                                    std::to_string(p.a));
    if (!cfg.allow_other_a && p.a != -0.5)
        throw std::invalid_argument(
            "classification is calibrated for a = -1/2; set allow_other_a to override");

    const PolynomialField f = rescaled_field(p);
    const bool mu1_zero = p.mu1bar == 0.0;
    SxhhSignature sig;
    sig.integrable_symmetric = mu1_zero && p.mu3bar == 0.0 && p.a == -0.5;

    // --- interior singular points ------------------------------------------
    std::vector<std::array<double, 2>> raw;
    if (mu1_zero) {
        // On-line roots of a x^2 + mu2 = 0 plus the off-line point with
        // mu3 + x = 0.
        const double s2 = -p.mu2bar / p.a;
        if (s2 > 0.0) {
            const double s = std::sqrt(s2);
            raw.push_back({-s, 0.0});
            raw.push_back({s, 0.0});
        } else if (s2 == 0.0) {
            raw.push_back({0.0, 0.0});
        }
        const double yc = -(p.a * p.mu3bar * p.mu3bar + p.mu2bar);
        raw.push_back({-p.mu3bar, yc});
    } else {
        // Eliminating ybar = -mu1 / (mu3 + x) from xdot = 0 leaves the cubic
        // a x^3 + a mu3 x^2 + mu2 x + (mu2 mu3 - mu1) = 0; its real roots are
        // the abscissas. Companion-matrix eigenvalues find them all.
        Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
        comp(1, 0) = 1.0;
        comp(2, 1) = 1.0;
        comp(0, 2) = -(p.mu2bar * p.mu3bar - p.mu1bar) / p.a;
        comp(1, 2) = -p.mu2bar / p.a;
        comp(2, 2) = -p.mu3bar;
        const Eigen::Vector3cd roots = comp.eigenvalues();
        for (int i = 0; i < 3; ++i) {
            if (std::abs(roots[i].imag()) > 1e-9 * (1.0 + std::abs(roots[i]))) continue;
            const double x = roots[i].real();
            if (std::abs(p.mu3bar + x) < 1e-12) continue; // no finite ybar there
            raw.push_back({x, -p.mu1bar / (p.mu3bar + x)});
        }
    }
    // Merge coincident points (collisions produce degenerate single points).
    std::vector<std::array<double, 2>> positions;
    for (const auto& q : raw) {
        bool dup = false;
        for (const auto& r : positions)
            dup = dup || std::hypot(q[0] - r[0], q[1] - r[1]) < 1e-9;
        if (!dup) positions.push_back(q);
    }
    std::sort(positions.begin(), positions.end(), [](const auto& a, const auto& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });

    std::vector<InteriorPoint> pts(positions.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].pos = positions[i];
        pts[i].id = "Q" + std::to_string(i + 1);
        pts[i].jac = jacobian(f, positions[i]);
        pts[i].info.position = positions[i];
        pts[i].info.on_line = mu1_zero && std::abs(positions[i][1]) <= 1e-10;
        type_point(cfg, pts[i]);
    }
    for (const InteriorPoint& q : pts) sig.singular_points.push_back(q.info);

    // --- separatrix rays ----------------------------------------------------
    EdgeSet edges;
    std::vector<std::string> unresolved;
    auto record = [&](int src, const std::string& target, TimeDir dir) {
        if (target == "unknown") {
            unresolved.push_back(pts[src].id);
            return;
        }
        if (dir == TimeDir::Forward)
            edges.add(pts[src].id, target, "orbit");
        else
            edges.add(target, pts[src].id, "orbit");
    };
    const double line_dir_tol = 1e-6;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const InteriorPoint& q = pts[i];
        if (q.info.type == "saddle") {
            const Eigen::EigenSolver<Eigen::Matrix2d> es(q.jac);
            for (int k = 0; k < 2; ++k) {
                const double lam = es.eigenvalues()[k].real();
                Eigen::Vector2d v = es.eigenvectors().col(k).real();
                v.normalize();
                // On-line saddles: the line-aligned pair is carried by the
                // exact one-dimensional line dynamics instead.
                if (q.info.on_line && std::abs(v[1]) < line_dir_tol) continue;
                const TimeDir dir = lam > 0 ? TimeDir::Forward : TimeDir::Backward;
                for (const double sgn : {1.0, -1.0}) {
                    const std::array<double, 2> seed{q.pos[0] + sgn * cfg.seed_offset * v[0],
                                                     q.pos[1] + sgn * cfg.seed_offset * v[1]};
                    record(static_cast<int>(i),
                           trace_ray(f, pts, static_cast<int>(i), seed, dir, cfg), dir);
                }
            }
        } else if (q.info.type == "saddle-node") {
            const double tr = q.jac.trace();
            // Hyperbolic direction: eigenvector of the nonzero eigenvalue.
            const std::array<double, 2> vh =
                null_direction(q.jac - tr * Eigen::Matrix2d::Identity());
            if (!(q.info.on_line && std::abs(vh[1]) < line_dir_tol) && tr != 0.0) {
                const TimeDir dir = tr > 0 ? TimeDir::Forward : TimeDir::Backward;
                for (const double sgn : {1.0, -1.0}) {
                    const std::array<double, 2> seed{q.pos[0] + sgn * cfg.seed_offset * vh[0],
                                                     q.pos[1] + sgn * cfg.seed_offset * vh[1]};
                    record(static_cast<int>(i),
                           trace_ray(f, pts, static_cast<int>(i), seed, dir, cfg), dir);
                }
            }
            // Center direction: slow quadratic dynamics, traced both ways
            // from a larger seed.
            const std::array<double, 2> vc = null_direction(q.jac);
            if (!(q.info.on_line && std::abs(vc[1]) < line_dir_tol)) {
                for (const double sgn : {1.0, -1.0}) {
                    const std::array<double, 2> seed{
                        q.pos[0] + sgn * cfg.center_seed_offset * vc[0],
                        q.pos[1] + sgn * cfg.center_seed_offset * vc[1]};
                    for (const TimeDir dir : {TimeDir::Forward, TimeDir::Backward})
                        record(static_cast<int>(i),
                               trace_ray(f, pts, static_cast<int>(i), seed, dir, cfg), dir);
                }
            }
        }
    }

    // --- invariant-line edges ----------------------------------------------
    if (mu1_zero) {
        std::vector<std::pair<double, std::string>> line_pts;
        for (const InteriorPoint& q : pts)
            if (q.info.on_line) line_pts.push_back({q.pos[0], q.id});
        std::sort(line_pts.begin(), line_pts.end());
        auto line_speed = [&](double x) { return p.a * x * x + p.mu2bar; };
        auto link = [&](const std::string& left, const std::string& right, double v) {
            if (v > 0.0)
                edges.add(left, right, "line");
            else if (v < 0.0)
                edges.add(right, left, "line");
        };
        if (line_pts.empty()) {
            link("P1", "P2", line_speed(0.0));
        } else {
            link("P1", line_pts.front().second, line_speed(line_pts.front().first - 1.0));
            for (std::size_t i = 0; i + 1 < line_pts.size(); ++i)
                link(line_pts[i].second, line_pts[i + 1].second,
                     line_speed(0.5 * (line_pts[i].first + line_pts[i + 1].first)));
            link(line_pts.back().second, "P2", line_speed(line_pts.back().first + 1.0));
        }
    }

    // --- chain: shortest interior P4 -> P3 route ---------------------------
    // Breadth-first over the orbit and line edges; corners other than the
    // endpoints never serve as through-points. Shortest length keeps the
    // chain on the structural connection rather than on spurious edges from
    // exponentially close passages.
    std::vector<std::string> order;
    std::vector<int> parent_edge;
    {
        std::deque<std::string> queue;
        std::vector<std::string> visited = {"P4"};
        std::vector<int> via(1, -1);
        queue.push_back("P4");
        auto seen = [&](const std::string& n) {
            return std::find(visited.begin(), visited.end(), n) != visited.end();
        };
        int goal = -1;
        while (!queue.empty() && goal < 0) {
            const std::string cur = queue.front();
            queue.pop_front();
            for (std::size_t ei = 0; ei < edges.edges.size(); ++ei) {
                const SkeletonEdge& e = edges.edges[ei];
                if (e.from != cur || seen(e.to)) continue;
                if (is_corner(e.to) && e.to != "P3") continue;
                visited.push_back(e.to);
                via.push_back(static_cast<int>(ei));
                if (e.to == "P3") {
                    goal = static_cast<int>(visited.size()) - 1;
                    break;
                }
                queue.push_back(e.to);
            }
        }
        if (goal >= 0) {
            // Reconstruct the edge path back to P4.
            std::vector<int> path;
            int node = goal;
            while (via[node] >= 0) {
                path.push_back(via[node]);
                const std::string& prev = edges.edges[via[node]].from;
                node = static_cast<int>(
                    std::find(visited.begin(), visited.end(), prev) - visited.begin());
            }
            std::reverse(path.begin(), path.end());
            sig.chain.push_back("P4");
            for (const int ei : path) {
                const SkeletonEdge& e = edges.edges[ei];
                if (e.via == "line") sig.chain.push_back("line");
                if (is_corner(e.to)) {
                    sig.chain.push_back(e.to);
                } else {
                    for (const InteriorPoint& q : pts)
                        if (q.id == e.to) sig.chain.push_back(q.info.type);
                }
            }
        }
    }

    edges.add("P4", "P3", "equator");
    sig.connections = edges.edges;
    for (const char* corner : {"P1", "P2", "P3", "P4"})
        for (const SkeletonEdge& e : edges.edges)
            if (e.from == corner || e.to == corner) {
                sig.boundary_points.push_back(corner);
                break;
            }

    if (!unresolved.empty()) {
        sig.note = "unresolved separatrix ray(s) from:";
        for (const std::string& id : unresolved) sig.note += " " + id;
    }

    // --- catalog match ------------------------------------------------------
    std::vector<std::string> line_tokens;
    for (const InteriorPoint& q : pts)
        if (q.info.on_line)
            line_tokens.push_back(q.info.type + ":" +
                                  (q.info.stability > 0
                                       ? "+1"
                                       : (q.info.stability < 0 ? "-1" : "0")));
    std::sort(line_tokens.begin(), line_tokens.end());
    if (!sig.chain.empty()) {
        for (const SxhhTemplate& t : catalog.templates) {
            if (!t.matchable) continue;
            if (t.mu1 == "zero" && !mu1_zero) continue;
            if (t.mu1 == "nonzero" && mu1_zero) continue;
            if (t.chain != sig.chain) continue;
            if (mu1_zero && t.line_singulars != line_tokens) continue;
            sig.label = t.label;
            break;
        }
    }

    sig.members.push_back("a: upper boundary, the equator arc from P4 to P3");
    if (!sig.chain.empty()) {
        sig.members.push_back("b: intermediate orbits sweeping from P4 to P3");
        std::string c = "c: lower boundary through";
        for (std::size_t i = 1; i + 1 < sig.chain.size(); ++i) c += " " + sig.chain[i];
        sig.members.push_back(c);
    }
    return sig;
}

SxhhSignature classify_sxhh(const RescalingParams& p, const ClassifyConfig& cfg) {
    return classify_sxhh(p, cfg, builtin_sxhh_catalog());
}

std::vector<SxhhSignature> classify_circle_sweep(int n, unsigned seed,
                                                 const ClassifyConfig& cfg) {
    if (n <= 0) throw std::invalid_argument("sweep needs n > 0");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::vector<double> thetas(static_cast<std::size_t>(n));
    for (double& t : thetas) t = angle(rng);

    const SxhhCatalog catalog = builtin_sxhh_catalog();
    std::vector<SxhhSignature> out(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t i) {
        RescalingParams p;
        p.mu1bar = 0.0;
        p.mu2bar = std::cos(thetas[i]);
        p.mu3bar = std::sin(thetas[i]);
        try {
            out[i] = classify_sxhh(p, cfg, catalog);
        } catch (const Error& e) {
            out[i] = SxhhSignature{};
            out[i].note = e.what();
        }
    });
    return out;
}

} // namespace natlas
