// Application layer for the one-parabola quadratic family and the blown-up
// family-rescaling field: exact invariant-parabola construction, the return
// map multiplier around the parabola graphic (closed form and quadrature),
// a desk-scale parameter scan, and a topological classifier for the convex
// limit periodic sets of hh-type (the Sxhh catalog).

#pragma once

#include "natlas/blowup.hpp"
#include "natlas/field.hpp"
#include "natlas/integrate.hpp"

#include <array>
#include <string>
#include <vector>

namespace natlas {

// ---------------------------------------------------------------------------
// Invariant parabola
// ---------------------------------------------------------------------------

// y = c2 x^2 + c1 x + c0 with exact rational coefficients.
struct Parabola {
    Rational c2, c1, c0;
};

struct InvariantParabola {
    Parabola parabola;
    Rational gamma; // the unique gamma making the parabola invariant
};

// For the family dx/dt = delta x - y + B x^2, dy/dt = x + gamma y + x y,
// returns the parabola
//   y = (B - 1/2) x^2 + (2 - 1/B) delta x - (B + (1-2B) delta^2)/(2 B^2)
// together with gamma = (1-2B) delta / B, the parameter tie that makes the
// parabola an invariant curve. Exact in rational arithmetic.
// Throws ExcludedB for B in {0, 1/2} (the formulas degenerate).
InvariantParabola invariant_parabola(const Rational& b_cap, const Rational& delta);

// The defect of invariance: (dy/dt - p'(x) dx/dt) restricted to y = p(x),
// as an exact univariate polynomial in x. Identically zero iff the parabola
// is an invariant curve of the field.
Poly1 parabola_invariance_residual(const QuadraticParams& q, const Parabola& p);

// ---------------------------------------------------------------------------
// Return map multiplier around the parabola graphic
// ---------------------------------------------------------------------------
// The parabola, together with the point at infinity it passes through, forms
// a closed graphic. The derivative of the return map at the graphic is the
// exponential of the (principal value) divergence integral along the
// parabola. Both functions below measure it against the flow direction in
// which the graphic is stable, so a value < 1 means nearby orbits contract
// toward the graphic. Preconditions for both: b_cap >= 1 (std::invalid_argument
// otherwise) and 1 - B delta^2 > 0, i.e. the parabola carries no singular
// point (SingularOnParabola otherwise).

// Closed form exp(4 pi delta sqrt(B) (1-B) / sqrt(1 - B delta^2)).
double pprime_closed_form(double b_cap, double delta);

// The same multiplier from a panelled Gauss-Legendre quadrature of the
// divergence integral over |x| <= x_cutoff plus the analytic tail of the
// antiderivative beyond the window. The integrand is folded as
// g(x) + g(-x), so for delta = 0 the quadrature and the tail both vanish
// identically and the result is exactly 1. Requires x_cutoff >= 10.
double pprime_numeric(double b_cap, double delta, double x_cutoff = 1e4);

// The analytic tail alone: the contribution of |x| > x_cutoff to
// log(multiplier), evaluated from the closed antiderivative. Decays like
// 1/x_cutoff; useful for checking how fast the window captures the integral.
double pprime_log_tail(double b_cap, double delta, double x_cutoff);

// ---------------------------------------------------------------------------
// Desk-scale parameter scan
// ---------------------------------------------------------------------------

struct CycleScanConfig {
    std::vector<double> b_values = {1.2, 1.35, 1.5, 1.65, 1.8};
    std::vector<double> delta_values = {0.0, 0.05, 0.1, 0.15, 0.2};
    double x_cutoff = 1e4;
    // Section-coordinate annulus scanned for fixed points of the return map
    // toward the graphic. The section sits on the symmetry axis x = 0 with
    // coordinate 0 at the parabola vertex; the upper end is clamped below
    // the focus, where the return map toward the graphic is defined.
    double annulus_lo = 1e-3;
    double annulus_hi = 0.5;
    int annulus_samples = 7;
    // |multiplier - 1| above this margin is treated as decisively hyperbolic
    // (the scan then expects no fixed points in the annulus).
    double fixed_point_margin = 0.05;
    double tmax = 500;
    IntegrationOptions opts{.tol = 1e-11};
};

struct CycleScanRow {
    double b_cap = 0, delta = 0, gamma = 0;
    double pprime_closed = 0, pprime_numeric = 0, relerr = 0;
    int fixed_points = 0;      // sign changes of return(s) - s over the annulus
    std::string status = "ok"; // first per-cell error, cell results kept partial
};

struct CycleScanResult {
    std::vector<CycleScanRow> rows; // b-major, delta-minor grid order
};

// Runs the grid: per cell the exact gamma, both multiplier routes, their
// relative gap, and a fixed-point count for the return map on the annulus.
// Cells run in parallel; per-cell failures are recorded in `status`, never
// thrown. Cells violating b_cap > 1 or 1 - B delta^2 > 0 report an error
// status.
CycleScanResult cycle_scan(const CycleScanConfig& cfg = {});

// CSV with the fixed column order
//   B,delta,gamma,pprime_closed,pprime_numeric,relerr,fixed_points,status
std::string cycle_scan_to_csv(const CycleScanResult& r);

// ---------------------------------------------------------------------------
// Sxhh classification of the family-rescaling portrait
// ---------------------------------------------------------------------------
// The family-rescaling field (see rescaled_field) lives on a disc whose
// boundary circle carries the four corner points P1..P4: P4 (upper left)
// emits the orbits that sweep the disc and P3 (upper right) absorbs them;
// P1/P2 are the left/right ends of the line ybar = 0, which is invariant
// exactly when mu1bar = 0. A convex limit periodic set joins P4 to P3; the
// classifier reconstructs which interior singular points and which line /
// boundary arcs carry the lowest such connection and matches the result
// against a versioned catalog of skeleton templates (labels Sxhh1..Sxhh10).

struct SingularPointInfo {
    std::array<double, 2> position{};
    std::string type;   // "saddle", "node", "focus", "center", "saddle-node"
    int stability = 0;  // +1 repelling, -1 attracting, 0 saddle/center;
                        // for a saddle-node: the sign of its nonzero eigenvalue
    bool on_line = false; // sits on the invariant line ybar = 0
};

struct SkeletonEdge {
    std::string from, to; // "P1".."P4" or an interior point id "Q1", "Q2", ...
    std::string via;      // "orbit", "line", or "equator"
};

struct SxhhSignature {
    std::vector<SingularPointInfo> singular_points; // sorted by position
    std::vector<std::string> boundary_points;       // the P1..P4 that participate
    std::vector<SkeletonEdge> connections;
    // Interior chain of the lowest P4 -> P3 connection as type tokens,
    // e.g. {"P4", "saddle", "line", "saddle", "P3"}; empty when none found.
    std::vector<std::string> chain;
    std::string label = "Unclassified"; // catalog label, or "Unclassified"
    bool integrable_symmetric = false;  // mu1bar = mu3bar = 0 at a = -1/2
    std::vector<std::string> members;   // the a/b/c members of the family
    std::string note;
};

struct SxhhTemplate {
    std::string label;
    std::string mu1; // "zero", "nonzero", or "any"
    std::vector<std::string> chain;          // required interior chain tokens
    std::vector<std::string> line_singulars; // sorted "type:stability" tokens
    bool matchable = true; // documentation-only entries are never matched
    std::string notes;
};

struct SxhhCatalog {
    int schema_version = 1;
    std::vector<SxhhTemplate> templates;
};

// The catalog compiled into the library; data/sxhh_catalog.json ships the
// same content byte-for-byte (kept in sync by a test).
SxhhCatalog builtin_sxhh_catalog();
std::string sxhh_catalog_to_json(const SxhhCatalog& c);
SxhhCatalog sxhh_catalog_from_json(const std::string& text);

struct ClassifyConfig {
    double disc_radius = 40;      // |xbar| escape radius for separatrix rays
    double seed_offset = 1e-5;    // ray seed distance along hyperbolic eigenvectors
    double center_seed_offset = 3e-2; // larger seed for slow center directions
    double capture_radius = 5e-4; // landing distance at interior targets
    double ambiguity_factor = 3.0; // second target within factor*capture on a
                                   // landing -> UnresolvedConnection
    double degenerate_tol = 1e-8; // |det J| below this -> saddle-node
    double center_tol = 1e-9;     // |tr J| below this on an antisaddle -> center
    double tmax = 300;
    IntegrationOptions opts = {};
    bool allow_other_a = false; // accept a < 0 other than -1/2
};

// Classifies the portrait of rescaled_field(p). Separatrices of interior
// saddles and saddle-nodes are traced numerically to the boundary targets
// or to interior landings; the invariant-line and boundary arcs are attached
// from their exact one-dimensional dynamics. A portrait matching no template
// is labeled "Unclassified" (never force-fit); a landing whose two nearest
// targets are closer than ambiguity_factor * capture_radius throws
// UnresolvedConnection naming the ambiguous pair. Unresolved ray endpoints
// (e.g. under a too-small tmax) leave the chain empty, hence Unclassified.
// Throws std::invalid_argument unless p.a == -1/2 (or allow_other_a, any
// a < 0).
SxhhSignature classify_sxhh(const RescalingParams& p, const ClassifyConfig& cfg,
                            const SxhhCatalog& catalog);
SxhhSignature classify_sxhh(const RescalingParams& p, const ClassifyConfig& cfg = {});

// Classifies n points mu = (0, cos t, sin t) on the mu1bar = 0 circle of the
// parameter sphere, t drawn uniformly from a seeded generator. Samples run
// in parallel; a per-sample classification error is reported as an
// "Unclassified" signature carrying the error in `note`.
std::vector<SxhhSignature> classify_circle_sweep(int n, unsigned seed,
                                                 const ClassifyConfig& cfg = {});

} // namespace natlas
