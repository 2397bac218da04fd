#pragma once

#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "natlas/field.hpp"
#include "natlas/integrate.hpp"

namespace natlas {

// One evaluation of a section-to-section map.  `input` and `output` are
// section coordinates (see Section::coordinate); `flight_time` is physical
// time, negative for backward flights.  When the orbit fails to reach the
// target section the sample carries the failure code in `status` and NaN
// data instead of aborting the whole batch.
struct SectionMapSample {
    double input = 0.0;
    double output = std::numeric_limits<double>::quiet_NaN();
    double flight_time = std::numeric_limits<double>::quiet_NaN();
    std::string entry;  // label of the section the sample departs from
    std::string exit;   // label of the section it arrives at
    std::string status = "ok";
};

// Batch of samples, ordered by input.  `monotone` reports whether the outputs
// of the successful samples are strictly monotone (increasing or decreasing);
// a regular flow box between transversals must produce a monotone batch, so a
// false value flags a fold, a missed crossing, or a bad section choice.
struct SampleBatch {
    std::vector<SectionMapSample> samples;
    bool monotone = true;
};

// Serialize samples as CSV: header `input,output,flight_time,status` then one
// row per sample, full double precision.  Failed samples print `nan`.
std::string samples_to_csv(const std::vector<SectionMapSample>& samples);

// Section-to-section transition map.  Seeds the orbit at `from.point_at(s)`
// for each input s, flows in direction `dir` until the first admissible
// crossing of `to`, and records the arrival coordinate.  Samples are
// evaluated in parallel (NILPOTENT_ATLAS_THREADS) with deterministic output
// ordering.  Inputs are sorted ascending before evaluation.
SampleBatch transition_map(const PolynomialField& f, const Section& from, const Section& to,
                           std::vector<double> inputs, TimeDir dir = TimeDir::Forward,
                           double tmax = 1e3, const IntegrationOptions& opts = {},
                           const std::string& entry_label = "from",
                           const std::string& exit_label = "to");

// First-return map of a single section.  Same contract as transition_map with
// `to == from`; the crossing detector ignores the departure itself, so the
// recorded arrival is the genuine first return.  Samples that never return
// within `tmax` get status "NoReturn".  `fixed_point_brackets` lists every
// consecutive pair of successful inputs across which output - input changes
// sign (candidate periodic orbits).
struct ReturnMapResult {
    std::vector<SectionMapSample> samples;
    bool monotone = true;
    std::vector<std::pair<double, double>> fixed_point_brackets;
};

ReturnMapResult return_map(const PolynomialField& f, const Section& s, std::vector<double> inputs,
                           TimeDir dir = TimeDir::Forward, double tmax = 1e3,
                           const IntegrationOptions& opts = {});

// Single evaluation of the first-return map; throws on failure instead of
// recording a status.
double return_map_point(const PolynomialField& f, const Section& s, double input,
                        TimeDir dir = TimeDir::Forward, double tmax = 1e3,
                        const IntegrationOptions& opts = {});

// Refine a fixed-point bracket of the return map by bisection on
// output - input, down to |b - a| <= xtol.  The bracket endpoints must
// produce opposite (or zero) signs; NoReturn otherwise.
double refine_fixed_point(const PolynomialField& f, const Section& s, double a, double b,
                          TimeDir dir = TimeDir::Forward, double xtol = 1e-10, double tmax = 1e3,
                          const IntegrationOptions& opts = {});

// Derivative of the first-return map at `input` computed from the flow, not
// from differencing: exp(integral of div f along the orbit) times the ratio
// of normal velocities at departure and arrival.  For a fixed point the ratio
// is 1 and this reduces to the classical divergence-integral multiplier.
double return_derivative_via_divergence(const PolynomialField& f, const Section& s, double input,
                                        TimeDir dir = TimeDir::Forward, double tmax = 1e3,
                                        const IntegrationOptions& opts = {});

// Divergence of f compiled to a fast point-evaluator, suitable as a
// functional integrand.
std::function<double(const std::array<double, 2>&)> divergence_functional(
    const PolynomialField& f);

// Eigenvalue data of a hyperbolic saddle.  lambda1 > 0 is the unstable
// eigenvalue, lambda2 > 0 the absolute value of the stable one, and
// tau = lambda2 / lambda1 the hyperbolicity ratio that governs the leading
// exponent of the corner transition map.
struct SaddleData {
    std::array<double, 2> point{};
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double tau = 0.0;
};

// Linearize f at `point` and extract the saddle data.  Throws NotASaddle when
// the Jacobian does not have two real eigenvalues of opposite signs.
SaddleData hyperbolicity_ratio(const PolynomialField& f, const std::array<double, 2>& point);

// Power-law fit of a corner transition map near a saddle.  Seeds the orbit at
// entry.point_at(x) for each input x > 0, flows forward to `exit`, and fits
// log(output) against log(input) by least squares:
//   output ~ prefactor * input^tau_hat.
// For a saddle with hyperbolicity ratio tau the fitted exponent converges to
// tau as the inputs shrink.  `max_residual` is the largest absolute deviation
// of log(output) from the fitted line.
struct DulacFit {
    double tau_hat = 0.0;
    double prefactor = 0.0;
    double max_residual = 0.0;
    std::vector<SectionMapSample> samples;
};

DulacFit dulac_exponent_fit(const PolynomialField& f, const std::array<double, 2>& saddle,
                            const Section& entry, const Section& exit,
                            const std::vector<double>& inputs, double tmax = 1e3,
                            const IntegrationOptions& opts = {});

// Geometric input ladder for exponent fits: from `hi` down to `lo` in
// half-decade steps (hi, hi/sqrt(10), hi/10, ...), descending.
std::vector<double> half_decade_ladder(double hi = 1e-2, double lo = 1e-5);

// Central transition through an unfolded saddle-node.  The model field is
//   x' = (x^2 + eta) * (1 + C x^2),   y' = -lambda y,
// integrated from (-x0_cap, y0) to the section {x = +x0_cap}.  For eta > 0
// the passage is a finite-time diffeomorphism y0 -> eps * y0 with
//   eps = exp(-lambda * T(eta)),  T = transit time,
// exponentially small in 1/sqrt(eta).  `eps` is measured from the seed
// y0 = 1e-3 and `linearity_defect` is |out(2 y0) / (2 out(y0)) - 1|, which
// must vanish to rounding because the y-equation is exactly linear.
struct SaddleNodeData {
    double eta = 0.0;
    double lambda = 0.0;
    double x0_cap = 0.0;
    double eps = 0.0;
    double linearity_defect = 0.0;
};

std::vector<SaddleNodeData> saddle_node_central_eps(double lambda, double C,
                                                    const std::vector<double>& etas, double x0_cap,
                                                    const IntegrationOptions& opts = {});

// Closed form of eps for C = 0: exp(-2 lambda * atan(x0/sqrt(eta)) / sqrt(eta)).
double saddle_node_eps_closed_form(double lambda, double eta, double x0_cap);

// Flatness probe of the stable-side corner map at the degenerate (eta = 0)
// saddle-node: x' = x^2, y' = -lambda y, mapping {y = y0_cap} to {x = x0_cap}.
// The exact map is y0_cap * exp(-lambda (1/x - 1/x0_cap)), flatter than any
// power of x at 0; `local_slopes[k]` is the log-log slope between samples k
// and k+1 and must increase without bound as the inputs shrink.  Inputs are
// sorted descending; an input equal to x0_cap is the identity flight.
struct FlatnessResult {
    std::vector<SectionMapSample> samples;
    std::vector<double> local_slopes;
};

FlatnessResult stable_center_flatness(double lambda, double y0_cap, double x0_cap,
                                      std::vector<double> inputs,
                                      const IntegrationOptions& opts = {});

// Displacement map for locating periodic orbits.  Each input s seeds the
// orbit at seed.point_at(s); the orbit is flown forward to its first crossing
// of `middle` and backward to its first crossing of `middle`, and the
// displacement is (forward arrival) - (backward arrival) in middle's
// coordinate.  A zero means the forward and backward arcs close up into a
// periodic orbit through the seed.  `zero_brackets` lists consecutive
// successful inputs across which the displacement changes sign.
struct DisplacementSample {
    double input = 0.0;
    double displacement = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

struct DisplacementResult {
    std::vector<DisplacementSample> samples;
    std::vector<std::pair<double, double>> zero_brackets;
};

DisplacementResult displacement_map(const PolynomialField& f, const Section& seed,
                                    const Section& middle, std::vector<double> inputs,
                                    double tmax = 1e3, const IntegrationOptions& opts = {});

// Refine a displacement zero by bisection to |b - a| <= xtol.
double refine_displacement_zero(const PolynomialField& f, const Section& seed,
                                const Section& middle, double a, double b, double xtol = 1e-10,
                                double tmax = 1e3, const IntegrationOptions& opts = {});

}  // namespace natlas
