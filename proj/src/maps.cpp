#include "natlas/maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "natlas/errors.hpp"
#include "natlas/threads.hpp"

namespace natlas {

namespace {

// Divergence compiled to a flat monomial list so the quadrature loop does not
// touch rational arithmetic.
struct CompiledScalar {
    struct Term {
        double c;
        int i, j;
    };
    std::vector<Term> terms;

    double operator()(const std::array<double, 2>& p) const {
        double acc = 0;
        for (const auto& t : terms) {
            double m = t.c;
            for (int k = 0; k < t.i; ++k) m *= p[0];
            for (int k = 0; k < t.j; ++k) m *= p[1];
            acc += m;
        }
        return acc;
    }
};

CompiledScalar compile_scalar(const Poly2& p) {
    CompiledScalar cs;
    cs.terms.reserve(p.terms().size());
    for (const auto& [e, c] : p.terms()) cs.terms.push_back({to_double(c), e[0], e[1]});
    return cs;
}

double dot2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return a[0] * b[0] + a[1] * b[1];
}

double physical_flight(TimeDir dir, double elapsed) {
    return dir == TimeDir::Backward ? -elapsed : elapsed;
}

// Strict monotonicity of the successful outputs, taken in input order.
bool outputs_monotone(const std::vector<SectionMapSample>& samples) {
    std::vector<double> ok;
    for (const auto& s : samples)
        if (s.status == "ok") ok.push_back(s.output);
    if (ok.size() < 2) return true;
    bool incr = true, decr = true;
    for (std::size_t i = 1; i < ok.size(); ++i) {
        if (!(ok[i] > ok[i - 1])) incr = false;
        if (!(ok[i] < ok[i - 1])) decr = false;
    }
    return incr || decr;
}

// Bisection on a scalar function with a sign-change bracket.  `onbad` is
// thrown (by the caller-supplied thrower) when the endpoints do not straddle.
double bisect(const std::function<double(double)>& g, double a, double b, double xtol,
              const std::function<void()>& onbad) {
    double fa = g(a);
    if (fa == 0) return a;
    double fb = g(b);
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0)) onbad();
    for (int it = 0; it < 200 && std::abs(b - a) > xtol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if (fm == 0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Sign-change brackets over consecutive successful samples; an exact zero
// yields the degenerate bracket (s, s).
template <class SampleT, class ValueFn>
std::vector<std::pair<double, double>> sign_change_brackets(const std::vector<SampleT>& samples,
                                                            ValueFn value) {
    std::vector<std::pair<double, double>> brackets;
    const SampleT* prev = nullptr;
    for (const auto& s : samples) {
        if (s.status != "ok") continue;
        const double v = value(s);
        if (v == 0) {
            brackets.emplace_back(s.input, s.input);
        } else if (prev) {
            const double vp = value(*prev);
            if (vp != 0 && (vp > 0) != (v > 0)) brackets.emplace_back(prev->input, s.input);
        }
        prev = &s;
    }
    return brackets;
}

// Shared driver for transition_map / return_map batches.
std::vector<SectionMapSample> run_batch(const PolynomialField& f, const Section& from,
                                        const Section& to, const std::vector<double>& inputs,
                                        TimeDir dir, double tmax, const IntegrationOptions& opts,
                                        const std::string& entry_label,
                                        const std::string& exit_label,
                                        const std::string& no_crossing_code) {
    std::vector<SectionMapSample> samples(inputs.size());
    const OdeSystem sys = make_system(f);
    parallel_for(inputs.size(), [&](std::size_t i) {
        SectionMapSample smp;
        smp.input = inputs[i];
        smp.entry = entry_label;
        smp.exit = exit_label;
        try {
            const Crossing c = next_crossing(sys, from.point_at(inputs[i]), to, dir, tmax, opts);
            smp.output = c.section_coord;
            smp.flight_time = physical_flight(dir, c.time);
        } catch (const Error& e) {
            smp.status = e.code() == "NoCrossing" ? no_crossing_code : e.code();
        }
        samples[i] = std::move(smp);
    });
    return samples;
}

}  // namespace

std::string samples_to_csv(const std::vector<SectionMapSample>& samples) {
    std::string out = "input,output,flight_time,status\n";
    char buf[160];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", s.input, s.output, s.flight_time,
                      s.status.c_str());
        out += buf;
    }
    return out;
}

SampleBatch transition_map(const PolynomialField& f, const Section& from, const Section& to,
                           std::vector<double> inputs, TimeDir dir, double tmax,
                           const IntegrationOptions& opts, const std::string& entry_label,
                           const std::string& exit_label) {
    std::sort(inputs.begin(), inputs.end());
    SampleBatch batch;
    batch.samples =
        run_batch(f, from, to, inputs, dir, tmax, opts, entry_label, exit_label, "NoCrossing");
    batch.monotone = outputs_monotone(batch.samples);
    return batch;
}

ReturnMapResult return_map(const PolynomialField& f, const Section& s, std::vector<double> inputs,
                           TimeDir dir, double tmax, const IntegrationOptions& opts) {
    std::sort(inputs.begin(), inputs.end());
    ReturnMapResult res;
    res.samples = run_batch(f, s, s, inputs, dir, tmax, opts, "section", "section", "NoReturn");
    res.monotone = outputs_monotone(res.samples);
    res.fixed_point_brackets = sign_change_brackets(
        res.samples, [](const SectionMapSample& smp) { return smp.output - smp.input; });
    return res;
}

double return_map_point(const PolynomialField& f, const Section& s, double input, TimeDir dir,
                        double tmax, const IntegrationOptions& opts) {
    try {
        return next_crossing(f, s.point_at(input), s, dir, tmax, opts).section_coord;
    } catch (const NoCrossing& e) {
        throw NoReturn(e.what());
    }
}

double refine_fixed_point(const PolynomialField& f, const Section& s, double a, double b,
                          TimeDir dir, double xtol, double tmax, const IntegrationOptions& opts) {
    auto g = [&](double x) { return return_map_point(f, s, x, dir, tmax, opts) - x; };
    return bisect(g, a, b, xtol, [] {
        throw NoReturn("fixed-point bracket endpoints have the same displacement sign");
    });
}

std::function<double(const std::array<double, 2>&)> divergence_functional(
    const PolynomialField& f) {
    return compile_scalar(divergence(f));
}

double return_derivative_via_divergence(const PolynomialField& f, const Section& s, double input,
                                        TimeDir dir, double tmax, const IntegrationOptions& opts) {
    const PathFunctional pf = functional_along_ex(make_system(f), s.point_at(input), s, s, dir,
                                                  divergence_functional(f), tmax, opts);
    // Derivative of the arclength return map: area multiplier of the flow
    // times the ratio of normal velocities at departure and arrival.  The
    // physical-time sign convention of the functional makes the same formula
    // valid for the backward map (whose generating field has the opposite
    // divergence).
    const double w_in = dot2(s.normal(), eval_field(f, pf.entry));
    const double w_out = dot2(s.normal(), eval_field(f, pf.exit));
    return std::exp(pf.value) * w_in / w_out;
}

SaddleData hyperbolicity_ratio(const PolynomialField& f, const std::array<double, 2>& point) {
    const Eigen::Matrix2d J = jacobian(f, point);
    const double tr = J(0, 0) + J(1, 1);
    const double det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    // Two real eigenvalues of opposite signs iff det < 0.
    if (!(det < 0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Jacobian determinant %.6g is not negative", det);
        throw NotASaddle(buf);
    }
    const double disc = std::sqrt(tr * tr - 4 * det);
    SaddleData d;
    d.point = point;
    d.lambda1 = 0.5 * (tr + disc);
    d.lambda2 = -0.5 * (tr - disc);
    d.tau = d.lambda2 / d.lambda1;
    return d;
}

std::vector<double> half_decade_ladder(double hi, double lo) {
    if (!(hi > 0) || !(lo > 0) || !(hi > lo))
        throw std::invalid_argument("half_decade_ladder requires hi > lo > 0");
    std::vector<double> ladder;
    const double step = std::sqrt(10.0);
    for (double v = hi; v >= lo * (1 - 1e-12); v /= step) ladder.push_back(v);
    return ladder;
}

DulacFit dulac_exponent_fit(const PolynomialField& f, const std::array<double, 2>& saddle,
                            const Section& entry, const Section& exit,
                            const std::vector<double>& inputs, double tmax,
                            const IntegrationOptions& opts) {
    hyperbolicity_ratio(f, saddle);  // validates the linearization; throws NotASaddle
    if (inputs.size() < 2)
        throw std::invalid_argument("dulac_exponent_fit needs at least two inputs");
    for (double x : inputs)
        if (!(x > 0)) throw std::invalid_argument("dulac_exponent_fit inputs must be positive");

    DulacFit fit;
    fit.samples = transition_map(f, entry, exit, inputs, TimeDir::Forward, tmax, opts, "entry",
                                 "exit")
                      .samples;
    std::vector<double> lx, ly;
    for (const auto& smp : fit.samples) {
        if (smp.status != "ok") throw NoCrossing("corner map sample failed: " + smp.status);
        if (!(smp.output > 0))
            throw std::invalid_argument(
                "corner map output is not positive; reparameterize the exit section");
        lx.push_back(std::log(smp.input));
        ly.push_back(std::log(smp.output));
    }
    const auto n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.tau_hat = sxy / sxx;
    const double intercept = my - fit.tau_hat * mx;
    fit.prefactor = std::exp(intercept);
    for (std::size_t i = 0; i < lx.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::abs(ly[i] - (intercept + fit.tau_hat * lx[i])));
    return fit;
}

double saddle_node_eps_closed_form(double lambda, double eta, double x0_cap) {
    if (!(eta > 0)) throw NonpositiveEta("closed form requires eta > 0");
    const double rt = std::sqrt(eta);
    return std::exp(-2.0 * lambda * std::atan(x0_cap / rt) / rt);
}

std::vector<SaddleNodeData> saddle_node_central_eps(double lambda, double C,
                                                    const std::vector<double>& etas, double x0_cap,
                                                    const IntegrationOptions& opts) {
    if (!(lambda > 0)) throw std::invalid_argument("saddle_node_central_eps requires lambda > 0");
    if (!(x0_cap > 0)) throw std::invalid_argument("saddle_node_central_eps requires x0_cap > 0");
    for (double eta : etas) {
        if (!(eta > 0)) {
            char buf[72];
            std::snprintf(buf, sizeof buf, "eta = %.6g is not positive", eta);
            throw NonpositiveEta(buf);
        }
    }

    const Section exit({x0_cap, 0.0}, {1.0, 0.0}, std::max(1.0, x0_cap), +1);
    std::vector<SaddleNodeData> out(etas.size());
    parallel_for(etas.size(), [&](std::size_t i) {
        const double eta = etas[i];
        PolynomialField f;
        const Poly2 x2 = Poly2::monomial_var(0, 2);
        // x' = (x^2 + eta)(1 + C x^2), y' = -lambda y
        f.px = (x2 + Poly2::constant(rational_from_double(eta))) *
               (Poly2::constant(Rational(1)) + Poly2::constant(rational_from_double(C)) * x2);
        f.py = Poly2::monomial_var(1, 1, rational_from_double(-lambda));
        // Transit time for C = 0 is 2 atan(x0/sqrt(eta))/sqrt(eta) < pi/sqrt(eta);
        // C > 0 only speeds the passage up.
        const double tmax = 10.0 + 4.0 / std::sqrt(eta);

        const double y0 = 1e-3;  // doubling seed pair: the y-equation is exactly
        const double y1 = 2e-3;  // linear, so out(y1) = 2 out(y0) to rounding
        const double out0 =
            next_crossing(f, {-x0_cap, y0}, exit, TimeDir::Forward, tmax, opts).section_coord;
        const double out1 =
            next_crossing(f, {-x0_cap, y1}, exit, TimeDir::Forward, tmax, opts).section_coord;

        SaddleNodeData d;
        d.eta = eta;
        d.lambda = lambda;
        d.x0_cap = x0_cap;
        d.eps = out0 / y0;
        d.linearity_defect = std::abs(out1 / (2.0 * out0) - 1.0);
        out[i] = d;
    });
    return out;
}

FlatnessResult stable_center_flatness(double lambda, double y0_cap, double x0_cap,
                                      std::vector<double> inputs, const IntegrationOptions& opts) {
    if (!(lambda > 0) || !(y0_cap > 0) || !(x0_cap > 0))
        throw std::invalid_argument("stable_center_flatness requires positive lambda and caps");
    for (double x : inputs)
        if (!(x > 0) || x > x0_cap)
            throw std::invalid_argument("flatness inputs must lie in (0, x0_cap]");
    std::sort(inputs.begin(), inputs.end(), std::greater<>());

    PolynomialField f;  // x' = x^2, y' = -lambda y
    f.px = Poly2::monomial_var(0, 2);
    f.py = Poly2::monomial_var(1, 1, rational_from_double(-lambda));
    const Section exit({x0_cap, 0.0}, {1.0, 0.0}, std::max(1.0, 2.0 * y0_cap), +1);
    // Transit time from x to the cap is exactly 1/x - 1/x0_cap.
    const double tmax = 10.0 + 2.0 / inputs.back();

    FlatnessResult res;
    res.samples.resize(inputs.size());
    const OdeSystem sys = make_system(f);
    parallel_for(inputs.size(), [&](std::size_t i) {
        SectionMapSample smp;
        smp.input = inputs[i];
        smp.entry = "y-cap";
        smp.exit = "x-cap";
        if (inputs[i] == x0_cap) {  // identity flight: the seed already sits on the exit
            smp.output = y0_cap;
            smp.flight_time = 0.0;
        } else {
            try {
                const Crossing c =
                    next_crossing(sys, {inputs[i], y0_cap}, exit, TimeDir::Forward, tmax, opts);
                smp.output = c.section_coord;
                smp.flight_time = c.time;
            } catch (const Error& e) {
                smp.status = e.code();
            }
        }
        res.samples[i] = std::move(smp);
    });

    for (std::size_t i = 0; i + 1 < res.samples.size(); ++i) {
        const auto& a = res.samples[i];
        const auto& b = res.samples[i + 1];
        if (a.status == "ok" && b.status == "ok" && a.output > 0 && b.output > 0)
            res.local_slopes.push_back((std::log(b.output) - std::log(a.output)) /
                                       (std::log(b.input) - std::log(a.input)));
        else
            res.local_slopes.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return res;
}

DisplacementResult displacement_map(const PolynomialField& f, const Section& seed,
                                    const Section& middle, std::vector<double> inputs,
                                    double tmax, const IntegrationOptions& opts) {
    std::sort(inputs.begin(), inputs.end());
    DisplacementResult res;
    res.samples.resize(inputs.size());
    const OdeSystem sys = make_system(f);
    parallel_for(inputs.size(), [&](std::size_t i) {
        DisplacementSample smp;
        smp.input = inputs[i];
        try {
            const std::array<double, 2> p = seed.point_at(inputs[i]);
            const Crossing fwd = next_crossing(sys, p, middle, TimeDir::Forward, tmax, opts);
            const Crossing bwd = next_crossing(sys, p, middle, TimeDir::Backward, tmax, opts);
            smp.displacement = fwd.section_coord - bwd.section_coord;
        } catch (const Error& e) {
            smp.status = e.code();
        }
        res.samples[i] = std::move(smp);
    });
    res.zero_brackets = sign_change_brackets(
        res.samples, [](const DisplacementSample& smp) { return smp.displacement; });
    return res;
}

double refine_displacement_zero(const PolynomialField& f, const Section& seed,
                                const Section& middle, double a, double b, double xtol,
                                double tmax, const IntegrationOptions& opts) {
    const OdeSystem sys = make_system(f);
    auto g = [&](double s) {
        const std::array<double, 2> p = seed.point_at(s);
        const Crossing fwd = next_crossing(sys, p, middle, TimeDir::Forward, tmax, opts);
        const Crossing bwd = next_crossing(sys, p, middle, TimeDir::Backward, tmax, opts);
        return fwd.section_coord - bwd.section_coord;
    };
    return bisect(g, a, b, xtol, [] {
        throw std::invalid_argument(
            "displacement bracket endpoints have the same sign");
    });
}

}  // namespace natlas
