#include "natlas/integrate.hpp"

#include "natlas/errors.hpp"
#include "natlas/poly_algo.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace natlas {

namespace {

// ---------------------------------------------------------------------------
// Fast monomial evaluation for polynomial right-hand sides.

double ipow(double x, int n) {
    double r = 1.0;
    while (n-- > 0) r *= x;
    return r;
}

struct Mono2 {
    int i, j;
    double c;
};

std::vector<Mono2> compile2(const Poly2& p) {
    std::vector<Mono2> out;
    out.reserve(p.terms().size());
    for (const auto& [e, c] : p.terms()) out.push_back({e[0], e[1], to_double(c)});
    return out;
}

struct Mono3 {
    int e0, e1, e2;
    double c;
};

std::vector<Mono3> compile3(const Poly3& p) {
    std::vector<Mono3> out;
    out.reserve(p.terms().size());
    for (const auto& [e, c] : p.terms()) out.push_back({e[0], e[1], e[2], to_double(c)});
    return out;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) tableau, error weights, and dense-output weights.

constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

State dense_eval(const DenseSegment& s, double t, int dim) {
    double th = (t - s.t0) / s.h;
    th = std::clamp(th, 0.0, 1.0);
    const double th1 = 1.0 - th;
    State out{};
    for (int i = 0; i < dim; ++i)
        out[i] = s.rcont[0][i] +
                 th * (s.rcont[1][i] +
                       th1 * (s.rcont[2][i] + th * (s.rcont[3][i] + th1 * s.rcont[4][i])));
    return out;
}

class Stepper {
  public:
    Stepper(const OdeSystem& sys, const State& y0, const IntegrationOptions& opts)
        : sys_(sys), opts_(opts) {
        validate();
        y_ = y0;
        for (int i = sys_.dim; i < 3; ++i) y_[i] = 0.0;
        check_state(y_, 0.0);
        sys_.rhs(0.0, y_, k1_);
        h_ = opts_.fixed_step > 0 ? opts_.fixed_step : initial_step();
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const OdeSystem& system() const { return sys_; }

    /// One accepted step, never overshooting tend; returns its dense segment.
    DenseSegment advance(double tend);

  private:
    void validate() const {
        if (sys_.dim != 2 && sys_.dim != 3)
            throw std::invalid_argument("system dimension must be 2 or 3");
        if (!sys_.rhs) throw std::invalid_argument("system has no right-hand side");
        if (opts_.fixed_step < 0) throw std::invalid_argument("fixed_step must be >= 0");
        if (opts_.fixed_step == 0 && (opts_.tol < 1e-13 || opts_.tol > 1e-3))
            throw std::invalid_argument("tolerance must lie in [1e-13, 1e-3]");
        if (!(opts_.blowup_bound > 0))
            throw std::invalid_argument("blowup bound must be positive");
    }

    double scale(int i, double other) const {
        double sc = opts_.tol * std::max(std::abs(y_[i]), std::abs(other)) + opts_.abs_floor;
        return sc;
    }

    void check_state(const State& y, double t) const {
        for (int i = 0; i < sys_.dim; ++i) {
            if (!std::isfinite(y[i]))
                throw BlowupDetected("non-finite state component at t=" + std::to_string(t));
            if (std::abs(y[i]) > opts_.blowup_bound)
                throw BlowupDetected("state norm exceeded " + std::to_string(opts_.blowup_bound) +
                                     " at t=" + std::to_string(t));
        }
    }

    double initial_step() const {
        const int n = sys_.dim;
        // A component sitting many orders below the state norm (e.g. a
        // coordinate pinned to ~0 by an earlier section crossing) must not
        // dictate the first step through a vanishing relative scale; floor
        // each scale at a fixed fraction of the state norm. The floor is far
        // below any deliberately small seed, so runs that scale a linear
        // component stay exactly scale-covariant.
        double ynorm = 0;
        for (int i = 0; i < n; ++i) ynorm = std::max(ynorm, std::abs(y_[i]));
        auto init_scale = [&](int i) {
            double sc = opts_.tol * std::max(std::abs(y_[i]), 1e-6 * ynorm) + opts_.abs_floor;
            return sc == 0 ? opts_.tol : sc;
        };
        double dnf = 0, dny = 0;
        for (int i = 0; i < n; ++i) {
            double sc = init_scale(i);
            double qf = k1_[i] / sc, qy = y_[i] / sc;
            dnf += qf * qf;
            dny += qy * qy;
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        State y1{}, k2{};
        for (int i = 0; i < n; ++i) y1[i] = y_[i] + h * k1_[i];
        sys_.rhs(h, y1, k2);
        double der2 = 0;
        for (int i = 0; i < n; ++i) {
            double q = (k2[i] - k1_[i]) / init_scale(i);
            der2 += q * q;
        }
        der2 = std::sqrt(der2) / h;
        double der12 = std::max(der2, std::sqrt(dnf));
        double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
        return std::min(100 * h, h1);
    }

    OdeSystem sys_;
    IntegrationOptions opts_;
    double t_ = 0;
    double h_ = 0;
    State y_{};
    State k1_{}; // derivative at (t_, y_); the pair's last stage is reused here
};

DenseSegment Stepper::advance(double tend) {
    if (t_ >= tend) throw std::logic_error("stepper advanced past the end time");
    const int n = sys_.dim;
    bool rejected = false;
    for (;;) {
        double h = h_;
        if (opts_.max_step > 0) h = std::min(h, opts_.max_step);
        bool landed = false;
        if (t_ + h >= tend) {
            h = tend - t_;
            landed = true;
        }
        if (opts_.fixed_step == 0 && h < 1e-14 * std::max(1.0, std::abs(t_)))
            throw StepUnderflow("step size underflowed at t=" + std::to_string(t_));

        State yt{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y1{};
        for (int i = 0; i < n; ++i) yt[i] = y_[i] + h * (A21 * k1_[i]);
        sys_.rhs(t_ + C2 * h, yt, k2);
        for (int i = 0; i < n; ++i) yt[i] = y_[i] + h * (A31 * k1_[i] + A32 * k2[i]);
        sys_.rhs(t_ + C3 * h, yt, k3);
        for (int i = 0; i < n; ++i) yt[i] = y_[i] + h * (A41 * k1_[i] + A42 * k2[i] + A43 * k3[i]);
        sys_.rhs(t_ + C4 * h, yt, k4);
        for (int i = 0; i < n; ++i)
            yt[i] = y_[i] + h * (A51 * k1_[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        sys_.rhs(t_ + C5 * h, yt, k5);
        for (int i = 0; i < n; ++i)
            yt[i] = y_[i] +
                    h * (A61 * k1_[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        sys_.rhs(t_ + h, yt, k6);
        for (int i = 0; i < n; ++i)
            y1[i] = y_[i] + h * (B1 * k1_[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        sys_.rhs(t_ + h, y1, k7);

        double err = 0;
        if (opts_.fixed_step == 0) {
            double sum = 0;
            for (int i = 0; i < n; ++i) {
                double e = h * (E1 * k1_[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                                E7 * k7[i]);
                double sc = scale(i, y1[i]);
                if (sc == 0) {
                    if (e == 0) continue;
                    sc = opts_.tol;
                }
                double q = e / sc;
                sum += q * q;
            }
            err = std::sqrt(sum / n);
        }

        if (err <= 1.0) { // fixed-step mode always lands here
            DenseSegment seg;
            seg.t0 = t_;
            seg.h = h;
            for (int i = 0; i < n; ++i) {
                double ydiff = y1[i] - y_[i];
                double bspl = h * k1_[i] - ydiff;
                seg.rcont[0][i] = y_[i];
                seg.rcont[1][i] = ydiff;
                seg.rcont[2][i] = bspl;
                seg.rcont[3][i] = ydiff - h * k7[i] - bspl;
                seg.rcont[4][i] = h * (D1 * k1_[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] +
                                       D6 * k6[i] + D7 * k7[i]);
            }
            t_ = landed ? tend : t_ + h;
            y_ = y1;
            k1_ = k7;
            check_state(y_, t_);
            if (opts_.fixed_step == 0) {
                double fac = 0.9 * std::pow(err > 1e-300 ? 1.0 / err : 1e300, 0.2);
                fac = std::min(rejected ? 1.0 : 10.0, std::max(0.2, fac));
                h_ = h * fac;
            }
            return seg;
        }
        rejected = true;
        double fac = std::max(0.2, 0.9 * std::pow(1.0 / err, 0.2));
        h_ = h * fac;
    }
}

// ---------------------------------------------------------------------------
// Section-event scanning on the dense output.

std::array<double, 2> plane(const State& y) { return {y[0], y[1]}; }

// Coefficients (ascending) of the quartic theta |-> signed_distance(dense(theta)).
std::vector<double> section_quartic(const DenseSegment& seg, const Section& sec) {
    double a[5];
    for (int k = 0; k < 5; ++k)
        a[k] = sec.normal()[0] * seg.rcont[k][0] + sec.normal()[1] * seg.rcont[k][1];
    double off = sec.normal()[0] * sec.anchor()[0] + sec.normal()[1] * sec.anchor()[1];
    return {a[0] - off, a[1] + a[2], -a[2] + a[3] + a[4], -a[3] - 2 * a[4], a[4]};
}

double eval_poly(const std::vector<double>& c, double x) {
    double r = 0;
    for (size_t k = c.size(); k-- > 0;) r = r * x + c[k];
    return r;
}

std::vector<double> poly_deriv(const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t k = 1; k < c.size(); ++k) d.push_back(double(k) * c[k]);
    return d;
}

// 5-point Gauss-Lobatto nodes/weights on [0, 1].
const double LOB_A = 0.5 * (1.0 - std::sqrt(3.0 / 7.0));
const double LOB_B = 0.5 * (1.0 + std::sqrt(3.0 / 7.0));
const double LOB_NODE[5] = {0.0, LOB_A, 0.5, LOB_B, 1.0};
const double LOB_W[5] = {1.0 / 20, 49.0 / 180, 16.0 / 45, 49.0 / 180, 1.0 / 20};

using ScalarField = std::function<double(const std::array<double, 2>&)>;

double lobatto_segment(const DenseSegment& seg, int dim, double ta, double tb,
                       const ScalarField& g) {
    double acc = 0;
    for (int q = 0; q < 5; ++q) {
        double tq = ta + LOB_NODE[q] * (tb - ta);
        acc += LOB_W[q] * g(plane(dense_eval(seg, tq, dim)));
    }
    return acc * (tb - ta);
}

struct ScanHit {
    double time;
    State y;
};

// Follow the orbit until the first admissible crossing of `sec`, optionally
// accumulating the Gauss-Lobatto integral of g dt up to the crossing.
ScanHit flow_to_section(const OdeSystem& sys, const State& y0, const Section& sec, double tmax,
                        const IntegrationOptions& opts, const ScalarField* g, double* accum) {
    Stepper st(sys, y0, opts);
    const double scale0 = 1.0 + std::max(std::abs(y0[0]), std::abs(y0[1]));
    const double band = 1e-11 * scale0;       // re-fire suppression near the start
    const double band_touch = 1e-9 * scale0;  // miss distance that counts as a graze
    bool armed = std::abs(sec.signed_distance(plane(y0))) > band;

    while (st.t() < tmax) {
        DenseSegment seg = st.advance(tmax);
        const std::vector<double> q = section_quartic(seg, sec);
        const std::vector<double> dq = poly_deriv(q);

        struct Event {
            double theta;
            bool touch;
        };
        std::vector<Event> events;
        std::vector<double> touches;
        for (double th : real_roots(dq)) {
            if (th <= 1e-12 || th >= 1.0 - 1e-12) continue;
            if (std::abs(eval_poly(q, th)) <= band_touch) {
                touches.push_back(th);
                events.push_back({th, true});
            }
        }
        for (double th : real_roots(q)) {
            if (th < -1e-12 || th > 1.0 + 1e-12) continue;
            th = std::clamp(th, 0.0, 1.0);
            // Roots huddled around a graze are artifacts of the near-double
            // root; the touch event handles that window.
            bool masked = false;
            for (double te : touches)
                if (std::abs(th - te) < 1e-3) masked = true;
            if (!masked) events.push_back({th, false});
        }
        std::sort(events.begin(), events.end(),
                  [](const Event& u, const Event& v) { return u.theta < v.theta; });

        double prev_theta = 0.0;
        for (const Event& ev : events) {
            // Arm once the trajectory has genuinely left the section's band.
            if (!armed) {
                double tm = seg.t0 + 0.5 * (prev_theta + ev.theta) * seg.h;
                if (std::abs(sec.signed_distance(plane(dense_eval(seg, tm, st.system().dim)))) >
                    band)
                    armed = true;
            }
            prev_theta = ev.theta;
            double tstar = seg.t0 + ev.theta * seg.h;
            State ystar = dense_eval(seg, tstar, st.system().dim);
            double coord = sec.coordinate(plane(ystar));
            bool on_segment = std::abs(coord) <= sec.halfwidth() * (1 + 1e-12) + 1e-12;

            if (ev.touch) {
                if (armed && on_segment)
                    throw TangentialCrossing("orbit grazes the section (miss distance " +
                                             std::to_string(eval_poly(q, ev.theta)) + ") at t=" +
                                             std::to_string(tstar));
                continue;
            }
            // Polish the root on the interpolant.
            double th = ev.theta;
            for (int it = 0; it < 4; ++it) {
                double der = eval_poly(dq, th);
                if (std::abs(der) < 1e-30) break;
                th = std::clamp(th - eval_poly(q, th) / der, 0.0, 1.0);
            }
            tstar = seg.t0 + th * seg.h;
            ystar = dense_eval(seg, tstar, st.system().dim);
            coord = sec.coordinate(plane(ystar));
            on_segment = std::abs(coord) <= sec.halfwidth() * (1 + 1e-12) + 1e-12;

            State f{};
            st.system().rhs(tstar, ystar, f);
            double nv = sec.normal()[0] * f[0] + sec.normal()[1] * f[1];
            if (std::abs(nv) < 1e-10) {
                if (armed && on_segment)
                    throw TangentialCrossing("normal velocity " + std::to_string(nv) +
                                             " below 1e-10 at t=" + std::to_string(tstar));
                continue;
            }
            if (!armed) continue;
            if (sec.orientation() != 0 && nv * sec.orientation() < 0) continue;
            if (!on_segment) continue;

            if (g && accum) *accum += lobatto_segment(seg, st.system().dim, seg.t0, tstar, *g);
            return {tstar, ystar};
        }

        if (g && accum)
            *accum += lobatto_segment(seg, st.system().dim, seg.t0, seg.t0 + seg.h, *g);
        if (!armed &&
            std::abs(sec.signed_distance(plane(dense_eval(seg, seg.t0 + seg.h,
                                                          st.system().dim)))) > band)
            armed = true;
    }
    throw NoCrossing("no admissible crossing of the section within t=" + std::to_string(tmax));
}

} // namespace

// ---------------------------------------------------------------------------
// Public API.

OdeSystem make_system(const PolynomialField& f) {
    auto px = compile2(f.px);
    auto py = compile2(f.py);
    OdeSystem sys;
    sys.dim = 2;
    sys.rhs = [px = std::move(px), py = std::move(py)](double, const State& y, State& d) {
        double u = 0, v = 0;
        for (const auto& m : px) u += m.c * ipow(y[0], m.i) * ipow(y[1], m.j);
        for (const auto& m : py) v += m.c * ipow(y[0], m.i) * ipow(y[1], m.j);
        d = {u, v, 0.0};
    };
    return sys;
}

OdeSystem make_system(const Field3& f) {
    std::array<std::vector<Mono3>, 3> comp;
    for (int c = 0; c < 3; ++c) comp[c] = compile3(f.comp[c]);
    OdeSystem sys;
    sys.dim = 3;
    sys.rhs = [comp = std::move(comp)](double, const State& y, State& d) {
        for (int c = 0; c < 3; ++c) {
            double acc = 0;
            for (const auto& m : comp[c])
                acc += m.c * ipow(y[0], m.e0) * ipow(y[1], m.e1) * ipow(y[2], m.e2);
            d[c] = acc;
        }
    };
    return sys;
}

OdeSystem reverse_time(const OdeSystem& sys) {
    OdeSystem r;
    r.dim = sys.dim;
    r.rhs = [inner = sys.rhs](double t, const State& y, State& d) {
        inner(t, y, d);
        for (auto& v : d) v = -v;
    };
    return r;
}

State Orbit::at(double t) const {
    if (segments_.empty()) throw std::invalid_argument("orbit holds no steps");
    double slack = 1e-12 * std::max(1.0, t_end());
    if (t < -slack || t > t_end() + slack)
        throw std::invalid_argument("dense evaluation time outside the orbit's range");
    t = std::clamp(t, 0.0, t_end());
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const DenseSegment& s) { return v < s.t0; });
    if (it != segments_.begin()) --it;
    return dense_eval(*it, t, dim_);
}

double Orbit::path_length() const {
    double len = 0;
    for (size_t k = 1; k < states_.size(); ++k) {
        double s = 0;
        for (int i = 0; i < dim_; ++i) {
            double d = states_[k][i] - states_[k - 1][i];
            s += d * d;
        }
        len += std::sqrt(s);
    }
    return len;
}

Orbit Orbit::build(int dim, bool backward, std::vector<double> times, std::vector<State> states,
                   std::vector<DenseSegment> segments) {
    Orbit o;
    o.dim_ = dim;
    o.backward_ = backward;
    o.times_ = std::move(times);
    o.states_ = std::move(states);
    o.segments_ = std::move(segments);
    return o;
}

Orbit integrate(const OdeSystem& sys, const State& x0, double tmax,
                const IntegrationOptions& opts) {
    if (tmax == 0 || !std::isfinite(tmax))
        throw std::invalid_argument("integration time must be nonzero and finite");
    const bool backward = tmax < 0;
    const OdeSystem run = backward ? reverse_time(sys) : sys;
    const double T = std::abs(tmax);

    Stepper st(run, x0, opts);
    std::vector<double> ts{0.0};
    std::vector<State> ys{st.y()};
    std::vector<DenseSegment> segs;
    while (st.t() < T) {
        segs.push_back(st.advance(T));
        ts.push_back(st.t());
        ys.push_back(st.y());
    }
    return Orbit::build(sys.dim, backward, std::move(ts), std::move(ys), std::move(segs));
}

Orbit integrate(const PolynomialField& f, const std::array<double, 2>& x0, double tmax,
                const IntegrationOptions& opts) {
    return integrate(make_system(f), State{x0[0], x0[1], 0.0}, tmax, opts);
}

std::string orbit_to_csv(const Orbit& orbit) {
    std::string out = orbit.dim() == 2 ? "t,x,y\n" : "t,x0,x1,x2\n";
    const double sign = orbit.backward() ? -1.0 : 1.0;
    char buf[160];
    for (size_t k = 0; k < orbit.times().size(); ++k) {
        double tp = sign * orbit.times()[k];
        if (tp == 0) tp = 0; // normalize -0
        const State& y = orbit.states()[k];
        if (orbit.dim() == 2)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", tp, y[0], y[1]);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", tp, y[0], y[1], y[2]);
        out += buf;
    }
    return out;
}

std::string orbit_to_json(const Orbit& orbit) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["dim"] = orbit.dim();
    j["backward"] = orbit.backward();
    const double sign = orbit.backward() ? -1.0 : 1.0;
    auto& jt = j["t"] = nlohmann::json::array();
    auto& js = j["states"] = nlohmann::json::array();
    for (size_t k = 0; k < orbit.times().size(); ++k) {
        double tp = sign * orbit.times()[k];
        if (tp == 0) tp = 0;
        jt.push_back(tp);
        std::vector<double> row(orbit.states()[k].begin(),
                                orbit.states()[k].begin() + orbit.dim());
        js.push_back(row);
    }
    return j.dump();
}

Section::Section(std::array<double, 2> anchor, std::array<double, 2> normal, double halfwidth,
                 int orientation)
    : anchor_(anchor), normal_(normal), halfwidth_(halfwidth), orientation_(orientation) {
    double len = std::hypot(normal_[0], normal_[1]);
    if (std::abs(len - 1.0) > 1e-14)
        throw std::invalid_argument("section normal must be a unit vector");
    if (!(halfwidth_ > 0)) throw std::invalid_argument("section halfwidth must be positive");
    if (orientation_ < -1 || orientation_ > 1)
        throw std::invalid_argument("section orientation must be -1, 0, or +1");
}

double Section::signed_distance(const std::array<double, 2>& p) const {
    return normal_[0] * (p[0] - anchor_[0]) + normal_[1] * (p[1] - anchor_[1]);
}

double Section::coordinate(const std::array<double, 2>& p) const {
    return -normal_[1] * (p[0] - anchor_[0]) + normal_[0] * (p[1] - anchor_[1]);
}

std::array<double, 2> Section::point_at(double s) const {
    return {anchor_[0] - s * normal_[1], anchor_[1] + s * normal_[0]};
}

Crossing next_crossing(const OdeSystem& sys, const std::array<double, 2>& x0, const Section& s,
                       TimeDir dir, double tmax, const IntegrationOptions& opts) {
    if (sys.dim != 2)
        throw std::invalid_argument("section crossings are defined for planar systems");
    const OdeSystem run = dir == TimeDir::Backward ? reverse_time(sys) : sys;
    ScanHit hit = flow_to_section(run, {x0[0], x0[1], 0.0}, s, tmax, opts, nullptr, nullptr);
    std::array<double, 2> p = plane(hit.y);
    return {hit.time, p, s.coordinate(p)};
}

Crossing next_crossing(const PolynomialField& f, const std::array<double, 2>& x0,
                       const Section& s, TimeDir dir, double tmax,
                       const IntegrationOptions& opts) {
    return next_crossing(make_system(f), x0, s, dir, tmax, opts);
}

PathFunctional functional_along_ex(const OdeSystem& sys, const std::array<double, 2>& x0,
                                   const Section& from, const Section& to, TimeDir dir,
                                   const ScalarField& g, double tmax,
                                   const IntegrationOptions& opts) {
    if (sys.dim != 2)
        throw std::invalid_argument("path functionals are defined for planar systems");
    const OdeSystem run = dir == TimeDir::Backward ? reverse_time(sys) : sys;
    State y{x0[0], x0[1], 0.0};
    const double band = 1e-11 * (1.0 + std::max(std::abs(x0[0]), std::abs(x0[1])));
    if (std::abs(from.signed_distance(x0)) > band)
        y = flow_to_section(run, y, from, tmax, opts, nullptr, nullptr).y;

    PathFunctional out;
    out.entry = plane(y);
    double acc = 0;
    ScanHit hit = flow_to_section(run, y, to, tmax, opts, &g, &acc);
    out.flight_time = hit.time;
    out.exit = plane(hit.y);
    out.value = dir == TimeDir::Backward ? -acc : acc;
    return out;
}

double functional_along(const OdeSystem& sys, const std::array<double, 2>& x0,
                        const Section& from, const Section& to, TimeDir dir, const ScalarField& g,
                        double tmax, const IntegrationOptions& opts) {
    return functional_along_ex(sys, x0, from, to, dir, g, tmax, opts).value;
}

double functional_along(const PolynomialField& f, const std::array<double, 2>& x0,
                        const Section& from, const Section& to, TimeDir dir, const ScalarField& g,
                        double tmax, const IntegrationOptions& opts) {
    return functional_along_ex(make_system(f), x0, from, to, dir, g, tmax, opts).value;
}

} // namespace natlas
