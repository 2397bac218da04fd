#pragma once

#include "natlas/blowup.hpp"
#include "natlas/field.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace natlas {

/// State vector for the integrator. Planar fields use the first two entries
/// (the third is kept at zero); the blown-up fields use all three.
using State = std::array<double, 3>;

enum class TimeDir { Forward, Backward };

/// A right-hand side prepared for fast repeated evaluation. `rhs` writes
/// d(state)/dt into its third argument; autonomous systems ignore `t`.
struct OdeSystem {
    int dim = 2;
    std::function<void(double t, const State& y, State& dydt)> rhs;
};

/// Compile a planar polynomial field into an evaluation-ready system.
OdeSystem make_system(const PolynomialField& f);

/// Compile a three-variable chart field into an evaluation-ready system.
OdeSystem make_system(const Field3& f);

/// The same system with time reversed (all components negated).
OdeSystem reverse_time(const OdeSystem& sys);

struct IntegrationOptions {
    /// Relative local-error tolerance per step; must lie in [1e-13, 1e-3].
    double tol = 1e-10;
    /// Optional absolute floor added to the per-component error scale.
    /// Zero keeps the control purely relative, which makes runs of linear
    /// subsystems exactly scale-covariant.
    double abs_floor = 0.0;
    /// State-norm bound beyond which integration aborts with BlowupDetected.
    double blowup_bound = 1e8;
    /// Largest step the controller may take (0 = unlimited).
    double max_step = 0.0;
    /// Positive value switches to fixed-step mode with exactly this step
    /// (no error control); intended for convergence-order studies.
    double fixed_step = 0.0;
};

/// Dense-output coefficients for one accepted step starting at t0 with
/// width h, in the quartic-interpolant form of the embedded 5(4) pair.
struct DenseSegment {
    double t0 = 0;
    double h = 0;
    std::array<State, 5> rcont{};
};

/// A stored trajectory: accepted-step nodes plus the dense interpolant.
/// Times are the integrator's own clock, increasing from 0 regardless of
/// direction; `backward()` records whether the field was time-reversed, and
/// exports translate to physical time (negated when backward).
class Orbit {
  public:
    Orbit() = default;

    int dim() const { return dim_; }
    bool backward() const { return backward_; }
    double t_end() const { return times_.back(); }

    /// Accepted-step times, strictly increasing, starting at 0.
    const std::vector<double>& times() const { return times_; }
    /// States at the accepted-step times.
    const std::vector<State>& states() const { return states_; }

    /// Dense evaluation anywhere in [0, t_end()] (tiny overhang tolerated).
    State at(double t) const;

    /// Sum of chord lengths between consecutive nodes.
    double path_length() const;

    static Orbit build(int dim, bool backward, std::vector<double> times,
                       std::vector<State> states, std::vector<DenseSegment> segments);

  private:
    int dim_ = 2;
    bool backward_ = false;
    std::vector<double> times_;
    std::vector<State> states_;
    std::vector<DenseSegment> segments_;
};

/// Integrate from x0 for |tmax| time units; tmax < 0 integrates the
/// time-reversed field. Throws std::invalid_argument for tmax == 0 or an
/// out-of-range tolerance, BlowupDetected past the norm bound, and
/// StepUnderflow when the controller stalls.
Orbit integrate(const OdeSystem& sys, const State& x0, double tmax,
                const IntegrationOptions& opts = {});
Orbit integrate(const PolynomialField& f, const std::array<double, 2>& x0, double tmax,
                const IntegrationOptions& opts = {});

/// CSV export: header plus one row per node in physical time.
std::string orbit_to_csv(const Orbit& orbit);
/// JSON export with a schema_version field.
std::string orbit_to_json(const Orbit& orbit);

/// An oriented transversal segment in the plane: the set of points
/// anchor + s * tangent with |s| <= halfwidth, where tangent is the unit
/// normal rotated by +90 degrees. `orientation` restricts which crossings
/// count: +1 keeps those with normal velocity > 0, -1 those with < 0,
/// 0 keeps both.
class Section {
  public:
    Section(std::array<double, 2> anchor, std::array<double, 2> normal, double halfwidth,
            int orientation = 0);

    const std::array<double, 2>& anchor() const { return anchor_; }
    const std::array<double, 2>& normal() const { return normal_; }
    double halfwidth() const { return halfwidth_; }
    int orientation() const { return orientation_; }

    /// Signed distance of p from the section's line, along the normal.
    double signed_distance(const std::array<double, 2>& p) const;
    /// Arclength coordinate of p along the section, measured from the anchor.
    double coordinate(const std::array<double, 2>& p) const;
    /// The point at arclength coordinate s.
    std::array<double, 2> point_at(double s) const;

  private:
    std::array<double, 2> anchor_;
    std::array<double, 2> normal_;
    double halfwidth_;
    int orientation_;
};

struct Crossing {
    double time = 0;                    // elapsed time along the integration direction
    std::array<double, 2> state{};      // crossing point
    double section_coord = 0;           // arclength coordinate on the section
};

/// First transversal crossing of `s` from x0 in the given direction, located
/// on the dense output to 1e-12 in the signed distance. Crossings outside the
/// segment or against the orientation are skipped. Throws NoCrossing when
/// tmax is exhausted and TangentialCrossing when the orbit meets the section
/// with normal velocity below 1e-10 (including grazing touches).
Crossing next_crossing(const OdeSystem& sys, const std::array<double, 2>& x0, const Section& s,
                       TimeDir dir = TimeDir::Forward, double tmax = 1e3,
                       const IntegrationOptions& opts = {});
Crossing next_crossing(const PolynomialField& f, const std::array<double, 2>& x0,
                       const Section& s, TimeDir dir = TimeDir::Forward, double tmax = 1e3,
                       const IntegrationOptions& opts = {});

struct PathFunctional {
    double value = 0;               // integral of g over physical time
    double flight_time = 0;         // elapsed (positive) time between the sections
    std::array<double, 2> entry{};  // state on the entry section
    std::array<double, 2> exit{};   // state on the exit section
};

/// Integrate the scalar field g along the orbit of x0 between two sections:
/// x0 is taken to lie on `from` (within a tight band; otherwise the orbit is
/// first flowed to `from`), then followed to `to` while accumulating
/// integral g dt with a per-step Gauss-Lobatto rule on the dense output. The
/// value is the physical-time integral: reversed runs negate it.
PathFunctional functional_along_ex(const OdeSystem& sys, const std::array<double, 2>& x0,
                                   const Section& from, const Section& to,
                                   TimeDir dir, const std::function<double(const std::array<double, 2>&)>& g,
                                   double tmax = 1e3, const IntegrationOptions& opts = {});
double functional_along(const OdeSystem& sys, const std::array<double, 2>& x0,
                        const Section& from, const Section& to, TimeDir dir,
                        const std::function<double(const std::array<double, 2>&)>& g,
                        double tmax = 1e3, const IntegrationOptions& opts = {});
double functional_along(const PolynomialField& f, const std::array<double, 2>& x0,
                        const Section& from, const Section& to, TimeDir dir,
                        const std::function<double(const std::array<double, 2>&)>& g,
                        double tmax = 1e3, const IntegrationOptions& opts = {});

} // namespace natlas
