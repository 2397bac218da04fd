#include "natlas/charts.hpp"

#include "natlas/errors.hpp"
#include "natlas/poly_algo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace natlas {

namespace {
using E2 = Poly2::Exponents;

// z^2 * p(v/z, 1/z) for deg p <= 2: the monomial x^i y^j becomes v^i z^(2-i-j).
Poly2 homogenized(const Poly2& p) {
    Poly2 out;
    for (const auto& [e, c] : p.terms())
        out.add_term(E2{e[0], 2 - e[0] - e[1]}, c);
    return out;
}
} // namespace

InfinityChart localize_at_infinity(const PolynomialField& f) {
    if (f.degree() > 2)
        throw std::invalid_argument("localize_at_infinity: field degree exceeds 2");

    // With v = x/y, z = 1/y and time rescaled by z, the chart field is
    //   dv/ds = P2 - v Q2,   dz/ds = -z Q2,
    // where P2(v,z) = z^2 px(v/z, 1/z) and Q2(v,z) = z^2 py(v/z, 1/z).
    Poly2 p2 = homogenized(f.px);
    Poly2 q2 = homogenized(f.py);
    Poly2 v = Poly2::variable(0), z = Poly2::variable(1);

    InfinityChart chart;
    chart.field.px = p2 - v * q2;
    chart.field.py = Rational(-1) * (z * q2);
    chart.chart_id = "y-direction";

    // The chart origin must be singular with nilpotent linear part. In terms
    // of the input coefficients that means: no y^2 in px (origin singular),
    // no xy in px and no y^2 in py (zero eigenvalues).
    Rational c_px_y2 = f.px.coeff(E2{0, 2});
    Rational c_px_xy = f.px.coeff(E2{1, 1});
    Rational c_py_y2 = f.py.coeff(E2{0, 2});
    if (c_px_y2 != 0 || c_px_xy != 0 || c_py_y2 != 0) {
        std::ostringstream os;
        os << "chart origin is not a nilpotent singular point; offending "
              "coefficients: ";
        if (c_px_y2 != 0) os << "px[y^2]=" << c_px_y2.str() << " ";
        if (c_px_xy != 0) os << "px[xy]=" << c_px_xy.str() << " ";
        if (c_py_y2 != 0) os << "py[y^2]=" << c_py_y2.str();
        throw NotNilpotentAtInfinity(os.str());
    }

    // Multiplicity three iff c_xy(py) * (c_x2(px) - c_xy(py)) != 0.
    Rational g11 = f.py.coeff(E2{1, 1});
    Rational d20 = f.px.coeff(E2{2, 0});
    chart.triple = (g11 * (d20 - g11) != 0);
    return chart;
}

NormalFormParams normal_form_params(const QuadraticParams& q) {
    if (q.b_cap <= 1)
        throw NotSaddleType("saddle type at infinity needs B > 1; got B = " +
                            q.b_cap.str());
    Rational bm1 = q.b_cap - 1;
    NormalFormParams p;
    p.a = 1 - q.b_cap;
    p.b = 3 - 2 * q.b_cap;
    p.eta = -q.gamma * bm1 * bm1 * (5 * q.b_cap * q.b_cap - 4 * q.b_cap + 11);
    return p;
}

std::string to_string(SingularityType t) {
    switch (t) {
        case SingularityType::Saddle: return "saddle";
        case SingularityType::Node: return "node";
        case SingularityType::FocusOrCenter: return "focus-or-center";
        case SingularityType::SaddleNode: return "saddle-node";
        case SingularityType::Nilpotent: return "nilpotent";
        case SingularityType::Degenerate: return "degenerate";
    }
    return "unknown";
}

namespace {

// Double coefficients (ascending in y) of p with x frozen.
std::vector<double> univariate_in_y(const Poly2& p, double x) {
    auto cs = coefficients_in(p, 1);
    std::vector<double> out(cs.size());
    for (size_t k = 0; k < cs.size(); ++k) out[k] = cs[k].eval(std::array<double, 2>{x, 0.0});
    return out;
}

double field_scale(const PolynomialField& f) {
    double s = 0;
    for (const auto& [e, c] : f.px.terms()) s = std::max(s, std::abs(to_double(c)));
    for (const auto& [e, c] : f.py.terms()) s = std::max(s, std::abs(to_double(c)));
    return std::max(s, 1.0);
}

// Newton polish with a damped fallback when the Jacobian is singular (the
// interesting fields have nilpotent singular points).
bool polish(const PolynomialField& f, std::array<double, 2>& p, double scale) {
    for (int it = 0; it < 60; ++it) {
        auto val = eval_field(f, p);
        double res = std::max(std::abs(val[0]), std::abs(val[1]));
        if (res <= 1e-12 * scale) return true;
        Eigen::Matrix2d j = jacobian(f, p);
        Eigen::Vector2d rhs(-val[0], -val[1]);
        Eigen::Vector2d step;
        double det = j.determinant();
        if (std::abs(det) > 1e-12 * std::max(1.0, j.norm() * j.norm())) {
            step = j.inverse() * rhs;
        } else {
            Eigen::Matrix2d m = j.transpose() * j;
            m += 1e-10 * std::max(1.0, m.trace()) * Eigen::Matrix2d::Identity();
            step = m.ldlt().solve(j.transpose() * rhs);
        }
        p[0] += step[0];
        p[1] += step[1];
        if (step.norm() <= 1e-14 * (1 + std::hypot(p[0], p[1]))) break;
    }
    auto val = eval_field(f, p);
    return std::max(std::abs(val[0]), std::abs(val[1])) <= 1e-9 * scale;
}

SingularityType classify_linear(const Eigen::Matrix2d& j) {
    double scale = j.cwiseAbs().maxCoeff();
    if (scale <= 1e-9) return SingularityType::Degenerate;
    double tr = j.trace(), det = j.determinant();
    double det_tol = 1e-9 * scale * scale;
    double tr_tol = 1e-9 * scale;
    if (det < -det_tol) return SingularityType::Saddle;
    if (det > det_tol) {
        double disc = tr * tr - 4 * det;
        if (disc < -det_tol) return SingularityType::FocusOrCenter;
        return SingularityType::Node;
    }
    // det == 0: one eigenvalue is zero.
    if (std::abs(tr) > tr_tol) return SingularityType::SaddleNode;
    return SingularityType::Nilpotent; // nonzero linear part, both eigenvalues 0
}

} // namespace

std::vector<Singularity> classify_finite_singularities(const PolynomialField& f,
                                                       double box) {
    const Poly2& px = f.px;
    const Poly2& py = f.py;
    if (px.is_zero() && py.is_zero())
        throw NonIsolatedSingularities("both components are identically zero");
    if (px.is_zero() || py.is_zero()) {
        const Poly2& other = px.is_zero() ? py : px;
        if (other.total_degree() >= 1)
            throw NonIsolatedSingularities(
                "one component is identically zero; the singular set is a curve");
        return {}; // the nonzero component is a nonzero constant
    }
    if (share_common_factor(px, py, {0, 1}))
        throw NonIsolatedSingularities("components share a polynomial factor");

    double scale = field_scale(f);

    // Eliminate y; x-coordinates of candidates are roots of the resultant.
    Poly2 rx = resultant(px, py, 1);
    if (rx.is_zero())
        throw NonIsolatedSingularities("resultant in y vanishes identically");

    std::vector<double> xs;
    {
        auto cs = coefficients_in(rx, 0);
        std::vector<double> rc(cs.size());
        for (size_t k = 0; k < cs.size(); ++k)
            rc[k] = cs[k].eval(std::array<double, 2>{0.0, 0.0});
        xs = real_roots(rc);
        if (rx.degree_in(0) == 0) {
            // No x-dependence anywhere: both components are univariate in x
            // with no common root (the common-factor gate passed), so there
            // are no singular points at all.
            if (px.degree_in(1) < 1 && py.degree_in(1) < 1) return {};
        }
    }

    std::vector<Singularity> found;
    auto consider = [&](std::array<double, 2> p) {
        if (!polish(f, p, scale)) return;
        if (std::abs(p[0]) > box + 1e-9 || std::abs(p[1]) > box + 1e-9) return;
        for (const auto& s : found)
            if (std::hypot(s.point[0] - p[0], s.point[1] - p[1]) <=
                1e-7 * (1 + std::hypot(p[0], p[1])))
                return;
        Singularity s;
        s.point = p;
        Eigen::Matrix2d j = jacobian(f, p);
        s.type = classify_linear(j);
        Eigen::EigenSolver<Eigen::Matrix2d> es(j);
        s.eigenvalues = {es.eigenvalues()[0], es.eigenvalues()[1]};
        found.push_back(s);
    };

    for (double x : xs) {
        if (std::abs(x) > box * (1 + 1e-9) + 1e-9) continue;
        std::vector<double> ys;
        auto add_roots = [&](const Poly2& p) {
            auto c = univariate_in_y(p, x);
            double m = 0;
            for (double t : c) m = std::max(m, std::abs(t));
            if (m <= 1e-9 * scale) return false; // vanishes identically at this x
            for (double y : real_roots(c)) ys.push_back(y);
            return true;
        };
        bool any = false;
        any |= add_roots(px);
        any |= add_roots(py);
        if (!any) continue;
        if (ys.empty()) ys.push_back(0.0);
        for (double y : ys) consider({x, y});
    }

    std::sort(found.begin(), found.end(), [](const Singularity& a, const Singularity& b) {
        if (a.point[0] != b.point[0]) return a.point[0] < b.point[0];
        return a.point[1] < b.point[1];
    });
    return found;
}

} // namespace natlas
