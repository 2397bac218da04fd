// Python surface of the toolkit: exact-parameter queries return their values
// both as exact rational strings and as doubles; numeric routines mirror the
// C++ API one-to-one. Validation failures raise ValueError, numeric failures
// RuntimeError.

#include "natlas/blowup.hpp"
#include "natlas/charts.hpp"
#include "natlas/errors.hpp"
#include "natlas/integrate.hpp"
#include "natlas/maps.hpp"
#include "natlas/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace natlas;

namespace {

py::dict exact_value(const Rational& r) {
    py::dict d;
    d["exact"] = r.str();
    d["value"] = to_double(r);
    return d;
}

py::dict parabola_dict(double b_cap, double delta) {
    const InvariantParabola ip =
        invariant_parabola(rational_from_double(b_cap), rational_from_double(delta));
    py::dict d;
    d["c2"] = exact_value(ip.parabola.c2);
    d["c1"] = exact_value(ip.parabola.c1);
    d["c0"] = exact_value(ip.parabola.c0);
    d["gamma"] = exact_value(ip.gamma);
    return d;
}

py::dict normal_form_dict(double b_cap, double delta, double gamma) {
    const QuadraticParams q{rational_from_double(delta), rational_from_double(gamma),
                            rational_from_double(b_cap)};
    const NormalFormParams nf = normal_form_params(q);
    py::dict d;
    d["a"] = exact_value(nf.a);
    d["b"] = exact_value(nf.b);
    d["eta"] = exact_value(nf.eta);
    d["codimension"] = nf.b == 0 ? 4 : 3;
    return d;
}

py::list critical_points_list(double a) {
    py::list out;
    for (const CriticalPoint& cp : critical_points(a)) {
        py::dict d;
        d["label"] = cp.label;
        d["chart_sign"] = cp.chart_sign;
        d["ybar"] = cp.ybar;
        d["eigenvalues"] = cp.eigenvalues;
        out.append(d);
    }
    return out;
}

py::list orbit_nodes(const Orbit& orb) {
    py::list out;
    const double sgn = orb.backward() ? -1.0 : 1.0;
    for (std::size_t i = 0; i < orb.times().size(); ++i) {
        const State& s = orb.states()[i];
        out.append(py::make_tuple(sgn * orb.times()[i], s[0], s[1]));
    }
    return out;
}

py::list orbit_quadratic(double b_cap, double delta, double gamma, double x0, double y0,
                         double tmax, double tol) {
    const QuadraticParams q{rational_from_double(delta), rational_from_double(gamma),
                            rational_from_double(b_cap)};
    IntegrationOptions opts;
    opts.tol = tol;
    return orbit_nodes(integrate(quadratic_from_params(q), {x0, y0}, tmax, opts));
}

py::list orbit_rescaled(double a, double mu1, double mu2, double mu3, double x0, double y0,
                        double tmax, double tol) {
    IntegrationOptions opts;
    opts.tol = tol;
    return orbit_nodes(integrate(rescaled_field({a, mu1, mu2, mu3}), {x0, y0}, tmax, opts));
}

py::dict classify_label(double a, double mu1, double mu2, double mu3) {
    ClassifyConfig cfg;
    cfg.allow_other_a = true;
    const SxhhSignature sig = classify_sxhh({a, mu1, mu2, mu3}, cfg);
    py::dict d;
    d["label"] = sig.label;
    d["chain"] = sig.chain;
    d["boundary_points"] = sig.boundary_points;
    d["members"] = sig.members;
    d["integrable_symmetric"] = sig.integrable_symmetric;
    d["note"] = sig.note;
    py::list pts;
    for (const SingularPointInfo& q : sig.singular_points) {
        py::dict e;
        e["position"] = q.position;
        e["type"] = q.type;
        e["on_line"] = q.on_line;
        pts.append(e);
    }
    d["singular_points"] = pts;
    return d;
}

py::list saddle_node_eps(double lambda, double c_coeff, const std::vector<double>& etas,
                         double x0_cap, double tol) {
    IntegrationOptions opts;
    opts.tol = tol;
    py::list out;
    for (const SaddleNodeData& d : saddle_node_central_eps(lambda, c_coeff, etas, x0_cap, opts)) {
        py::dict e;
        e["eta"] = d.eta;
        e["eps"] = d.eps;
        e["linearity_defect"] = d.linearity_defect;
        out.append(e);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quadratic vector fields with a nilpotent triple point at infinity: exact "
              "invariants, blow-up charts, transition maps.";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.category() == Error::Category::Validation)
                PyErr_SetString(PyExc_ValueError, e.what());
            else
                PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def("version", [] { return std::string("1.0.0"); });

    m.def("invariant_parabola", &parabola_dict, py::arg("B"), py::arg("delta"),
          "Exact coefficients (c2, c1, c0) of the invariant parabola and the gamma value "
          "that makes it invariant. Raises ValueError for B in {0, 1/2}.");

    m.def("normal_form", &normal_form_dict, py::arg("B"), py::arg("delta"), py::arg("gamma"),
          "Normal-form parameters (a, b, eta) at the nilpotent point at infinity and the "
          "codimension of the singularity. Raises ValueError unless B > 1.");

    m.def("pprime_closed_form", &pprime_closed_form, py::arg("B"), py::arg("delta"),
          "Closed-form derivative of the return map along the parabola loop, measured "
          "against the flow direction in which the loop is stable.");

    m.def(
        "pprime_numeric",
        [](double b_cap, double delta, double cutoff) {
            return pprime_numeric(b_cap, delta, cutoff);
        },
        py::arg("B"), py::arg("delta"), py::arg("x_cutoff") = 1e4,
        "Same derivative from the divergence integral over |x| <= x_cutoff plus the "
        "analytic tail.");

    m.def("critical_points", &critical_points_list, py::arg("a"),
          "The four corner points of the blown-up sphere with closed-form eigenvalue "
          "triples in (r, rho, y) order.");

    m.def("compensator", &compensator, py::arg("x"), py::arg("alpha"),
          "omega(x, alpha) = (x^-alpha - 1)/alpha, continued by -ln x at alpha = 0.");

    m.def("hamiltonian", &hamiltonian, py::arg("xbar"), py::arg("ybar"), py::arg("mu1bar"),
          py::arg("mu2bar"),
          "Conserved energy of the rescaled field on the slice a = -1/2, mu3bar = 0.");

    m.def("first_integral", &first_integral_pm, py::arg("z"), py::arg("rho"),
          py::arg("mu1bar"), py::arg("mu2bar"), py::arg("sign"),
          "First integral of the directional-chart system; sign = +1 or -1 picks the "
          "chart.");

    m.def("orbit_quadratic", &orbit_quadratic, py::arg("B"), py::arg("delta"),
          py::arg("gamma"), py::arg("x0"), py::arg("y0"), py::arg("tmax"),
          py::arg("tol") = 1e-10,
          "Integrate the quadratic family from (x0, y0); returns [(t, x, y), ...]. "
          "Negative tmax integrates backward.");

    m.def("orbit_rescaled", &orbit_rescaled, py::arg("a"), py::arg("mu1bar"),
          py::arg("mu2bar"), py::arg("mu3bar"), py::arg("x0"), py::arg("y0"), py::arg("tmax"),
          py::arg("tol") = 1e-10,
          "Integrate the family-rescaling field from (x0, y0); returns [(t, x, y), ...].");

    m.def("classify", &classify_label, py::arg("a"), py::arg("mu1bar"), py::arg("mu2bar"),
          py::arg("mu3bar"),
          "Classify the portrait of the rescaled field against the Sxhh catalog; returns "
          "label, corner chain, singular points, and family members.");

    m.def("saddle_node_eps", &saddle_node_eps, py::arg("lam"), py::arg("C"), py::arg("etas"),
          py::arg("x0_cap"), py::arg("tol") = 1e-12,
          "Measured central-transition coefficients through an unfolded saddle-node.");

    m.def("saddle_node_eps_closed_form", &saddle_node_eps_closed_form, py::arg("lam"),
          py::arg("eta"), py::arg("x0_cap"),
          "Closed form exp(-2 lam atan(x0/sqrt(eta))/sqrt(eta)) for C = 0.");

    m.def(
        "catalog_json", [] { return sxhh_catalog_to_json(builtin_sxhh_catalog()); },
        "The built-in Sxhh template catalog serialized as JSON.");
}
