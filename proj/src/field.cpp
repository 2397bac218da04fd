#include "natlas/field.hpp"

#include "natlas/errors.hpp"

#include <nlohmann/json.hpp>

namespace natlas {

namespace {
constexpr int kSchemaVersion = 1;
} // namespace

PolynomialField quadratic_from_params(const QuadraticParams& p) {
    using E = Poly2::Exponents;
    Poly2 px, py;
    // dx/dt = delta*x - y + B*x^2
    px.add_term(E{1, 0}, p.delta);
    px.add_term(E{0, 1}, Rational(-1));
    px.add_term(E{2, 0}, p.b_cap);
    // dy/dt = x + gamma*y + x*y
    py.add_term(E{1, 0}, Rational(1));
    py.add_term(E{0, 1}, p.gamma);
    py.add_term(E{1, 1}, Rational(1));
    return PolynomialField{px, py};
}

std::array<double, 2> eval_field(const PolynomialField& f, const std::array<double, 2>& pt) {
    return {f.px.eval(pt), f.py.eval(pt)};
}

Poly2 divergence(const PolynomialField& f) {
    return f.px.derivative(0) + f.py.derivative(1);
}

Eigen::Matrix2d jacobian(const PolynomialField& f, const std::array<double, 2>& pt) {
    Eigen::Matrix2d j;
    j(0, 0) = f.px.derivative(0).eval(pt);
    j(0, 1) = f.px.derivative(1).eval(pt);
    j(1, 0) = f.py.derivative(0).eval(pt);
    j(1, 1) = f.py.derivative(1).eval(pt);
    return j;
}

namespace {

nlohmann::json poly_to_json(const Poly2& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : p.terms()) {
        terms.push_back({{"i", e[0]},
                         {"j", e[1]},
                         {"numerator", boost::multiprecision::numerator(c).str()},
                         {"denominator", boost::multiprecision::denominator(c).str()}});
    }
    return terms;
}

Poly2 poly_from_json(const nlohmann::json& terms) {
    Poly2 p;
    for (const auto& t : terms) {
        Rational c(t.at("numerator").get<std::string>() + "/" +
                   t.at("denominator").get<std::string>());
        p.add_term(Poly2::Exponents{t.at("i").get<int>(), t.at("j").get<int>()}, c);
    }
    return p;
}

} // namespace

std::string field_to_json(const PolynomialField& f) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["px"] = poly_to_json(f.px);
    j["py"] = poly_to_json(f.py);
    return j.dump(2);
}

PolynomialField field_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("BadFieldJson", Error::Category::Validation, e.what());
    }
    try {
        return PolynomialField{poly_from_json(j.at("px")), poly_from_json(j.at("py"))};
    } catch (const nlohmann::json::exception& e) {
        throw Error("BadFieldJson", Error::Category::Validation, e.what());
    }
}

} // namespace natlas
