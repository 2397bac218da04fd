// Sparse multivariate polynomials with exact rational coefficients.
//
// Storage is canonical: zero coefficients are never kept, so structural
// equality of the coefficient maps is polynomial equality. Degrees stay
// small (the blown-up fields reach total degree ~6), so a std::map keyed
// by exponent tuples is plenty.

#pragma once

#include "natlas/rational.hpp"

#include <array>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace natlas {

template <int N>
class Poly {
public:
    using Exponents = std::array<int, N>;
    using TermMap = std::map<Exponents, Rational>;

    Poly() = default;

    static Poly constant(const Rational& c) {
        Poly p;
        p.set(Exponents{}, c);
        return p;
    }

    static Poly variable(int k) { return monomial_var(k, 1); }

    static Poly monomial_var(int k, int power, const Rational& c = Rational(1)) {
        if (k < 0 || k >= N) throw std::out_of_range("Poly: variable index");
        Exponents e{};
        e[k] = power;
        Poly p;
        p.set(e, c);
        return p;
    }

    static Poly monomial(const Exponents& e, const Rational& c) {
        Poly p;
        p.set(e, c);
        return p;
    }

    void set(const Exponents& e, const Rational& c) {
        if (c == 0)
            terms_.erase(e);
        else
            terms_[e] = c;
    }

    void add_term(const Exponents& e, const Rational& c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (c != 0) terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Rational coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Total degree; the zero polynomial reports -1.
    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k = 0; k < N; ++k) s += e[k];
            if (s > d) d = s;
        }
        return d;
    }

    int degree_in(int var) const {
        int d = -1;
        for (const auto& [e, c] : terms_)
            if (e[var] > d) d = e[var];
        return d;
    }

    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator-() const {
        Poly r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e;
                for (int k = 0; k < N; ++k) e[k] = ea[k] + eb[k];
                r.add_term(e, ca * cb);
            }
        return r;
    }

    friend Poly operator*(const Rational& s, const Poly& p) {
        Poly r;
        if (s == 0) return r;
        for (const auto& [e, c] : p.terms_) r.terms_.emplace(e, s * c);
        return r;
    }
    friend Poly operator*(const Poly& p, const Rational& s) { return s * p; }

    Poly pow(int n) const {
        if (n < 0) throw std::invalid_argument("Poly::pow: negative exponent");
        Poly r = constant(Rational(1));
        for (int i = 0; i < n; ++i) r = r * (*this);
        return r;
    }

    Poly derivative(int var) const {
        Poly r;
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponents d = e;
            d[var] -= 1;
            r.add_term(d, c * e[var]);
        }
        return r;
    }

    // Replace variable `var` by polynomial g (in the same variable space).
    Poly substitute(int var, const Poly& g) const {
        Poly r;
        // Cache powers of g up to the needed degree.
        int dmax = degree_in(var);
        std::map<int, Poly> powers;
        powers[0] = constant(Rational(1));
        for (int d = 1; d <= dmax; ++d) powers[d] = powers[d - 1] * g;
        for (const auto& [e, c] : terms_) {
            Exponents base = e;
            int d = base[var];
            base[var] = 0;
            r += monomial(base, c) * powers[d];
        }
        return r;
    }

    template <class T>
    T eval(const std::array<T, N>& x) const {
        T acc(0);
        for (const auto& [e, c] : terms_) {
            T t = coeff_cast<T>(c);
            for (int k = 0; k < N; ++k)
                for (int i = 0; i < e[k]; ++i) t = t * x[k];
            acc = acc + t;
        }
        return acc;
    }

    std::string to_string(const std::array<std::string, N>& names) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.str() << ")";
            for (int k = 0; k < N; ++k) {
                if (e[k] == 0) continue;
                os << "*" << names[k];
                if (e[k] > 1) os << "^" << e[k];
            }
        }
        return os.str();
    }

private:
    template <class T>
    static T coeff_cast(const Rational& c) {
        if constexpr (std::is_same_v<T, Rational>)
            return c;
        else
            return static_cast<T>(to_double(c));
    }

    TermMap terms_;
};

using Poly1 = Poly<1>;
using Poly2 = Poly<2>;
using Poly3 = Poly<3>;

} // namespace natlas
