// Exact polynomial algorithms used for singularity analysis: coefficient
// extraction, Sylvester resultants, common-factor detection, and numeric
// root finding for low-degree polynomials.

#pragma once

#include "natlas/poly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace natlas {

// Coefficients of p with respect to `var`, ascending: entry k multiplies var^k
// and is itself a polynomial free of `var`.
template <int N>
std::vector<Poly<N>> coefficients_in(const Poly<N>& p, int var) {
    int d = p.degree_in(var);
    std::vector<Poly<N>> out(static_cast<size_t>(std::max(d, -1) + 1));
    for (const auto& [e, c] : p.terms()) {
        auto base = e;
        int k = base[var];
        base[var] = 0;
        out[k].add_term(base, c);
    }
    return out;
}

// Determinant by Laplace expansion along the first column. The matrices here
// are tiny (Sylvester matrices of low-degree polynomials), so the factorial
// cost is irrelevant and we stay division-free.
template <int N>
Poly<N> det_laplace(const std::vector<std::vector<Poly<N>>>& m,
                    unsigned row_mask, int col) {
    int n = static_cast<int>(m.size());
    if (col == n) return Poly<N>::constant(Rational(1));
    Poly<N> acc;
    int sign = 1;
    for (int r = 0; r < n; ++r) {
        if (row_mask & (1u << r)) continue;
        if (!m[r][col].is_zero()) {
            Poly<N> sub = det_laplace(m, row_mask | (1u << r), col + 1);
            if (sign > 0)
                acc += m[r][col] * sub;
            else
                acc -= m[r][col] * sub;
        }
        sign = -sign;
    }
    return acc;
}

template <int N>
Poly<N> det_laplace(const std::vector<std::vector<Poly<N>>>& m) {
    return det_laplace(m, 0u, 0);
}

// Resultant of f and g with respect to `var`; the result is free of `var`.
// Conventions for degenerate degrees: Res(const, const) = 1, Res(f, g) = f^n
// when f is free of `var` and g has degree n in it.
template <int N>
Poly<N> resultant(const Poly<N>& f, const Poly<N>& g, int var) {
    if (f.is_zero() || g.is_zero()) return Poly<N>();
    int m = f.degree_in(var), n = g.degree_in(var);
    if (m == 0 && n == 0) return Poly<N>::constant(Rational(1));
    if (m == 0) return f.pow(n);
    if (n == 0) return g.pow(m);

    auto fc = coefficients_in(f, var);
    auto gc = coefficients_in(g, var);
    int s = m + n;
    std::vector<std::vector<Poly<N>>> syl(static_cast<size_t>(s),
                                          std::vector<Poly<N>>(static_cast<size_t>(s)));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= m; ++k) syl[i][i + k] = fc[static_cast<size_t>(m - k)];
    for (int i = 0; i < m; ++i)
        for (int k = 0; k <= n; ++k) syl[n + i][i + k] = gc[static_cast<size_t>(n - k)];
    return det_laplace(syl);
}

// Pseudo-remainder of f by g with respect to `var` (deg_var g >= 1).
template <int N>
Poly<N> pseudo_remainder(Poly<N> f, const Poly<N>& g, int var) {
    int n = g.degree_in(var);
    auto gc = coefficients_in(g, var);
    const Poly<N>& lg = gc[static_cast<size_t>(n)];
    while (!f.is_zero() && f.degree_in(var) >= n) {
        int m = f.degree_in(var);
        auto fc = coefficients_in(f, var);
        Poly<N> shift = Poly<N>::monomial_var(var, m - n);
        f = lg * f - fc[static_cast<size_t>(m)] * shift * g;
    }
    return f;
}

// True iff f and g share a polynomial factor of positive degree in some
// variable of `vars`. Zero inputs are the caller's problem.
template <int N>
bool share_common_factor(const Poly<N>& f, const Poly<N>& g,
                         const std::vector<int>& vars) {
    for (int var : vars) {
        if (f.degree_in(var) < 1 || g.degree_in(var) < 1) continue;
        // Pseudo-Euclid over the fraction field in the remaining variables:
        // a positive-degree terminal remainder certifies a common factor.
        Poly<N> a = f, b = g;
        if (a.degree_in(var) < b.degree_in(var)) std::swap(a, b);
        while (!b.is_zero() && b.degree_in(var) >= 1) {
            Poly<N> r = pseudo_remainder(a, b, var);
            a = b;
            b = r;
        }
        if (b.is_zero() && a.degree_in(var) >= 1) return true;
    }
    return false;
}

// Order of vanishing in `var` at 0: the smallest exponent of `var` among the
// nonzero terms; -1 for the zero polynomial.
template <int N>
int vanishing_order(const Poly<N>& p, int var) {
    if (p.is_zero()) return -1;
    int best = -1;
    for (const auto& [e, c] : p.terms())
        if (best < 0 || e[var] < best) best = e[var];
    return best;
}

// Real roots of a univariate polynomial with double coefficients (ascending).
// Companion-matrix eigenvalues; adequate for the low degrees that occur here.
inline std::vector<double> real_roots(std::vector<double> c) {
    double maxc = 0;
    for (double x : c) maxc = std::max(maxc, std::abs(x));
    if (maxc == 0) return {};
    while (!c.empty() && std::abs(c.back()) <= 1e-12 * maxc) c.pop_back();
    if (c.size() <= 1) return {};
    if (c.size() == 2) return {-c[0] / c[1]};

    int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<size_t>(i)] / c.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        auto z = es.eigenvalues()[i];
        if (std::abs(z.imag()) <= 1e-8 * (1 + std::abs(z.real())))
            roots.push_back(z.real());
    }
    return roots;
}

} // namespace natlas
