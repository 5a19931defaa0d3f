#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace mht {

// Polynomials in the local coordinate tau in [0,1], coefficients ascending.
using Poly = std::vector<double>;

inline double poly_eval(const Poly& p, double x) {
    double s = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) s = s * x + p[i];
    return s;
}

inline Poly poly_deriv(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = double(i) * p[i];
    return d;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

// integral over [0,1]
inline double poly_integral01(const Poly& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] / double(i + 1);
    return s;
}

// antiderivative vanishing at 0
inline Poly poly_antideriv(const Poly& p) {
    Poly a(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) a[i + 1] = p[i] / double(i + 1);
    return a;
}

/// Global polynomial g(t) rewritten in the local coordinate of [a, a+h].
inline Poly poly_localize(const Poly& g, double a, double h) {
    // g(a + h tau) by Horner on polynomials
    Poly r{0.0};
    for (std::size_t i = g.size(); i-- > 0;) {
        Poly nr(r.size() + 1, 0.0);
        for (std::size_t j = 0; j < r.size(); ++j) {
            nr[j] += r[j] * a;
            nr[j + 1] += r[j] * h;
        }
        nr[0] += g[i];
        r = std::move(nr);
    }
    return r;
}

struct Piece {
    std::size_t elem; // 0-based element, spans [elem*h, (elem+1)*h]
    Poly c;
};

/// Piecewise polynomial on a uniform mesh of (0,T), zero outside its pieces.
struct PwPoly {
    std::size_t n = 0;
    double T = 0.0;
    std::vector<Piece> pieces;

    double h() const { return T / double(n); }
    int degree() const {
        int d = 0;
        for (const auto& p : pieces) d = std::max(d, int(p.c.size()) - 1);
        return d;
    }
    double operator()(double t) const {
        const double hh = h();
        double s = 0.0;
        for (const auto& p : pieces) {
            const double a = double(p.elem) * hh;
            if (t >= a && t <= a + hh) return poly_eval(p.c, (t - a) / hh);
        }
        return s;
    }
};

/// Jump of the m-th derivative across node q: phi^{(m)}(t_q+) - phi^{(m)}(t_q-).
struct Jump {
    long q;
    int m;
    double J;
};

inline std::vector<Jump> jumps(const PwPoly& f) {
    const double h = f.h();
    const int deg = f.degree();
    std::vector<Jump> out;
    // collect derivative values at element ends
    std::vector<std::size_t> nodes;
    for (const auto& p : f.pieces) { nodes.push_back(p.elem); nodes.push_back(p.elem + 1); }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (std::size_t q : nodes) {
        for (int m = 0; m <= deg; ++m) {
            double lv = 0.0, rv = 0.0;
            for (const auto& p : f.pieces) {
                if (p.elem + 1 == q || p.elem == q) {
                    Poly d = p.c;
                    for (int k = 0; k < m; ++k) d = poly_deriv(d);
                    const double scale = std::pow(h, -m);
                    if (p.elem + 1 == q) lv += poly_eval(d, 1.0) * scale;
                    if (p.elem == q) rv += poly_eval(d, 0.0) * scale;
                }
            }
            const double J = rv - lv;
            if (J != 0.0) out.push_back({long(q), m, J});
        }
    }
    return out;
}

/// Jumps of a global polynomial restricted to (0,T).
inline std::vector<Jump> jumps_global_poly(const Poly& g, std::size_t n, double T) {
    std::vector<Jump> out;
    Poly d = g;
    for (int m = 0; m < int(g.size()); ++m) {
        const double v0 = poly_eval(d, 0.0), vT = poly_eval(d, T);
        if (v0 != 0.0) out.push_back({0, m, v0});
        if (vT != 0.0) out.push_back({long(n), m, -vT});
        d = poly_deriv(d);
    }
    return out;
}

/// E(lambda) = int_0^T phi(t) e^{i lambda t} dt from the jump representation.
inline std::complex<double> fourier_integral(const std::vector<Jump>& js, double h, double lambda) {
    using C = std::complex<double>;
    const C il(0.0, lambda);
    C s = 0.0;
    for (const auto& j : js) {
        const double sign = (j.m % 2 == 0) ? 1.0 : -1.0;
        s -= sign * j.J * std::exp(C(0.0, lambda * double(j.q) * h)) / std::pow(il, j.m + 1);
    }
    return s;
}

/// E(lambda_k), lambda_k = (pi/2 + k pi)/T, with exact phase reduction.
inline std::complex<double> fourier_integral_k(const std::vector<Jump>& js, std::size_t n, double T,
                                               long k) {
    using C = std::complex<double>;
    using std::numbers::pi;
    const double lambda = (0.5 * pi + double(k) * pi) / T;
    const long long period = 4LL * (long long)n;
    C s = 0.0;
    for (const auto& j : js) {
        const long long r = ((long long)j.q * (2LL * k + 1)) % period;
        const double ph = pi * double(r) / double(2 * n);
        const double sign = (j.m % 2 == 0) ? 1.0 : -1.0;
        // (i lambda)^{-(m+1)} = (-i)^{m+1} lambda^{-(m+1)}
        C mi(1.0, 0.0);
        for (int e = 0; e <= j.m; ++e) mi *= C(0.0, -1.0);
        s -= sign * j.J * C(std::cos(ph), std::sin(ph)) * mi * std::pow(lambda, -(j.m + 1));
    }
    return s;
}

} // namespace mht
