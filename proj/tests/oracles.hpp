#pragma once

// Reference computations used by the tests. They avoid the folding machinery of the library and
// integrate or sum directly, so agreement is a real cross-check.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mht/fem.hpp"
#include "mht/fourier.hpp"

namespace oracle {

using mht::Vec;

/// sum_{mu>=0} (a+mu)^{-p} by direct summation of N terms plus the midpoint-rule remainder.
inline double hurwitz_brute(int p, double a, long N = 1000000) {
    mht::KahanSum s;
    for (long mu = N - 1; mu >= 0; --mu) s.add(std::pow(a + double(mu), -p));
    s.add(std::pow(a + double(N) - 0.5, 1 - p) / (p - 1));
    return s.value();
}

/// Geometrically graded Gauss nodes on [a,b], refined toward the flagged ends.
struct Nodes {
    std::vector<double> t, w;
};

inline Nodes graded_nodes(double a, double b, bool ga, bool gb, int levels = 12, double ratio = 0.15) {
    using G = boost::math::quadrature::gauss<double, 16>;
    Nodes out;
    auto seg = [&](double lo, double hi) {
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        const auto& x = G::abscissa();
        const auto& w = G::weights();
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (x[i] == 0.0 && sgn < 0) continue;
                out.t.push_back(c + sgn * hw * x[i]);
                out.w.push_back(hw * w[i]);
            }
        }
    };
    const double mid = 0.5 * (a + b);
    auto graded = [&](double from, double to) { // refine toward `from`
        const double L = to - from;
        double hi = 1.0;
        for (int l = 0; l < levels; ++l) {
            const double lo = hi * ratio;
            seg(from + L * std::min(lo, hi), from + L * std::max(lo, hi));
            hi = lo;
        }
        seg(from, from + L * hi);
    };
    if (!ga && !gb) {
        seg(a, b);
        return out;
    }
    if (ga) graded(a, gb ? mid : b);
    if (gb) {
        // mirror: refine toward b on [ga ? mid : a, b]
        const double lo = ga ? mid : a;
        Nodes m = graded_nodes(0.0, b - lo, true, false, levels, ratio);
        for (std::size_t i = 0; i < m.t.size(); ++i) {
            out.t.push_back(b - m.t[i]);
            out.w.push_back(m.w[i]);
        }
    }
    return out;
}

/// (H_T psi)(t) for a piecewise polynomial psi. Inside the support the library's principal value
/// routine is used; outside it the kernel is smooth and integrated directly.
inline double ht_of_pw(const mht::PwPoly& psi, double t, double T) {
    using std::numbers::pi;
    const double h = psi.h();
    std::vector<double> br;
    bool inside = false;
    for (const auto& p : psi.pieces) {
        const double a = double(p.elem) * h, b = double(p.elem + 1) * h;
        br.push_back(a);
        br.push_back(b);
        if (t >= a && t <= b) inside = true;
    }
    if (inside)
        return mht::kernel_apply_vp_d([&](double s, double) { return psi(s); }, t, T - t, T, br);
    double acc = 0.0;
    for (const auto& p : psi.pieces) {
        const double a = double(p.elem) * h, b = double(p.elem + 1) * h;
        const bool near_a = std::abs(t - a) < h, near_b = std::abs(t - b) < h;
        const Nodes nd = graded_nodes(a, b, near_a && t <= a, near_b && t >= b, 30);
        for (std::size_t i = 0; i < nd.t.size(); ++i) {
            const double s = nd.t[i];
            const double v = mht::poly_eval(p.c, (s - a) / h);
            acc += nd.w[i] * v * (1.0 / std::sin(pi * (s + t) / (2.0 * T)) + 1.0 / std::sin(pi * (s - t) / (2.0 * T)));
        }
    }
    return acc / (2.0 * T);
}

/// Row j (0-based) of B, B[j][i] = <psi_i, H_T psi_j>, by quadrature of H_T psi_j against every psi_i.
inline Vec vp_row(const mht::FESpace& V, std::size_t j) {
    const double h = V.h(), T = V.T();
    const mht::PwPoly psi = mht::basis_pw(V, j);
    std::vector<double> br;
    for (const auto& p : psi.pieces) {
        br.push_back(double(p.elem) * h);
        br.push_back(double(p.elem + 1) * h);
    }
    auto is_break = [&](double x) {
        for (double b : br)
            if (std::abs(b - x) < 1e-12 * T) return true;
        return std::abs(x - T) < 1e-12 * T; // H_T of anything nonzero at T has a log term there
    };
    Vec row(V.dof(), 0.0);
    for (std::size_t e = 0; e < V.n(); ++e) {
        const double a = V.mesh.node(e), b = V.mesh.node(e + 1);
        const Nodes nd = graded_nodes(a, b, is_break(a), is_break(b));
        const auto shapes = mht::local_shapes(V, e);
        for (std::size_t q = 0; q < nd.t.size(); ++q) {
            const double g = ht_of_pw(psi, nd.t[q], T) * nd.w[q];
            for (const auto& [d, c] : shapes) row[d] += g * mht::poly_eval(c, (nd.t[q] - a) / h);
        }
    }
    return row;
}

/// (2/T) int_0^T f(t) basis_k(t) dt by tanh-sinh quadrature, split at the zeros of the basis.
template <class F>
double coeff_tanh_sinh(F&& f, double T, mht::Basis basis, std::size_t k) {
    using std::numbers::pi;
    const double lam = mht::lambda_k(k, T);
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double s = 0.0;
    const std::size_t pieces = k + 1;
    for (std::size_t i = 0; i < pieces; ++i) {
        const double a = T * double(i) / double(pieces), b = T * double(i + 1) / double(pieces);
        s += ts.integrate(
            [&](double t) { return f(t) * (basis == mht::Basis::sine ? std::sin(lam * t) : std::cos(lam * t)); }, a,
            b, 1e-14);
    }
    return 2.0 / T * s;
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    Vec v(n);
    for (double& x : v) x = d(rng);
    return v;
}

} // namespace oracle
