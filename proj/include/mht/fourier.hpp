#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dense.hpp"
#include "fem.hpp"
#include "quadrature.hpp"

namespace mht {

// Series on (0,T) in sin(lambda_k t) resp. cos(lambda_k t), lambda_k = (pi/2 + k pi)/T.
struct SineSeries {
    double T;
    Vec coeffs;
};
struct CosineSeries {
    double T;
    Vec coeffs;
};

inline double lambda_k(std::size_t k, double T) {
    using std::numbers::pi;
    return (0.5 * pi + double(k) * pi) / T;
}

inline CosineSeries ht_transform(const SineSeries& x) { return {x.T, x.coeffs}; }
inline SineSeries ht_inverse(const CosineSeries& x) { return {x.T, x.coeffs}; }

inline double series_eval(const SineSeries& x, double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.coeffs.size(); ++k) s += x.coeffs[k] * std::sin(lambda_k(k, x.T) * t);
    return s;
}
inline double series_eval(const CosineSeries& x, double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.coeffs.size(); ++k) s += x.coeffs[k] * std::cos(lambda_k(k, x.T) * t);
    return s;
}

enum class NormKind { L2, Hs_primal, Hs_dual_half };

inline double series_norm_coeffs(const Vec& c, double T, NormKind kind, double s = 0.0) {
    KahanSum acc;
    for (std::size_t k = 0; k < c.size(); ++k) {
        double w = 1.0;
        if (kind == NormKind::Hs_primal) w = std::pow(lambda_k(k, T), 2.0 * s);
        else if (kind == NormKind::Hs_dual_half) w = 1.0 / lambda_k(k, T);
        acc.add(w * c[k] * c[k]);
    }
    return std::sqrt(0.5 * T * acc.value());
}
inline double series_norm(const SineSeries& x, NormKind kind, double s = 0.0) {
    return series_norm_coeffs(x.coeffs, x.T, kind, s);
}
inline double series_norm(const CosineSeries& x, NormKind kind, double s = 0.0) {
    return series_norm_coeffs(x.coeffs, x.T, kind, s);
}

/// L2 inner product of two series in the same basis (Parseval).
inline double series_inner(const Vec& a, const Vec& b, double T) {
    KahanSum acc;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) acc.add(a[k] * b[k]);
    return 0.5 * T * acc.value();
}

/// (2/T) int_0^T f basis_k for k < K, composite Gauss-Legendre.
inline Vec fourier_coeffs(const std::function<double(double)>& f, double T, Basis basis, std::size_t K,
                          const QuadratureSpec& q = {}) {
    using std::numbers::pi;
    const GaussRule& rule = gauss_rule<16>();
    const int per_seg = int(rule.x.size());
    auto map = [&](double tau, double& jac) {
        // tau in [0,1] -> t in [0,T]
        if (q.map == SingMap::none) { jac = T; return T * tau; }
        const double e = 1.0 / q.alpha;
        const double s = std::pow(tau, e);
        jac = T * e * std::pow(tau, e - 1.0);
        return q.map == SingMap::power_left ? T * s : T - T * s;
    };
    // Coefficients k in [k0, k1) share one composite rule sized for k1; the basis is advanced in k
    // by the angle addition formula, so each node costs a few flops per coefficient.
    auto integrate = [&](std::size_t k0, std::size_t k1, std::size_t segs, Vec& res) {
        using std::numbers::pi;
        std::vector<double> c(k1 - k0, 0.0);
        for (std::size_t sgi = 0; sgi < segs; ++sgi) {
            const double a = double(sgi) / double(segs), b = double(sgi + 1) / double(segs);
            const double cm = 0.5 * (a + b), hw = 0.5 * (b - a);
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                double jac;
                const double t = map(cm + hw * rule.x[i], jac);
                const double wf = rule.w[i] * hw * jac * f(t);
                double cs = std::cos(lambda_k(k0, T) * t), sn = std::sin(lambda_k(k0, T) * t);
                const double dc = std::cos(pi * t / T), ds = std::sin(pi * t / T);
                for (std::size_t k = k0; k < k1; ++k) {
                    c[k - k0] += wf * (basis == Basis::sine ? sn : cs);
                    const double nc = cs * dc - sn * ds;
                    sn = sn * dc + cs * ds;
                    cs = nc;
                }
            }
        }
        res.resize(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) res[k] = 2.0 / T * c[k];
    };
    Vec out(K);
    const int ppo = std::max(8, q.points_per_oscillation);
    const double stretch = q.map == SingMap::none ? 1.0 : 1.0 / q.alpha;
    for (std::size_t k0 = 0; k0 < K;) {
        const std::size_t k1 = std::min(K, std::max<std::size_t>(k0 + 1, 2 * k0));
        // half periods of basis_k on (0,T): k + 1/2; the map stretches near the endpoint
        std::size_t segs = std::size_t(std::ceil(double(k1) * stretch * ppo / per_seg));
        segs = std::max<std::size_t>(segs, 2);
        Vec prev, cur;
        integrate(k0, k1, segs, prev);
        double err = 0.0;
        bool ok = false;
        while (segs * per_seg * 2 <= std::size_t(q.max_nodes)) {
            segs *= 2;
            integrate(k0, k1, segs, cur);
            err = 0.0;
            for (std::size_t k = 0; k < cur.size(); ++k) err = std::max(err, std::abs(cur[k] - prev[k]));
            prev.swap(cur);
            if (err <= q.tol) { ok = true; break; }
        }
        if (!ok) throw QuadratureError("fourier_coeffs: tolerance not reached", err);
        std::copy(prev.begin(), prev.end(), out.begin() + long(k0));
        k0 = k1;
    }
    return out;
}

namespace detail {

// sin(pi z / (2T)) where z in (0, 2T) is given together with 2T - z for accuracy.
inline double sin_half(double z, double z_from_2T, double T) {
    using std::numbers::pi;
    return z <= T ? std::sin(pi * z / (2.0 * T)) : std::sin(pi * z_from_2T / (2.0 * T));
}

// Sorted breakpoints of (0,T) strictly inside, merged with x.
inline std::vector<double> split_points(double T, const std::vector<double>& breaks, double x) {
    std::vector<double> p{0.0, T, x};
    for (double b : breaks)
        if (b > 0.0 && b < T) p.push_back(b);
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

} // namespace detail

/// (H_T v)(t) = (1/2T) v.p. int_0^T [csc(pi(s+t)/2T) + csc(pi(s-t)/2T)] v(s) ds.
/// v receives (s, T - s). Breakpoints mark nonsmooth points of v.
template <class V>
double kernel_apply_vp_d(V&& v, double t, double dt, double T, const std::vector<double>& breaks = {}) {
    using std::numbers::pi;
    const double vt = v(t, dt);
    auto pts = detail::split_points(T, breaks, t);
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const bool right_of_t = a >= t;
        acc.add(graded_integrate3(
            [&](double s, double da, double db) {
                // distances of s to T and to t, computed from the segment ends
                const double sT = (b == T) ? db : T - s;
                double st; // s - t
                if (right_of_t && a == t) st = da;
                else if (!right_of_t && b == t) st = -db;
                else st = s - t;
                const double vs = v(s, sT);
                const double k1 = 1.0 / detail::sin_half(s + t, sT + dt, T);
                const double k2 = 1.0 / std::sin(pi * st / (2.0 * T));
                return vs * k1 + (vs - vt) * k2;
            },
            a, b, true, true, 24));
    }
    const double logterm = (2.0 * T / pi) *
                           std::log(std::tan(pi * dt / (4.0 * T)) / std::tan(pi * t / (4.0 * T)));
    return (acc.value() + vt * logterm) / (2.0 * T);
}

inline double kernel_apply_vp(const std::function<double(double)>& v, double t, double T,
                              const std::vector<double>& breaks = {}) {
    return kernel_apply_vp_d([&](double s, double) { return v(s); }, t, T - t, T, breaks);
}

/// (H_T^{-1} w)(x) = (1/2T) [int w csc(pi(x+y)/2T) dy - v.p. int w csc(pi(y-x)/2T) dy].
template <class W>
double hinv_kernel_apply_d(W&& w, double x, double dx, double T, const std::vector<double>& breaks = {}) {
    using std::numbers::pi;
    const double wx = w(x, dx);
    auto pts = detail::split_points(T, breaks, x);
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const bool right_of_x = a >= x;
        acc.add(graded_integrate3(
            [&](double y, double da, double db) {
                const double yT = (b == T) ? db : T - y;
                double yx;
                if (right_of_x && a == x) yx = da;
                else if (!right_of_x && b == x) yx = -db;
                else yx = y - x;
                const double wy = w(y, yT);
                const double k1 = 1.0 / detail::sin_half(x + y, dx + yT, T);
                const double k2 = 1.0 / std::sin(pi * yx / (2.0 * T));
                return wy * k1 - (wy - wx) * k2;
            },
            a, b, true, true, 24));
    }
    const double logterm = (2.0 * T / pi) *
                           std::log(std::tan(pi * dx / (4.0 * T)) / std::tan(pi * x / (4.0 * T)));
    return (acc.value() - wx * logterm) / (2.0 * T);
}

inline double hinv_kernel_apply(const std::function<double(double)>& w, double x, double T,
                                const std::vector<double>& breaks = {}) {
    return hinv_kernel_apply_d([&](double s, double) { return w(s); }, x, T - x, T, breaks);
}

enum class Parity { odd, even };

/// (1/pi) v.p. int over one 4T-period of (E v)(s)/(t-s) ds, periodized kernel.
inline double classical_hilbert_of_extension(const std::function<double(double)>& v, Parity parity,
                                             double t, double T, const std::vector<double>& breaks = {}) {
    using std::numbers::pi;
    const double P = 4.0 * T;
    auto K = [&](double z) { return std::cos(pi * z / P) / std::sin(pi * z / P) / P; };
    const double sg = parity == Parity::odd ? 1.0 : -1.0;
    const double vt = v(t);
    auto pts = detail::split_points(T, breaks, t);
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const bool right_of_t = a >= t;
        acc.add(graded_integrate3(
            [&](double s, double da, double db) {
                double ts; // t - s
                if (right_of_t && a == t) ts = -da;
                else if (!right_of_t && b == t) ts = db;
                else ts = t - s;
                const double vs = v(s);
                const double reg = sg * (K(t - 2.0 * T + s) - K(t + s)) - K(t + 2.0 * T - s);
                return (vs - vt) * K(ts) + vs * reg;
            },
            a, b, true, true, 24));
    }
    // v.p. int_0^T cot(pi (t-s)/P) ds = (P/pi) ln[sin(pi t/P)/sin(pi (T-t)/P)]
    const double logterm = (1.0 / pi) * std::log(std::sin(pi * t / P) / std::sin(pi * (T - t) / P));
    return acc.value() + vt * logterm;
}

} // namespace mht
