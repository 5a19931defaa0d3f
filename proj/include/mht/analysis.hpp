#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "dense.hpp"
#include "fem.hpp"
#include "fourier.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "specfun.hpp"

namespace mht {

struct InfSupReport {
    std::size_t n;
    int nu;
    double T;
    double c_S;
    double c_S_over_h;
    DofVector u_min;
};

inline InfSupReport infsup_constant(int nu, std::size_t n, double T, const AssemblyOptions& opts = {}) {
    FESpace V(Mesh(n, T), nu);
    DenseMatrix B = hilbert_matrix(V, opts);
    DenseMatrix M = mass_matrix(V);
    GenSingular g = min_generalized_singular(B, M);
    return {n, nu, T, g.sigma_min, g.sigma_min / V.h(), DofVector(V, std::move(g.u_min))};
}

/// x_k = (pi/2 + k pi) / (2n)
inline double x_k(std::size_t k, std::size_t n) {
    using std::numbers::pi;
    return (0.5 * pi + double(k) * pi) / double(2 * n);
}

/// j x_k reduced mod 2 pi in integer arithmetic, so sin and cos stay accurate for large j.
inline double multiple_of_x_k(std::size_t j, std::size_t k, std::size_t n) {
    using std::numbers::pi;
    const std::size_t m = (j % (8 * n)) * ((2 * k + 1) % (8 * n)) % (8 * n);
    return double(m) * pi / double(4 * n);
}

namespace detail {

// cos/sin(pi m / (4n)) for m mod 8n; (2i-1) x_k = (2i-1)(2k+1) pi / (4n).
class TrigTable {
public:
    explicit TrigTable(std::size_t n) : P_(8 * n), c_(P_), s_(P_) {
        using std::numbers::pi;
        for (std::size_t m = 0; m < P_; ++m) {
            c_[m] = std::cos(pi * double(m) / double(4 * n));
            s_[m] = std::sin(pi * double(m) / double(4 * n));
        }
    }
    std::size_t period() const { return P_; }
    double cos_odd(std::size_t i, std::size_t k) const { return c_[idx(i, k)]; } // cos((2i-1) x_k), i >= 1
    double sin_odd(std::size_t i, std::size_t k) const { return s_[idx(i, k)]; }
    double sin_x(std::size_t k) const { return s_[(2 * k + 1) % P_]; }
    double cos_x(std::size_t k) const { return c_[(2 * k + 1) % P_]; }

private:
    std::size_t idx(std::size_t i, std::size_t k) const {
        return ((2 * i - 1) % P_) * ((2 * k + 1) % P_) % P_;
    }
    std::size_t P_;
    Vec c_, s_;
};

inline void require_pwc(const DofVector& x, const char* what) {
    if (x.space.nu != 0) throw std::invalid_argument(std::string(what) + ": piecewise constant space required");
}

// x cos x - sin x without cancellation for small x
inline double xcos_minus_sin(double x) {
    if (std::abs(x) > 0.2) return x * std::cos(x) - std::sin(x);
    // sum_j (-1)^j 2j x^{2j+1} / (2j+1)!
    double s = 0.0, term = x; // x^{2j+1}/(2j+1)!
    for (int j = 1; j < 12; ++j) {
        term *= x * x / double((2 * j) * (2 * j + 1));
        s += ((j % 2) ? -1.0 : 1.0) * 2.0 * j * term;
    }
    return s;
}

inline double pwc_norm(const DofVector& x) {
    double s = 0.0;
    for (double v : x.values) s += v * v;
    return std::sqrt(x.space.h() * s);
}

} // namespace detail

/// Cosine coefficient ubar_k = (2/n)(sin x_k / x_k) sum_i u_i cos((2i-1) x_k) of a step function.
inline double pwc_cos_coeffs(const DofVector& x, std::size_t k) {
    detail::require_pwc(x, "pwc_cos_coeffs");
    const std::size_t n = x.space.n();
    const detail::TrigTable tt(n);
    KahanSum s;
    for (std::size_t i = 1; i <= n; ++i) s.add(x.values[i - 1] * tt.cos_odd(i, k));
    return 2.0 / double(n) * tt.sin_x(k) / x_k(k, n) * s.value();
}

/// ubar_0 .. ubar_{K-1}.
inline Vec pwc_cos_coeffs_all(const DofVector& x, std::size_t K) {
    detail::require_pwc(x, "pwc_cos_coeffs");
    const std::size_t n = x.space.n();
    const detail::TrigTable tt(n);
    const std::size_t P = tt.period();
    // the coefficient pattern repeats in k with period 4n apart from the 1/x_k factor
    const std::size_t per = std::min(K, 4 * n);
    Vec base(per);
    for (std::size_t k = 0; k < per; ++k) {
        KahanSum s;
        for (std::size_t i = 1; i <= n; ++i) s.add(x.values[i - 1] * tt.cos_odd(i, k));
        base[k] = 2.0 / double(n) * tt.sin_x(k) * s.value();
    }
    (void)P;
    Vec c(K);
    for (std::size_t k = 0; k < K; ++k) c[k] = base[k % per] / x_k(k, n);
    return c;
}

struct NormEquivalence {
    double norm2;  // ||x||^2
    double S_M;    // (T/2) sum_{k <= n^2} ubar_k^2
    double S_nm1;  // (T/2)(pi^2/3) sum_{k <= n-1} ubar_k^2
    bool lower_ok, upper_ok, pi_ok;
    double margin_lower() const { return norm2 - S_M; }
    double margin_upper() const { return 2.0 * S_M - norm2; }
    double margin_pi() const { return S_nm1 - norm2; }
};

/// S_M <= ||x||^2 <= 2 S_M (M = n^2) and ||x||^2 <= S_{n-1}; throws naming the broken inequality.
inline NormEquivalence norm_equivalence_check(const DofVector& x, bool throw_on_failure = true) {
    using std::numbers::pi;
    detail::require_pwc(x, "norm_equivalence_check");
    const std::size_t n = x.space.n();
    const double T = x.space.T();
    Vec c = pwc_cos_coeffs_all(x, n * n + 1);
    KahanSum sm, sn;
    for (std::size_t k = 0; k < c.size(); ++k) {
        sm.add(c[k] * c[k]);
        if (k + 1 <= n) sn.add(c[k] * c[k]);
    }
    NormEquivalence r;
    r.norm2 = std::pow(detail::pwc_norm(x), 2);
    r.S_M = 0.5 * T * sm.value();
    r.S_nm1 = 0.5 * T * pi * pi / 3.0 * sn.value();
    const double slack = 1e-12 * std::max(1.0, r.norm2);
    r.lower_ok = r.S_M <= r.norm2 + slack;
    r.upper_ok = r.norm2 <= 2.0 * r.S_M + slack;
    r.pi_ok = r.norm2 <= r.S_nm1 + slack;
    if (throw_on_failure) {
        if (!r.lower_ok) throw std::logic_error("norm equivalence: S_M <= ||x||^2 violated");
        if (!r.upper_ok) throw std::logic_error("norm equivalence: ||x||^2 <= 2 S_M violated");
        if (!r.pi_ok) throw std::logic_error("norm equivalence: ||x||^2 <= (pi^2/3) S_{n-1} violated");
    }
    return r;
}

/// Lower bound c_S(x) in terms of the number of cosine modes M that carry the norm.
inline double cs_formula(std::size_t n, std::size_t M) {
    using std::numbers::pi;
    const double nn = double(n), m = double(2 * M + 1);
    return 2.0 * std::sqrt(3.0) / (pi * pi) * (16.0 * nn * nn - 8.0 * nn * m) / ((4.0 * nn - m) * (4.0 * nn - m));
}

struct MinimalM {
    std::size_t M;
    double c_S;
};

inline MinimalM minimal_M_and_cs(const DofVector& x) {
    using std::numbers::pi;
    detail::require_pwc(x, "minimal_M_and_cs");
    const std::size_t n = x.space.n();
    const double T = x.space.T();
    const double nx2 = std::pow(detail::pwc_norm(x), 2);
    if (nx2 == 0.0) throw std::invalid_argument("minimal_M_and_cs: x = 0");
    Vec c = pwc_cos_coeffs_all(x, n);
    KahanSum s;
    std::size_t M = n - 1;
    for (std::size_t m = 0; m < n; ++m) {
        s.add(c[m] * c[m]);
        if (nx2 <= 0.5 * T * pi * pi / 3.0 * s.value() * (1.0 + 1e-13)) {
            M = m;
            break;
        }
    }
    return {M, cs_formula(n, M)};
}

struct ProjectedInverse {
    DofVector w;
    double norm;
};

/// w = Q_h H_T^{-1} x for a step function x, from its cosine coefficients and gamma(k,n).
inline ProjectedInverse qh_ht_inverse(const DofVector& x) {
    detail::require_pwc(x, "qh_ht_inverse");
    const std::size_t n = x.space.n();
    const detail::TrigTable tt(n);
    Vec c = pwc_cos_coeffs_all(x, n);
    Vec a(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = double(2 * k + 1) / double(4 * n - 1 - 2 * k);
        const double g = gamma_kn(long(k), long(n)) - gamma_kn(long(2 * n - 1 - k), long(n)) * r * r;
        a[k] = c[k] * g * tt.sin_x(k) / x_k(k, n);
    }
    DofVector w(x.space);
    for (std::size_t j = 1; j <= n; ++j) {
        KahanSum s;
        for (std::size_t k = 0; k < n; ++k) s.add(a[k] * tt.sin_odd(j, k));
        w.values[j - 1] = s.value();
    }
    const double nw = detail::pwc_norm(w);
    return {std::move(w), nw};
}

/// <x, H_T w> for step functions; with w = Q_h H_T^{-1} x this equals ||w||^2.
inline double ht_pairing(const DofVector& x, const DofVector& w, const DenseMatrix& B) {
    // B[j][i] = <psi_i, H_T psi_j>
    return dot(w.values, matvec(B, x.values));
}

struct ResidualInverse {
    DofVector w;   // Q_h H_T^{-1}(u - Q_h u)
    double norm;
    DofVector qhu; // Q_h u
};

/// Q_h H_T^{-1}(u - Q_h u): w_j = (f_j - (B q)_j)/h with f_j = <u, H_T psi_j>, q = Q_h u.
inline ResidualInverse qh_ht_inverse_residual(const Func& u, std::size_t n, double T,
                                              const DenseMatrix* B0 = nullptr, const Vec* f0 = nullptr,
                                              unsigned threads = 1) {
    FESpace V(Mesh(n, T), 0);
    DenseMatrix Bl;
    if (!B0) Bl = hilbert_matrix(V, {AssemblyMethod::folded_exact, 0, 1e-10, std::size_t(1) << 26, threads});
    const DenseMatrix& B = B0 ? *B0 : Bl;
    Vec f = f0 ? *f0 : hilbert_rhs(u, V, RhsMethod::automatic, threads);
    DofVector q = l2_project(u, V);
    Vec bq = matvec(B, q.values);
    DofVector w(V);
    const double h = V.h();
    for (std::size_t j = 0; j < n; ++j) w.values[j] = (f[j] - bq[j]) / h;
    const double nw = detail::pwc_norm(w);
    return {std::move(w), nw, std::move(q)};
}

/// Truncated spectral evaluation of the same quantity: sum_{k<K} (ubar_k - qbar_k)(sin x_k/x_k) sin((2j-1)x_k)
/// with quadrature coefficients of u; slow, for cross-checks.
inline Vec qh_ht_inverse_residual_spectral(const Func& u, std::size_t n, double T, std::size_t K,
                                           const QuadratureSpec& q = {}) {
    FESpace V(Mesh(n, T), 0);
    DofVector qhu = l2_project(u, V);
    Vec ub = fourier_coeffs(u.f, T, Basis::cosine, K, q);
    Vec qb = pwc_cos_coeffs_all(qhu, K);
    const detail::TrigTable tt(n);
    Vec w(n, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        KahanSum s;
        for (std::size_t k = 0; k < K; ++k) s.add((ub[k] - qb[k]) * tt.sin_x(k) / x_k(k, n) * tt.sin_odd(j, k));
        w[j - 1] = s.value();
    }
    return w;
}

struct Projection {
    DofVector u_h;
    double error;
};

/// Solve B x = f for the H_T based projection and measure ||u - u_h||.
inline Projection ht_project(const Func& u, int nu, std::size_t n, double T, const AssemblyOptions& opts = {}) {
    FESpace V(Mesh(n, T), nu);
    DenseMatrix B = hilbert_matrix(V, opts);
    Vec f = hilbert_rhs(u, V, RhsMethod::automatic, opts.threads);
    DofVector uh(V, solve_dense(B, f));
    const double e = fe_l2_error(u, uh);
    return {std::move(uh), e};
}

/// Same with B and f supplied.
inline Projection ht_project(const Func& u, const FESpace& V, const DenseMatrix& B, const Vec& f) {
    DofVector uh(V, solve_dense(B, f));
    const double e = fe_l2_error(u, uh);
    return {std::move(uh), e};
}

/// F(x) for 0 < x <= pi/2, the folding factor of Q_h H_T^{-1} on the linear part of the residual.
inline double f_kernel(double x) {
    using std::numbers::pi;
    if (!(x > 0.0) || x > 0.5 * pi * (1.0 + 1e-15))
        throw DomainError("f_kernel: x outside (0, pi/2]");
    const double a = x / pi, c = std::cos(x), s = std::sin(x);
    const double zp2 = hurwitz_tail(2, 1.0 + a) / (pi * pi), zm2 = hurwitz_tail(2, 1.0 - a) / (pi * pi);
    const double zp3 = hurwitz_tail(3, 1.0 + a) / (pi * pi * pi), zm3 = hurwitz_tail(3, 1.0 - a) / (pi * pi * pi);
    const double mu_sum = c * (zp2 - zm2) - s * (zp3 + zm3);
    const double x3 = x * x * x;
    return (1.0 + x3 / detail::xcos_minus_sin(x) * mu_sum) * s / x;
}

/// The mu-sum of F by direct summation, for checks.
inline double f_kernel_mu_sum_direct(double x, std::size_t terms) {
    using std::numbers::pi;
    const double c = std::cos(x), s = std::sin(x);
    KahanSum acc;
    for (std::size_t mu = terms; mu >= 1; --mu) {
        const double p = x + double(mu) * pi, m = double(mu) * pi - x;
        acc.add((p * c - s) / (p * p * p) - (m * c + s) / (m * m * m));
    }
    return acc.value();
}

inline double f_kernel_mu_sum(double x) {
    using std::numbers::pi;
    const double a = x / pi, c = std::cos(x), s = std::sin(x);
    return c * (hurwitz_tail(2, 1.0 + a) - hurwitz_tail(2, 1.0 - a)) / (pi * pi) -
           s * (hurwitz_tail(3, 1.0 + a) + hurwitz_tail(3, 1.0 - a)) / (pi * pi * pi);
}

/// [F(x)/x (cos x - sin x / x)]^2 - (2/(3 pi)) x^2, nonpositive on (0, pi/2].
inline double f_bound_gap(double x) {
    using std::numbers::pi;
    const double l = f_kernel(x) / x * detail::xcos_minus_sin(x) / x;
    return l * l - 2.0 / (3.0 * pi) * x * x;
}

/// x_i = i (pi/2) / points, i = 1..points, with the gap of the F bound.
inline std::vector<std::pair<double, double>> f_bound_grid(std::size_t points = 10000) {
    using std::numbers::pi;
    std::vector<std::pair<double, double>> g(points);
    for (std::size_t i = 1; i <= points; ++i) {
        const double x = 0.5 * pi * double(i) / double(points);
        g[i - 1] = {x, f_bound_gap(x)};
    }
    return g;
}

/// u^1 = (t - midpoint) u'(t_{i-1}) on each element as a piecewise polynomial.
inline PwPoly u1_pw(const Func& u, std::size_t n, double T) {
    PwPoly p{n, T, {}};
    const double h = T / double(n);
    for (std::size_t e = 0; e < n; ++e) {
        const double d = u.df(double(e) * h);
        p.pieces.push_back({e, {-0.5 * h * d, h * d}});
    }
    return p;
}

struct Wh1 {
    Vec w;          // w_i^1
    double norm2;   // ||w_h^1||^2
    double bound;   // (pi/96) h^4 ||u''||^2 + (pi/48) h^3 u'(0)^2
};

namespace detail {

inline double norm_ddf2(const Func& u, std::size_t n, double T) {
    const double h = T / double(n);
    KahanSum s;
    for (std::size_t e = 0; e < n; ++e)
        s.add(gauss_integrate([&](double t) { return u.ddf(t) * u.ddf(t); }, double(e) * h, double(e + 1) * h));
    return s.value();
}

} // namespace detail

/// w_h^1 = Q_h H_T^{-1} u^1 from F(x_k) and the cosine coefficients of u^1.
inline Wh1 wh1_norm(const Func& u, std::size_t n, double T) {
    const double h = T / double(n);
    const detail::TrigTable tt(n);
    Vec du(n);
    for (std::size_t i = 0; i < n; ++i) du[i] = u.df(double(i) * h);
    Vec a(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = x_k(k, n);
        KahanSum s;
        for (std::size_t i = 1; i <= n; ++i) s.add(du[i - 1] * tt.sin_odd(i, k));
        const double u1k = h / double(n) * detail::xcos_minus_sin(x) / (x * x) * s.value();
        a[k] = f_kernel(x) * u1k;
    }
    Wh1 r;
    r.w.assign(n, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        KahanSum s;
        for (std::size_t k = 0; k < n; ++k) s.add(a[k] * tt.sin_odd(i, k));
        r.w[i - 1] = s.value();
    }
    r.norm2 = h * dot(r.w, r.w);
    const double d0 = du[0];
    r.bound = std::numbers::pi / 96.0 * std::pow(h, 4) * detail::norm_ddf2(u, n, T) +
              std::numbers::pi / 48.0 * std::pow(h, 3) * d0 * d0;
    return r;
}

/// Same w_i^1 from the exact folded pairing of u^1 with H_T psi_i.
inline Vec wh1_folded(const Func& u, std::size_t n, double T) {
    FESpace V(Mesh(n, T), 0);
    DenseMatrix P = folded_pair_matrix(basis_functions(V), {u1_pw(u, n, T)}, n, T);
    Vec w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = P(j, 0) / V.h();
    return w;
}

struct SplitResult {
    std::function<double(double)> u1, u2;
    double norm_u1 = 0.0, norm_u2 = 0.0, norm_u2_bound = 0.0, norm_wh1 = 0.0;
    Vec du_nodes; // u'(t_{i-1}), i = 1..n
    double du0 = 0.0;
};

/// u - Q_h u = u^1 + u^2 with u^2 = -(1/2h) int Gtilde(s,t) u''(s) ds on each element.
inline SplitResult split_u1_u2(const Func& u, std::size_t n, double T) {
    if (!u.df || !u.ddf) throw std::invalid_argument("split_u1_u2: derivatives required");
    const double h = T / double(n);
    SplitResult r;
    r.du_nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.du_nodes[i] = u.df(double(i) * h);
    r.du0 = r.du_nodes[0];
    auto elem = [n, h](double t) { return std::min(n - 1, std::size_t(std::max(0.0, t) / h)); };
    const Vec du = r.du_nodes;
    r.u1 = [du, elem, h](double t) {
        const std::size_t e = elem(t);
        return (t - (double(e) + 0.5) * h) * du[e];
    };
    Func uu = u;
    r.u2 = [uu, elem, h](double t) {
        const std::size_t e = elem(t);
        const double a = double(e) * h, b = a + h;
        const double left = gauss_integrate(
            [&](double s) { return ((s - a) * (s - a) - h * (2.0 * t - a - b)) * uu.ddf(s); }, a, t);
        const double right = gauss_integrate([&](double s) { return (s - b) * (s - b) * uu.ddf(s); }, t, b);
        return -0.5 / h * (left + right);
    };
    KahanSum n1, n2;
    for (std::size_t e = 0; e < n; ++e) {
        const double a = double(e) * h, b = a + h;
        n1.add(gauss_integrate([&](double t) { return std::pow(r.u1(t), 2); }, a, b));
        n2.add(gauss_integrate([&](double t) { return std::pow(r.u2(t), 2); }, a, b));
    }
    r.norm_u1 = std::sqrt(n1.value());
    r.norm_u2 = std::sqrt(n2.value());
    r.norm_u2_bound = h * h / 3.0 * std::sqrt(detail::norm_ddf2(u, n, T));
    r.norm_wh1 = std::sqrt(wh1_norm(u, n, T).norm2);
    return r;
}

/// log2 of successive ratios; the first entry is NaN.
inline Vec eoc(const Vec& values) {
    if (values.size() < 2) throw std::invalid_argument("eoc: at least two values required");
    Vec r(values.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(values[i] > 0.0)) throw std::domain_error("eoc: non-positive value");
    for (std::size_t i = 1; i < values.size(); ++i) r[i] = std::log2(values[i - 1] / values[i]);
    return r;
}

struct ResidualStability {
    double c_S;        // realized quotient <d, H_T w>/(||d|| ||w||) = ||w|| / ||d||, d = u_h - Q_h u
    double c_S_bound;  // closed form lower bound from the minimal number of carrying modes
    std::size_t M;
    double res_norm;   // ||Q_h H_T^{-1}(u - Q_h u)||
    double err_norm;   // ||u_h - Q_h u||
};

/// For nu = 0: the stability quotient of u_h - Q_h u, its closed form bound, and ||Q_h H_T^{-1}(u - Q_h u)||, optionally with B and f precomputed.
inline ResidualStability cs_of_residual(const Func& u, std::size_t n, double T, const DenseMatrix* B0 = nullptr,
                                        const Vec* f0 = nullptr, unsigned threads = 1) {
    FESpace V(Mesh(n, T), 0);
    DenseMatrix Bl;
    if (!B0) Bl = hilbert_matrix(V, {AssemblyMethod::folded_exact, 0, 1e-10, std::size_t(1) << 26, threads});
    const DenseMatrix& B = B0 ? *B0 : Bl;
    Vec fl;
    if (!f0) fl = hilbert_rhs(u, V, RhsMethod::automatic, threads);
    const Vec& f = f0 ? *f0 : fl;
    ResidualInverse ri = qh_ht_inverse_residual(u, n, T, &B, &f);
    DofVector uh(V, solve_dense(B, f));
    DofVector d(V);
    for (std::size_t i = 0; i < n; ++i) d.values[i] = uh.values[i] - ri.qhu.values[i];
    MinimalM mm = minimal_M_and_cs(d);
    const double nd = detail::pwc_norm(d);
    return {ri.norm / nd, mm.c_S, mm.M, ri.norm, nd};
}

struct ConvergenceRow {
    std::size_t n;
    double h;
    double value;
    double eoc; // NaN in the first row
};

struct ConvergenceTable {
    std::string quantity;
    int nu = 0;
    double T = 2.0;
    std::string func_id;
    std::vector<ConvergenceRow> rows;

    static ConvergenceTable from_values(std::string quantity, int nu, double T, std::string func_id,
                                        const std::vector<std::size_t>& ns, const Vec& values) {
        if (ns.size() != values.size()) throw std::invalid_argument("table: size mismatch");
        for (std::size_t i = 1; i < ns.size(); ++i)
            if (ns[i] != 2 * ns[i - 1]) throw std::invalid_argument("table: n must double row to row");
        ConvergenceTable t{std::move(quantity), nu, T, std::move(func_id), {}};
        // an exactly reproduced function has zero error and no rate
        Vec e(values.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i - 1] > 0.0 && values[i] > 0.0) e[i] = std::log2(values[i - 1] / values[i]);
        for (std::size_t i = 0; i < ns.size(); ++i) t.rows.push_back({ns[i], T / double(ns[i]), values[i], e[i]});
        return t;
    }
};

} // namespace mht
