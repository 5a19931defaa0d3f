#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dense.hpp"
#include "fem.hpp"
#include "fourier.hpp"
#include "functions.hpp"
#include "piecewise.hpp"
#include "specfun.hpp"

namespace mht {

enum class AssemblyMethod { folded_exact, truncated_spectral };

struct AssemblyOptions {
    AssemblyMethod method = AssemblyMethod::folded_exact;
    std::size_t K = 0;        // truncated_spectral start; 0 picks max(1024, 8 n^2)
    double tol = 1e-10;       // entry tolerance for truncated_spectral
    std::size_t K_cap = std::size_t(1) << 26;
    unsigned threads = 1;
    bool parallel() const { return threads > 1; }
};

class AssemblyError : public std::runtime_error {
public:
    AssemblyError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

namespace detail {

template <class F>
void parallel_rows(std::size_t rows, unsigned threads, F&& f) {
    if (threads <= 1 || rows < 2) {
        for (std::size_t r = 0; r < rows; ++r) f(r);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t r = t; r < rows; r += threads) f(r);
        });
    for (auto& th : pool) th.join();
}

// A jump term written as Re/Im of alpha e^{2 i q x_k} x_k^{-(m+1)}.
struct FoldTerm {
    long q;
    int m;
    double re, im;
};

inline std::vector<FoldTerm> fold_terms(const std::vector<Jump>& js, std::size_t n, double T) {
    std::vector<FoldTerm> out;
    const double c = T / (2.0 * double(n));
    for (const auto& j : js) {
        const double C = -((j.m % 2 == 0) ? 1.0 : -1.0) * j.J * std::pow(c, j.m + 1);
        double re = 0.0, im = 0.0;
        switch ((j.m + 1) % 4) { // (-i)^{m+1}
        case 0: re = C; break;
        case 1: im = -C; break;
        case 2: re = -C; break;
        default: im = C; break;
        }
        out.push_back({j.q, j.m, re, im});
    }
    return out;
}

} // namespace detail

/// Number of low modes x_k < x_c that are summed directly instead of through the jump expansion,
/// whose terms cancel like x_k^{-p} for small x_k.
inline std::size_t low_mode_count(std::size_t n, double xc = 0.5) {
    using std::numbers::pi;
    std::size_t kc = 0;
    while (kc < 2 * n && (0.5 * pi + double(kc) * pi) / double(2 * n) < xc) ++kc;
    return kc;
}

/// S_p(s) = sum_{k<2n} Z_p(x_k) {cos, sin}(2 s x_k), Z_p(x) = sum_mu (x + mu pi)^{-p};
/// for k < kc the mu = 0 term is left out of Z_p.
class FoldedSums {
public:
    FoldedSums(std::size_t n, double T, int pmax, std::size_t kc = 0) : n_(n), T_(T), pmax_(pmax) {
        using std::numbers::pi;
        const std::size_t K0 = 2 * n, S = 2 * n + 1, P = 4 * n;
        std::vector<double> ct(P), st(P);
        for (std::size_t m = 0; m < P; ++m) {
            ct[m] = std::cos(pi * double(m) / double(2 * n));
            st[m] = std::sin(pi * double(m) / double(2 * n));
        }
        sc_.assign(std::size_t(pmax + 1) * S, 0.0);
        ss_.assign(std::size_t(pmax + 1) * S, 0.0);
        std::vector<double> Z(K0);
        for (int p = 2; p <= pmax; ++p) {
            for (std::size_t k = 0; k < K0; ++k) {
                const double x = (0.5 * pi + double(k) * pi) / double(2 * n);
                Z[k] = k < kc ? std::pow(pi, -p) * hurwitz_zeta(p, x / pi + 1.0) : shifted_power_sum(p, x);
            }
            for (std::size_t s = 0; s < S; ++s) {
                long double ac = 0.0L, as = 0.0L;
                std::size_t idx = s % P; // s (2k+1) mod 4n, advancing by 2s
                const std::size_t step = (2 * s) % P;
                for (std::size_t k = 0; k < K0; ++k) {
                    ac += (long double)Z[k] * ct[idx];
                    as += (long double)Z[k] * st[idx];
                    idx += step;
                    if (idx >= P) idx -= P;
                }
                sc_[std::size_t(p) * S + s] = double(ac);
                ss_[std::size_t(p) * S + s] = double(as);
            }
        }
    }

    int pmax() const { return pmax_; }
    double sc(int p, long s) const { return sc_[std::size_t(p) * (2 * n_ + 1) + std::size_t(std::labs(s))]; }
    double ss(int p, long s) const {
        const double v = ss_[std::size_t(p) * (2 * n_ + 1) + std::size_t(std::labs(s))];
        return s < 0 ? -v : v;
    }

    /// (2/T) sum_k Im E_a(lambda_k) Re E_b(lambda_k) over all k >= 0.
    double pair(const std::vector<detail::FoldTerm>& a, const std::vector<detail::FoldTerm>& b) const {
        double acc = 0.0;
        for (const auto& ta : a)
            for (const auto& tb : b) {
                const int p = ta.m + tb.m + 2;
                const long sp = ta.q + tb.q, sm = ta.q - tb.q;
                const double Ssp = ss(p, sp), Ssm = ss(p, sm), Scp = sc(p, sp), Scm = sc(p, sm);
                acc += ta.re * tb.re * (Ssp + Ssm) - ta.re * tb.im * (Scm - Scp) +
                       ta.im * tb.re * (Scm + Scp) - ta.im * tb.im * (Ssp - Ssm);
            }
        return acc / T_;
    }

private:
    std::size_t n_;
    double T_;
    int pmax_;
    std::vector<double> sc_, ss_;
};

namespace detail {

// int_0^1 tau^p e^{i w tau} d tau for |w| <= ~1.5, Taylor series.
inline std::complex<double> moment_exp(int p, double w) {
    std::complex<double> s = 0.0, term = 1.0; // (i w)^j / j!
    for (int j = 0; j < 40; ++j) {
        s += term / double(p + j + 1);
        term *= std::complex<double>(0.0, w) / double(j + 1);
        if (std::abs(term) < 1e-19) break;
    }
    return s;
}

// E(lambda_k) for k < kc from element moments; rows of Im resp. Re parts.
inline void low_mode_table(const std::vector<PwPoly>& fs, std::size_t n, double T, std::size_t kc,
                           DenseMatrix& im, DenseMatrix& re) {
    using std::numbers::pi;
    const double h = T / double(n);
    int deg = 0;
    for (const auto& f : fs) deg = std::max(deg, f.degree());
    im = DenseMatrix(fs.size(), kc);
    re = DenseMatrix(fs.size(), kc);
    const std::size_t P = 4 * n;
    for (std::size_t k = 0; k < kc; ++k) {
        const double lam = (0.5 * pi + double(k) * pi) / T;
        std::vector<std::complex<double>> mom(deg + 1);
        for (int p = 0; p <= deg; ++p) mom[p] = moment_exp(p, lam * h);
        for (std::size_t j = 0; j < fs.size(); ++j) {
            std::complex<double> E = 0.0;
            for (const auto& pc : fs[j].pieces) {
                std::complex<double> loc = 0.0;
                for (std::size_t p = 0; p < pc.c.size(); ++p) loc += pc.c[p] * mom[p];
                const std::size_t r = (pc.elem * (2 * k + 1)) % P; // lambda t_e = e (2k+1) pi / 2n
                const double ph = pi * double(r) / double(2 * n);
                E += h * std::complex<double>(std::cos(ph), std::sin(ph)) * loc;
            }
            im(j, k) = E.imag();
            re(j, k) = E.real();
        }
    }
}

} // namespace detail

/// Global polynomial u as a piecewise polynomial on the mesh.
inline PwPoly poly_on_mesh(const Poly& g, std::size_t n, double T) {
    PwPoly p{n, T, {}};
    const double h = T / double(n);
    for (std::size_t e = 0; e < n; ++e) p.pieces.push_back({e, poly_localize(g, double(e) * h, h)});
    return p;
}

inline std::vector<PwPoly> basis_functions(const FESpace& V) {
    std::vector<PwPoly> f;
    f.reserve(V.dof());
    for (std::size_t d = 0; d < V.dof(); ++d) f.push_back(basis_pw(V, d));
    return f;
}

/// M[j][i] = <b_i, H_T a_j> = (T/2) sum_k s_k(a_j) c_k(b_i), exact by folding.
inline DenseMatrix folded_pair_matrix(const std::vector<PwPoly>& a, const std::vector<PwPoly>& b,
                                      std::size_t n, double T, unsigned threads = 1) {
    int da = 0, db = 0;
    std::vector<std::vector<detail::FoldTerm>> ta, tb;
    for (const auto& f : a) { da = std::max(da, f.degree()); ta.push_back(detail::fold_terms(jumps(f), n, T)); }
    for (const auto& f : b) { db = std::max(db, f.degree()); tb.push_back(detail::fold_terms(jumps(f), n, T)); }
    const std::size_t kc = low_mode_count(n);
    FoldedSums S(n, T, da + db + 2, kc);
    DenseMatrix Ia, Ra, Ib, Rb;
    detail::low_mode_table(a, n, T, kc, Ia, Ra);
    detail::low_mode_table(b, n, T, kc, Ib, Rb);
    DenseMatrix M(a.size(), b.size());
    detail::parallel_rows(a.size(), threads, [&](std::size_t j) {
        double* r = M.row(j);
        const double* x = Ia.row(j);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double* y = Rb.row(i);
            double low = 0.0;
            for (std::size_t k = 0; k < kc; ++k) low += x[k] * y[k];
            r[i] = S.pair(ta[j], tb[i]) + 2.0 / T * low;
        }
    });
    return M;
}

namespace detail {

enum class Part { imag, real };

// (2/T) Im resp. Re of E_j(lambda_k) for k in [k0, k1): fold terms with a phase table,
// low modes k < kc from the element moments in low (rows = functions).
class ModeTable {
public:
    ModeTable(const std::vector<PwPoly>& fs, std::size_t n, double T)
        : n_(n), T_(T), kc_(low_mode_count(n)), ct_(4 * n), st_(4 * n) {
        using std::numbers::pi;
        for (const auto& f : fs) terms_.push_back(fold_terms(jumps(f), n, T));
        for (std::size_t m = 0; m < 4 * n; ++m) {
            ct_[m] = std::cos(pi * double(m) / double(2 * n));
            st_[m] = std::sin(pi * double(m) / double(2 * n));
        }
        low_mode_table(fs, n, T, kc_, lim_, lre_);
    }
    std::size_t size() const { return terms_.size(); }

    DenseMatrix block(std::size_t k0, std::size_t k1, Part part) const {
        const std::size_t L = k1 - k0, P = 4 * n_;
        DenseMatrix out(terms_.size(), L);
        const double s = 2.0 / T_;
        std::vector<double> xp(L * 5);
        int pm = 1;
        for (const auto& t : terms_)
            for (const auto& ft : t) pm = std::max(pm, ft.m + 1);
        if (pm > 4) throw std::invalid_argument("mode table: degree too high");
        for (std::size_t k = 0; k < L; ++k) {
            const double x = (0.5 * std::numbers::pi + double(k0 + k) * std::numbers::pi) / double(2 * n_);
            double v = 1.0;
            for (int p = 1; p <= pm; ++p) { v /= x; xp[k * 5 + p] = v; }
        }
        for (std::size_t j = 0; j < terms_.size(); ++j) {
            double* r = out.row(j);
            for (std::size_t k = 0; k < L; ++k) {
                const std::size_t kk = k0 + k;
                if (kk < kc_) {
                    r[k] = s * (part == Part::imag ? lim_(j, kk) : lre_(j, kk));
                    continue;
                }
                double acc = 0.0;
                for (const auto& ft : terms_[j]) {
                    const std::size_t idx = std::size_t(ft.q) * ((2 * kk + 1) % P) % P;
                    const double c = ct_[idx], sn = st_[idx];
                    // alpha e^{i phi}
                    const double v = part == Part::imag ? ft.re * sn + ft.im * c : ft.re * c - ft.im * sn;
                    acc += v * xp[k * 5 + ft.m + 1];
                }
                r[k] = s * acc;
            }
        }
        return out;
    }

private:
    std::size_t n_;
    double T_;
    std::size_t kc_;
    std::vector<std::vector<FoldTerm>> terms_;
    std::vector<double> ct_, st_;
    DenseMatrix lim_, lre_;
};

// Running truncated sums of (T/2) sum_k s_k(a_j) c_k(b_i) with doubling of K.
inline DenseMatrix truncated_pair_matrix(const std::vector<PwPoly>& a, const std::vector<PwPoly>& b,
                                         std::size_t n, double T, const AssemblyOptions& opts) {
    const ModeTable ta(a, n, T), tb(b, n, T);
    std::size_t K = opts.K ? opts.K : std::max<std::size_t>(1024, 8 * n * n);
    DenseMatrix M(a.size(), b.size());
    const std::size_t block = 2048;
    auto add_range = [&](std::size_t k0, std::size_t k1, DenseMatrix& acc) {
        for (std::size_t kb = k0; kb < k1; kb += block) {
            const std::size_t ke = std::min(k1, kb + block), L = ke - kb;
            const DenseMatrix Sa = ta.block(kb, ke, Part::imag), Cb = tb.block(kb, ke, Part::real);
            parallel_rows(a.size(), opts.threads, [&](std::size_t j) {
                const double* x = Sa.row(j);
                for (std::size_t i = 0; i < b.size(); ++i) {
                    const double* y = Cb.row(i);
                    double s = 0.0;
                    for (std::size_t k = 0; k < L; ++k) s += x[k] * y[k];
                    acc(j, i) += 0.5 * T * s;
                }
            });
        }
    };
    add_range(0, K, M);
    while (true) {
        if (2 * K > opts.K_cap) throw AssemblyError("truncated_spectral: tolerance not reached at K cap", double(K));
        DenseMatrix M2 = M;
        add_range(K, 2 * K, M2);
        double change = 0.0;
        for (std::size_t j = 0; j < M.rows(); ++j)
            for (std::size_t i = 0; i < M.cols(); ++i) change = std::max(change, std::abs(M2(j, i) - M(j, i)));
        M = std::move(M2);
        K *= 2;
        if (change < opts.tol) break;
    }
    return M;
}

} // namespace detail

/// Hilbert mass matrix B[j][i] = <psi_i, H_T psi_j>.
inline DenseMatrix hilbert_matrix(const FESpace& V, const AssemblyOptions& opts = {}) {
    auto f = basis_functions(V);
    if (opts.method == AssemblyMethod::folded_exact) return folded_pair_matrix(f, f, V.n(), V.T(), opts.threads);
    return detail::truncated_pair_matrix(f, f, V.n(), V.T(), opts);
}

/// Moments G[e][p] = int_{elem e} g(t) tau^p dt of g = H_T^{-1} u, p <= pmax.
inline std::vector<std::array<double, 4>> hinv_moments(const Func& u, std::size_t n, double T, unsigned threads = 1) {
    const double h = T / double(n);
    std::vector<std::array<double, 4>> G(n);
    auto uval = [&](double y, double dT) {
        if (u.f_from_T && dT < 0.25 * T) return u.f_from_T(dT);
        return u.f(y);
    };
    auto g = [&](double x, double dx) { return hinv_kernel_apply_d(uval, x, dx, T); };
    detail::parallel_rows(n, threads, [&](std::size_t e) {
        const double a = double(e) * h, b = (e + 1 == n) ? T : double(e + 1) * h;
        std::array<double, 4> m{};
        const bool graded = (e == 0) || (e + 1 == n);
        if (!graded) {
            const GaussRule& r = default_rule();
            const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                const double x = c + hw * r.x[i];
                const double tau = (x - a) / h;
                const double gv = g(x, T - x) * r.w[i] * hw;
                double tp = 1.0;
                for (int p = 0; p < 4; ++p) { m[p] += gv * tp; tp *= tau; }
            }
        } else {
            for (int p = 0; p < 4; ++p)
                m[p] = graded_integrate3(
                    [&](double x, double da, double db) {
                        const double dx = (e + 1 == n) ? db : T - x;
                        const double tau = (e == 0) ? da / h : (x - a) / h;
                        return g(x, dx) * std::pow(tau, p);
                    },
                    a, b, e == 0, e + 1 == n, 30);
        }
        G[e] = m;
    });
    return G;
}

/// <phi, g> from the element moments of g.
inline double pair_with_moments(const PwPoly& phi, const std::vector<std::array<double, 4>>& G) {
    double s = 0.0;
    for (const auto& pc : phi.pieces)
        for (std::size_t p = 0; p < pc.c.size() && p < 4; ++p) s += pc.c[p] * G[pc.elem][p];
    return s;
}

enum class RhsMethod { automatic, exact_poly, kernel, truncated_spectral };

/// f_j = <u, H_T phi_j> for a list of test functions phi_j.
inline Vec hilbert_rhs_for(const Func& u, const std::vector<PwPoly>& tests, std::size_t n, double T,
                           RhsMethod method = RhsMethod::automatic, unsigned threads = 1) {
    if (method == RhsMethod::automatic) method = u.poly ? RhsMethod::exact_poly : RhsMethod::kernel;
    Vec f(tests.size());
    if (method == RhsMethod::exact_poly) {
        if (!u.poly) throw std::invalid_argument("exact rhs needs a polynomial");
        auto ub = detail::fold_terms(jumps_global_poly(*u.poly, n, T), n, T);
        int dt = 0;
        for (const auto& t : tests) dt = std::max(dt, t.degree());
        const std::size_t kc = low_mode_count(n);
        FoldedSums S(n, T, dt + int(u.poly->size()) - 1 + 2, kc);
        DenseMatrix It, Rt, Iu, Ru;
        detail::low_mode_table(tests, n, T, kc, It, Rt);
        detail::low_mode_table({poly_on_mesh(*u.poly, n, T)}, n, T, kc, Iu, Ru);
        for (std::size_t j = 0; j < tests.size(); ++j) {
            double low = 0.0;
            for (std::size_t k = 0; k < kc; ++k) low += It(j, k) * Ru(0, k);
            f[j] = S.pair(detail::fold_terms(jumps(tests[j]), n, T), ub) + 2.0 / T * low;
        }
        return f;
    }
    if (method == RhsMethod::kernel) {
        auto G = hinv_moments(u, n, T, threads);
        for (std::size_t j = 0; j < tests.size(); ++j) f[j] = pair_with_moments(tests[j], G);
        return f;
    }
    throw std::invalid_argument("use hilbert_rhs_spectral for truncated spectral rhs");
}

inline Vec hilbert_rhs(const Func& u, const FESpace& V, RhsMethod method = RhsMethod::automatic,
                       unsigned threads = 1) {
    return hilbert_rhs_for(u, basis_functions(V), V.n(), V.T(), method, threads);
}

/// Spectral rhs with quadrature cosine coefficients of u, K doubled until the change is below tol.
inline Vec hilbert_rhs_spectral(const Func& u, const FESpace& V, std::size_t K0, double tol,
                                const QuadratureSpec& q = {}, int max_doublings = 5) {
    const double T = V.T();
    const detail::ModeTable tab(basis_functions(V), V.n(), T);
    auto partial = [&](std::size_t K) {
        Vec ub = fourier_coeffs(u.f, T, Basis::cosine, K, q);
        const DenseMatrix S = tab.block(0, K, detail::Part::imag);
        Vec f(V.dof(), 0.0);
        for (std::size_t j = 0; j < V.dof(); ++j) {
            KahanSum s;
            for (std::size_t k = 0; k < K; ++k) s.add(S(j, k) * ub[k]);
            f[j] = 0.5 * T * s.value();
        }
        return f;
    };
    std::size_t K = K0;
    Vec f = partial(K);
    double change = 0.0;
    for (int it = 0; it < max_doublings; ++it) {
        K *= 2;
        Vec g = partial(K);
        change = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) change = std::max(change, std::abs(g[j] - f[j]));
        f = std::move(g);
        if (change < tol) return f;
    }
    throw AssemblyError("hilbert_rhs: slow coefficient decay, tolerance not reached", change);
}

/// omega_j(t) = int_0^t psi_j(s) ds as a piecewise polynomial.
inline PwPoly antiderivative_pw(const PwPoly& psi) {
    PwPoly w{psi.n, psi.T, {}};
    const double h = psi.h();
    std::vector<Poly> loc(psi.n);
    for (const auto& p : psi.pieces) loc[p.elem] = p.c;
    double acc = 0.0;
    std::size_t first = psi.n;
    for (const auto& p : psi.pieces) first = std::min(first, p.elem);
    for (std::size_t e = first; e < psi.n; ++e) {
        Poly a{acc};
        if (!loc[e].empty()) {
            Poly ad = poly_antideriv(loc[e]);
            for (double& c : ad) c *= h;
            ad[0] += acc;
            a = ad;
            acc = poly_eval(a, 1.0);
        }
        w.pieces.push_back({e, a});
    }
    return w;
}

struct PetrovSystem {
    DenseMatrix A; // A[j][i] = <psi_i, H_T omega_j>
    std::vector<PwPoly> tests;
    std::function<Vec(const Func&)> rhs;
};

inline PetrovSystem petrov_system(const FESpace& V, const AssemblyOptions& opts = {}) {
    auto psi = basis_functions(V);
    std::vector<PwPoly> om;
    for (const auto& p : psi) om.push_back(antiderivative_pw(p));
    PetrovSystem P;
    P.A = opts.method == AssemblyMethod::folded_exact ? folded_pair_matrix(om, psi, V.n(), V.T(), opts.threads)
                                                      : detail::truncated_pair_matrix(om, psi, V.n(), V.T(), opts);
    P.tests = om;
    const std::size_t n = V.n();
    const double T = V.T();
    const unsigned th = opts.threads;
    P.rhs = [om, n, T, th](const Func& u) { return hilbert_rhs_for(u, om, n, T, RhsMethod::automatic, th); };
    return P;
}

/// Binary dump: uint32 n, uint32 nu, then row-major float64 entries.
inline void write_matrix_binary(const std::string& path, const DenseMatrix& B, std::uint32_t n, std::uint32_t nu) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&nu), 4);
    os.write(reinterpret_cast<const char*>(B.data()), std::streamsize(B.rows() * B.cols() * sizeof(double)));
}

inline DenseMatrix read_matrix_binary(const std::string& path, std::uint32_t& n, std::uint32_t& nu) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&nu), 4);
    const std::size_t dof = nu == 2 ? 2 * n : n;
    DenseMatrix B(dof, dof);
    is.read(reinterpret_cast<char*>(B.data()), std::streamsize(dof * dof * sizeof(double)));
    if (!is) throw std::runtime_error("truncated matrix file " + path);
    return B;
}

} // namespace mht
