#pragma once

// Positivity of the symmetric part of the Hilbert mass matrix in extended precision.
//
// (B + B^T)/2 has the smooth kernel (1/2T) csc(pi (s+t)/(2T)); the antisymmetric
// csc(pi (s-t)/(2T)) part drops out. Its Galerkin eigenvalues decay faster than
// exponentially in n (about 1e-15 at n = 16 for steps), so double precision cannot
// decide their sign beyond small meshes. Here the matrix is assembled with MPFR
// and a shifted Cholesky factorization certifies lambda_min > 0.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fem.hpp"

namespace mht {

using mp_real = boost::multiprecision::mpfr_float;

namespace detail {

struct MpRule {
    std::vector<mp_real> x, w; // Gauss-Legendre on [0,1]
};

// Newton on the Legendre recurrence, double precision starting values.
inline MpRule gauss_legendre_mp(std::size_t N) {
    MpRule r;
    r.x.resize(N);
    r.w.resize(N);
    const mp_real eps = pow(mp_real(10), -int(mp_real::default_precision()) + 5);
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
        mp_real z = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(N) + 0.5));
        mp_real dp;
        for (int it = 0; it < 100; ++it) {
            mp_real p0 = 1, p1 = z;
            for (std::size_t k = 2; k <= N; ++k) {
                mp_real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            dp = N * (z * p1 - p0) / (z * z - 1);
            const mp_real dz = p1 / dp;
            z -= dz;
            if (abs(dz) < eps) break;
        }
        // recompute the derivative at the converged node
        mp_real p0 = 1, p1 = z;
        for (std::size_t k = 2; k <= N; ++k) {
            mp_real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = std::move(p1);
            p1 = std::move(p2);
        }
        dp = N * (z * p1 - p0) / (z * z - 1);
        const mp_real w = 1 / ((1 - z * z) * dp * dp); // half of the [-1,1] weight
        r.x[i] = (1 - z) / 2;
        r.x[N - 1 - i] = (1 + z) / 2;
        r.w[i] = w;
        r.w[N - 1 - i] = w;
    }
    return r;
}

// Coefficients of W(z) = int_0^z P(x) Q(z - x) dx (ascending powers of z).
inline std::vector<mp_real> convolve_shapes(const Poly& P, const Poly& Q) {
    std::vector<mp_real> W(P.size() + Q.size(), mp_real(0));
    auto fact = [](std::size_t k) {
        mp_real f = 1;
        for (std::size_t i = 2; i <= k; ++i) f *= i;
        return f;
    };
    for (std::size_t a = 0; a < P.size(); ++a)
        for (std::size_t b = 0; b < Q.size(); ++b)
            W[a + b + 1] += mp_real(P[a]) * mp_real(Q[b]) * fact(a) * fact(b) / fact(a + b + 1);
    return W;
}

// P(1 - x)
inline Poly reflect(const Poly& P) {
    Poly r = poly_localize(P, 1.0, -1.0);
    r.resize(P.size());
    return r;
}

} // namespace detail

/// (B + B^T)/2 in extended precision, row-major dof x dof, at the current MPFR default precision.
inline std::vector<mp_real> symmetric_part_mp(const FESpace& V) {
    const std::size_t n = V.n(), dof = V.dof();
    const int digits = int(mp_real::default_precision());
    const mp_real pi = boost::math::constants::pi<mp_real>();
    const mp_real T = V.T();
    const mp_real h = T / n;
    const mp_real c = pi / (2 * n);
    const int K = 2 * V.nu + 1; // highest power in W

    // L[m][k] = int_0^1 w^k csc(c (m + w)) dw, R[m][k] = int_0^1 (1-w)^k csc(c (m + w)) dw
    const detail::MpRule g = detail::gauss_legendre_mp(std::size_t(0.7 * digits) + 40);
    std::vector<std::vector<mp_real>> L(2 * n, std::vector<mp_real>(K + 1, mp_real(0))), R = L;
    for (std::size_t m = 0; m < 2 * n; ++m)
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const mp_real& x = g.x[q];
            const mp_real f = g.w[q] / sin(c * (m + x));
            mp_real xp = f, yp = f;
            const mp_real y = 1 - x;
            for (int k = 0; k <= K; ++k) {
                if (k >= 1) {
                    xp *= x;
                    yp *= y;
                }
                // the k = 0 moments diverge at the ends; they are never used there
                if (m + 1 < 2 * n) L[m][k] += xp;
                if (m > 0) R[m][k] += yp;
            }
        }
    // the singular end pieces by symmetry of csc about sigma = T: R[2n-1] = L[0] in k >= 1
    for (int k = 0; k <= K; ++k) R[2 * n - 1][k] = L[0][k];

    std::vector<mp_real> S(dof * dof, mp_real(0));
    const mp_real scale = h * h / (2 * T);
    for (std::size_t es = 0; es < n; ++es)
        for (std::size_t et = 0; et < n; ++et) {
            const std::size_t m = es + et;
            for (const auto& [i, P] : local_shapes(V, es))
                for (const auto& [j, Q] : local_shapes(V, et)) {
                    const auto lo = detail::convolve_shapes(P, Q);
                    const auto up = detail::convolve_shapes(detail::reflect(P), detail::reflect(Q));
                    if (lo.size() > std::size_t(K) + 1 || up.size() > std::size_t(K) + 1)
                        throw std::logic_error("symmetric_part_mp: shape degree");
                    mp_real acc = 0;
                    for (std::size_t k = 1; k < lo.size(); ++k) acc += lo[k] * L[m][k];
                    for (std::size_t k = 1; k < up.size(); ++k) acc += up[k] * R[m + 1][k];
                    S[i * dof + j] += scale * acc;
                }
        }
    return S;
}

struct PositivityCertificate {
    int nu = 0;
    std::size_t n = 0;
    unsigned digits = 0;        // working precision that settled the question
    bool certified = false;     // lambda_min > shift >= perturbation bound
    double log10_lambda = 0.0;  // log10 of the estimated smallest eigenvalue (NaN if not positive)
    double log10_shift = 0.0;   // log10 of the certified lower bound
    double max_dev_double = 0.0; // max |rounded S - (B + B^T)/2| for a supplied double B
};

namespace detail {

// In-place Cholesky of A - shift I; false on a non-positive pivot.
inline bool cholesky_mp(std::vector<mp_real>& A, std::size_t N, const mp_real& shift) {
    for (std::size_t i = 0; i < N; ++i) A[i * N + i] -= shift;
    for (std::size_t j = 0; j < N; ++j) {
        mp_real d = A[j * N + j];
        for (std::size_t k = 0; k < j; ++k) d -= A[j * N + k] * A[j * N + k];
        if (!(d > 0)) return false;
        const mp_real ljj = sqrt(d);
        A[j * N + j] = ljj;
        for (std::size_t i = j + 1; i < N; ++i) {
            mp_real s = A[i * N + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * N + k] * A[j * N + k];
            A[i * N + j] = s / ljj;
        }
    }
    return true;
}

inline std::vector<mp_real> cholesky_solve_mp(const std::vector<mp_real>& Lf, std::size_t N, std::vector<mp_real> b) {
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= Lf[i * N + k] * b[k];
        b[i] /= Lf[i * N + i];
    }
    for (std::size_t i = N; i-- > 0;) {
        for (std::size_t k = i + 1; k < N; ++k) b[i] -= Lf[k * N + i] * b[k];
        b[i] /= Lf[i * N + i];
    }
    return b;
}

} // namespace detail

/// Certifies lambda_min((B + B^T)/2) > 0 by raising the precision until a Cholesky
/// factorization of S - delta I succeeds, delta bounding quadrature and rounding errors.
/// B (optional) is the double precision matrix the result is compared against.
inline PositivityCertificate certify_symmetric_positivity(int nu, std::size_t n, double T,
                                                          const DenseMatrix* B = nullptr,
                                                          unsigned start_digits = 40, unsigned max_digits = 1280) {
    const FESpace V(Mesh(n, T), nu);
    const std::size_t N = V.dof();
    PositivityCertificate cert;
    cert.nu = nu;
    cert.n = n;
    const unsigned saved = mp_real::default_precision();
    for (unsigned digits = start_digits; digits <= max_digits; digits *= 2) {
        mp_real::default_precision(digits);
        cert.digits = digits;
        const std::vector<mp_real> S = symmetric_part_mp(V);
        mp_real smax = 0;
        for (const auto& v : S) smax = std::max(smax, mp_real(abs(v)));
        const mp_real delta = N * smax * pow(mp_real(10), -int(digits) + 20);
        cert.log10_shift = double(log10(delta));
        if (B) {
            double dev = 0.0;
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j)
                    dev = std::max(dev, std::abs(double(S[i * N + j]) - 0.5 * ((*B)(i, j) + (*B)(j, i))));
            cert.max_dev_double = dev;
        }
        std::vector<mp_real> Lf = S;
        if (!detail::cholesky_mp(Lf, N, delta)) continue;
        cert.certified = true;
        // inverse iteration on S - delta I for the estimate
        std::vector<mp_real> x(N);
        for (std::size_t i = 0; i < N; ++i) x[i] = 1.0 + 0.37 * std::sin(1.7 * double(i) + 0.3);
        mp_real lam = 0;
        for (int it = 0; it < 60; ++it) {
            std::vector<mp_real> y = detail::cholesky_solve_mp(Lf, N, x);
            mp_real xx = 0, xy = 0, yy = 0;
            for (std::size_t i = 0; i < N; ++i) {
                xx += x[i] * x[i];
                xy += x[i] * y[i];
                yy += y[i] * y[i];
            }
            const mp_real next = xx / xy;
            const bool done = it > 3 && abs(next - lam) <= mp_real(1e-8) * next;
            lam = next;
            const mp_real ny = sqrt(yy);
            for (std::size_t i = 0; i < N; ++i) x[i] = y[i] / ny;
            if (done) break;
        }
        cert.log10_lambda = double(log10(lam + delta));
        break;
    }
    if (!cert.certified) cert.log10_lambda = std::numeric_limits<double>::quiet_NaN();
    mp_real::default_precision(saved);
    return cert;
}

} // namespace mht
