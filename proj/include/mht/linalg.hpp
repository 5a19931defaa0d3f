#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dense.hpp"

namespace mht {

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// LU factorization with partial pivoting, P A = L U, blocked right-looking.
class LUFactor {
public:
    explicit LUFactor(const DenseMatrix& A) : lu_(A), perm_(A.rows()) {
        if (A.rows() != A.cols()) throw LinalgError("LU: matrix not square");
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        factor();
    }

    std::size_t size() const { return lu_.rows(); }

    Vec solve(const Vec& b) const {
        const std::size_t n = size();
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = lu_.row(i);
            double s = x[i];
            for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            const double* r = lu_.row(i);
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= r[j] * x[j];
            x[i] = s / r[i];
        }
        return x;
    }

    // A^T x = b
    Vec solve_transposed(const Vec& b) const {
        const std::size_t n = size();
        Vec z = b;
        // U^T z = b, column-oriented on row-major U
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = lu_.row(i);
            z[i] /= r[i];
            const double zi = z[i];
            for (std::size_t j = i + 1; j < n; ++j) z[j] -= r[j] * zi;
        }
        for (std::size_t i = n; i-- > 0;) {
            const double* r = lu_.row(i);
            const double zi = z[i];
            for (std::size_t j = 0; j < i; ++j) z[j] -= r[j] * zi;
        }
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
        return x;
    }

private:
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap_ranges(lu_.row(a), lu_.row(a) + lu_.cols(), lu_.row(b));
        std::swap(perm_[a], perm_[b]);
    }

    void factor() {
        const std::size_t n = size();
        constexpr std::size_t nb = 64;
        double scale = lu_.max_abs();
        if (scale == 0.0) throw LinalgError("LU: zero matrix");
        const double tiny = scale * n * std::numeric_limits<double>::epsilon() * 1e-3;

        for (std::size_t k = 0; k < n; k += nb) {
            const std::size_t kend = std::min(n, k + nb);
            // panel
            for (std::size_t j = k; j < kend; ++j) {
                std::size_t piv = j;
                double best = std::abs(lu_(j, j));
                for (std::size_t i = j + 1; i < n; ++i) {
                    double v = std::abs(lu_(i, j));
                    if (v > best) { best = v; piv = i; }
                }
                if (best <= tiny) throw LinalgError("LU: matrix singular to working precision");
                swap_rows(j, piv);
                const double* rj = lu_.row(j);
                const double inv = 1.0 / rj[j];
                for (std::size_t i = j + 1; i < n; ++i) {
                    double* ri = lu_.row(i);
                    const double l = ri[j] * inv;
                    ri[j] = l;
                    for (std::size_t c = j + 1; c < kend; ++c) ri[c] -= l * rj[c];
                }
            }
            if (kend == n) break;
            // U12 = L11^{-1} A12
            for (std::size_t j = k; j < kend; ++j) {
                double* rj = lu_.row(j);
                for (std::size_t p = k; p < j; ++p) {
                    const double l = rj[p];
                    const double* rp = lu_.row(p);
                    for (std::size_t c = kend; c < n; ++c) rj[c] -= l * rp[c];
                }
            }
            // A22 -= L21 U12
            for (std::size_t i = kend; i < n; ++i) {
                double* ri = lu_.row(i);
                for (std::size_t p = k; p < kend; ++p) {
                    const double l = ri[p];
                    if (l == 0.0) continue;
                    const double* rp = lu_.row(p);
                    for (std::size_t c = kend; c < n; ++c) ri[c] -= l * rp[c];
                }
            }
        }
    }

    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solve A x = b: partial pivoting LU plus one refinement step.
inline Vec solve_dense(const DenseMatrix& A, const Vec& b) {
    if (A.rows() != b.size()) throw LinalgError("solve_dense: size mismatch");
    LUFactor lu(A);
    Vec x = lu.solve(b);
    Vec r = matvec(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    Vec d = lu.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += d[i];
    return x;
}

struct EigenResult {
    Vec values;          // ascending
    DenseMatrix vectors; // column i belongs to values[i]
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
inline EigenResult sym_eig(const DenseMatrix& A_in, int max_sweeps = 30) {
    const std::size_t n = A_in.rows();
    if (A_in.cols() != n) throw LinalgError("sym_eig: matrix not square");
    const double anorm = [&] {
        double s = 0.0;
        for (double v : A_in.storage()) s += v * v;
        return std::sqrt(s);
    }();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(A_in(i, j) - A_in(j, i)) > 1e-12 * std::max(1.0, anorm))
                throw LinalgError("sym_eig: matrix not symmetric");

    DenseMatrix A = A_in;
    DenseMatrix V = DenseMatrix::identity(n);
    auto off = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * A(i, j) * A(i, j);
        return std::sqrt(s);
    };
    const double target = 1e-13 * anorm;
    bool converged = off() <= target;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double app = A(p, p), aqq = A(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = A(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off() <= target;
    }
    if (!converged) throw LinalgError("sym_eig: no convergence after max sweeps");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return A(a, a) < A(b, b); });
    EigenResult r{Vec(n), DenseMatrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        r.values[c] = A(idx[c], idx[c]);
        for (std::size_t k = 0; k < n; ++k) r.vectors(k, c) = V(k, idx[c]);
    }
    return r;
}

/// Cholesky factor of a symmetric positive definite band matrix (half bandwidth w).
class BandCholesky {
public:
    BandCholesky(const DenseMatrix& M, std::size_t w) : n_(M.rows()), w_(w), l_(n_ * (w + 1), 0.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j0 = i >= w_ ? i - w_ : 0;
            for (std::size_t j = j0; j <= i; ++j) {
                double s = M(i, j);
                const std::size_t k0 = std::max(j0, j >= w_ ? j - w_ : 0);
                for (std::size_t k = k0; k < j; ++k) s -= at(i, k) * at(j, k);
                if (j == i) {
                    if (!(s > 0.0)) throw LinalgError("mass matrix not positive definite");
                    ref(i, i) = std::sqrt(s);
                } else {
                    ref(i, j) = s / at(j, j);
                }
            }
        }
    }

    std::size_t size() const { return n_; }

    Vec mul(const Vec& x) const { // L x
        Vec y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = lo(i); j <= i; ++j) y[i] += at(i, j) * x[j];
        return y;
    }
    Vec mul_t(const Vec& x) const { // L^T x
        Vec y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = lo(i); j <= i; ++j) y[j] += at(i, j) * x[i];
        return y;
    }
    Vec solve(const Vec& b) const { // L y = b
        Vec y = b;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = lo(i); j < i; ++j) y[i] -= at(i, j) * y[j];
            y[i] /= at(i, i);
        }
        return y;
    }
    Vec solve_t(const Vec& b) const { // L^T y = b
        Vec y = b;
        for (std::size_t i = n_; i-- > 0;) {
            y[i] /= at(i, i);
            for (std::size_t j = lo(i); j < i; ++j) y[j] -= at(i, j) * y[i];
        }
        return y;
    }

private:
    std::size_t lo(std::size_t i) const { return i >= w_ ? i - w_ : 0; }
    double at(std::size_t i, std::size_t j) const { return l_[i * (w_ + 1) + (w_ - (i - j))]; }
    double& ref(std::size_t i, std::size_t j) { return l_[i * (w_ + 1) + (w_ - (i - j))]; }

    std::size_t n_, w_;
    std::vector<double> l_;
};

inline std::size_t half_bandwidth(const DenseMatrix& M) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (M(i, j) != 0.0) w = std::max(w, i - j);
    return w;
}

struct GenSingular {
    double sigma_min;
    Vec u_min;
};

namespace detail {
inline void fix_sign(Vec& u) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < u.size(); ++i)
        if (std::abs(u[i]) > std::abs(u[k])) k = i;
    if (!u.empty() && u[k] < 0)
        for (double& v : u) v = -v;
}
} // namespace detail

/// sigma_min of M^{-1/2} B M^{-1/2} via Jacobi eigendecompositions of M and C^T C.
inline GenSingular min_generalized_singular_jacobi(const DenseMatrix& B, const DenseMatrix& M) {
    const std::size_t n = B.rows();
    auto em = sym_eig(M);
    if (em.values.front() <= 0.0) throw LinalgError("mass matrix not positive definite");
    DenseMatrix S(n, n); // M^{-1/2}
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += em.vectors(i, k) * em.vectors(j, k) / std::sqrt(em.values[k]);
            S(i, j) = s;
        }
    DenseMatrix C = matmul(matmul(S, B), S);
    DenseMatrix G = matmul(C.transposed(), C);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) G(i, j) = G(j, i) = 0.5 * (G(i, j) + G(j, i));
    auto eg = sym_eig(G);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = eg.vectors(i, 0);
    Vec u = matvec(S, y);
    detail::fix_sign(u);
    return {std::sqrt(std::max(0.0, eg.values[0])), u};
}

/// sigma_min via Lanczos on (C^T C)^{-1}, C = L^{-1} B L^{-T}, M = L L^T banded.
inline GenSingular min_generalized_singular_lanczos(const DenseMatrix& B, const DenseMatrix& M,
                                                    int max_iter = 400) {
    const std::size_t n = B.rows();
    BandCholesky L(M, half_bandwidth(M));
    LUFactor lu(B);
    auto cinv = [&](const Vec& x) { return L.mul_t(lu.solve(L.mul(x))); };
    auto cinv_t = [&](const Vec& x) { return L.mul_t(lu.solve_transposed(L.mul(x))); };
    auto gop = [&](const Vec& x) { return cinv_t(cinv(x)); };

    const std::size_t m_cap = std::min<std::size_t>(n, max_iter);
    std::vector<Vec> Q;
    Vec alpha, beta;
    Vec q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = 1.0 + 0.37 * std::sin(1.7 * double(i) + 0.3);
    {
        double nq = norm2(q);
        for (double& v : q) v /= nq;
    }
    double theta_prev = 0.0, theta = 0.0;
    Vec ritz;
    for (std::size_t m = 0; m < m_cap; ++m) {
        Q.push_back(q);
        Vec w = gop(q);
        double a = dot(w, q);
        alpha.push_back(a);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& qq : Q) {
                double c = dot(w, qq);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * qq[i];
            }
        double b = norm2(w);
        const std::size_t k = alpha.size();
        bool check = (k % 5 == 0) || b == 0.0 || k == m_cap;
        if (check) {
            DenseMatrix Tm(k, k);
            for (std::size_t i = 0; i < k; ++i) {
                Tm(i, i) = alpha[i];
                if (i + 1 < k) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
            }
            auto et = sym_eig(Tm);
            theta = et.values[k - 1];
            ritz.assign(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) ritz[i] = et.vectors(i, k - 1);
            const double resid = std::abs(b * ritz[k - 1]);
            if (b == 0.0 || resid <= 1e-13 * theta ||
                (k >= 10 && std::abs(theta - theta_prev) <= 1e-15 * theta))
                break;
            theta_prev = theta;
        }
        if (b == 0.0) break;
        beta.push_back(b);
        for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
    }
    Vec v(n, 0.0);
    for (std::size_t j = 0; j < ritz.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) v[i] += ritz[j] * Q[j][i];
    Vec y = cinv(v);
    double ny = norm2(y);
    for (double& e : y) e /= ny;
    // Rayleigh refinement: sigma = |C y|
    Vec cy = L.solve(matvec(B, L.solve_t(y)));
    double sigma = norm2(cy);
    Vec u = L.solve_t(y);
    detail::fix_sign(u);
    return {sigma, u};
}

/// Smallest generalized singular value of B with respect to M.
inline GenSingular min_generalized_singular(const DenseMatrix& B, const DenseMatrix& M,
                                            std::size_t jacobi_max_dim = 256) {
    if (B.rows() != B.cols() || M.rows() != B.rows()) throw LinalgError("shape mismatch");
    if (B.rows() <= jacobi_max_dim) return min_generalized_singular_jacobi(B, M);
    return min_generalized_singular_lanczos(B, M);
}

} // namespace mht
