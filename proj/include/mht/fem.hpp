#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "piecewise.hpp"
#include "quadrature.hpp"

namespace mht {

struct Mesh {
    std::size_t n;
    double T;

    Mesh(std::size_t n_, double T_) : n(n_), T(T_) {
        if (n < 1) throw std::invalid_argument("mesh needs at least one element");
        if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
    }
    double h() const { return T / double(n); }
    double node(std::size_t i) const { return i == n ? T : double(i) * h(); }
};

struct FESpace {
    Mesh mesh;
    int nu;

    FESpace(Mesh m, int nu_) : mesh(m), nu(nu_) {
        if (nu < 0 || nu > 2) throw std::invalid_argument("degree must be 0, 1 or 2");
    }
    std::size_t dof() const { return nu == 2 ? 2 * mesh.n : mesh.n; }
    std::size_t n() const { return mesh.n; }
    double T() const { return mesh.T; }
    double h() const { return mesh.h(); }
};

struct DofVector {
    FESpace space;
    Vec values;

    explicit DofVector(FESpace s) : space(s), values(s.dof(), 0.0) {}
    DofVector(FESpace s, Vec v) : space(s), values(std::move(v)) {
        if (values.size() != space.dof()) throw std::invalid_argument("dof vector length mismatch");
    }
};

/// Local shape functions on element e as (dof index, polynomial in tau).
inline std::vector<std::pair<std::size_t, Poly>> local_shapes(const FESpace& V, std::size_t e) {
    std::vector<std::pair<std::size_t, Poly>> s;
    switch (V.nu) {
    case 0:
        s.push_back({e, {1.0}});
        break;
    case 1:
        s.push_back({e, {0.0, 1.0}});
        if (e >= 1) s.push_back({e - 1, {1.0, -1.0}});
        break;
    default:
        s.push_back({2 * e, {0.0, 4.0, -4.0}});
        s.push_back({2 * e + 1, {0.0, -1.0, 2.0}});
        if (e >= 1) s.push_back({2 * e - 1, {1.0, -3.0, 2.0}});
        break;
    }
    return s;
}

/// Basis function with 0-based dof index d as a piecewise polynomial.
inline PwPoly basis_pw(const FESpace& V, std::size_t d) {
    if (d >= V.dof()) throw std::out_of_range("basis index out of range");
    PwPoly p{V.n(), V.T(), {}};
    const std::size_t n = V.n();
    switch (V.nu) {
    case 0:
        p.pieces.push_back({d, {1.0}});
        break;
    case 1:
        p.pieces.push_back({d, {0.0, 1.0}});
        if (d + 1 < n) p.pieces.push_back({d + 1, {1.0, -1.0}});
        break;
    default: {
        const std::size_t e = d / 2;
        if (d % 2 == 0) {
            p.pieces.push_back({e, {0.0, 4.0, -4.0}});
        } else {
            p.pieces.push_back({e, {0.0, -1.0, 2.0}});
            if (e + 1 < n) p.pieces.push_back({e + 1, {1.0, -3.0, 2.0}});
        }
    }
    }
    return p;
}

/// Nodal location of a dof (the point where the basis function equals 1).
inline double dof_node(const FESpace& V, std::size_t d) {
    const double h = V.h();
    switch (V.nu) {
    case 0: return (double(d) + 0.5) * h;
    case 1: return V.mesh.node(d + 1);
    default: return d % 2 == 0 ? (double(d / 2) + 0.5) * h : V.mesh.node(d / 2 + 1);
    }
}

/// psi_i(t), i is 1-based.
inline double basis_eval(const FESpace& V, std::size_t i, double t) {
    if (i < 1 || i > V.dof()) throw std::out_of_range("basis index out of range");
    if (t < 0.0 || t > V.T()) return 0.0;
    if (V.nu == 0) {
        // open cell (t_{i-1}, t_i)
        const double a = V.mesh.node(i - 1), b = V.mesh.node(i);
        return (t > a && t < b) ? 1.0 : 0.0;
    }
    return basis_pw(V, i - 1)(t);
}

inline std::size_t element_of(const FESpace& V, double t) {
    if (t <= 0.0) return 0;
    std::size_t e = std::size_t(t / V.h());
    return std::min(e, V.n() - 1);
}

/// Local polynomial of the finite element function x on element e.
inline Poly element_poly(const DofVector& x, std::size_t e) {
    Poly p(x.space.nu + 1, 0.0);
    for (const auto& [d, c] : local_shapes(x.space, e))
        for (std::size_t k = 0; k < c.size(); ++k) p[k] += x.values[d] * c[k];
    return p;
}

inline double fe_eval(const DofVector& x, double t) {
    const std::size_t e = element_of(x.space, t);
    const double a = x.space.mesh.node(e);
    return poly_eval(element_poly(x, e), (t - a) / x.space.h());
}

inline PwPoly fe_pw(const DofVector& x) {
    PwPoly p{x.space.n(), x.space.T(), {}};
    for (std::size_t e = 0; e < x.space.n(); ++e) p.pieces.push_back({e, element_poly(x, e)});
    return p;
}

/// Exact mass matrix.
inline DenseMatrix mass_matrix(const FESpace& V) {
    const std::size_t N = V.dof();
    const double h = V.h();
    DenseMatrix M(N, N);
    for (std::size_t e = 0; e < V.n(); ++e) {
        auto s = local_shapes(V, e);
        for (const auto& [a, pa] : s)
            for (const auto& [b, pb] : s) M(a, b) += h * poly_integral01(poly_mul(pa, pb));
    }
    return M;
}

enum class Basis { sine, cosine };

/// Exact Fourier coefficients (2/T) int psi_i basis_k, k = 0..K-1; i is 1-based.
inline Vec basis_fourier_coeffs(const FESpace& V, std::size_t i, Basis basis, std::size_t K) {
    if (i < 1 || i > V.dof()) throw std::out_of_range("basis index out of range");
    auto js = jumps(basis_pw(V, i - 1));
    Vec c(K);
    const double s = 2.0 / V.T();
    for (std::size_t k = 0; k < K; ++k) {
        auto E = fourier_integral_k(js, V.n(), V.T(), long(k));
        c[k] = s * (basis == Basis::sine ? E.imag() : E.real());
    }
    return c;
}

/// Integral of g over element e, graded toward singular endpoints of (0,T).
template <class G>
double element_integral(const FESpace& V, const Func& u, std::size_t e, G&& g) {
    const double a = V.mesh.node(e), b = V.mesh.node(e + 1);
    const bool ga = (e == 0) && u.sing0;
    const bool gb = (e + 1 == V.n()) && u.singT;
    if (!ga && !gb) return gauss_integrate([&](double t) { return g(t, u(t)); }, a, b);
    return graded_integrate3(
        [&](double t, double, double db) {
            const double ut = (gb && e + 1 == V.n()) ? u.eval_near_T(t, db) : u(t);
            return g(t, ut);
        },
        a, b, ga, gb);
}

/// L2 projection Q_h u.
inline DofVector l2_project(const Func& u, const FESpace& V) {
    const std::size_t N = V.dof();
    const double h = V.h();
    Vec rhs(N, 0.0);
    for (std::size_t e = 0; e < V.n(); ++e) {
        const double a = V.mesh.node(e);
        auto s = local_shapes(V, e);
        if (u.poly) {
            Poly loc = poly_localize(*u.poly, a, h);
            for (const auto& [d, c] : s) rhs[d] += h * poly_integral01(poly_mul(loc, c));
            continue;
        }
        for (const auto& [d, c] : s) {
            const Poly& cc = c;
            rhs[d] += element_integral(V, u, e, [&](double t, double ut) {
                return ut * poly_eval(cc, (t - a) / h);
            });
        }
    }
    if (V.nu == 0) {
        for (double& v : rhs) v /= h;
        return DofVector(V, rhs);
    }
    DenseMatrix M = mass_matrix(V);
    BandCholesky L(M, half_bandwidth(M));
    return DofVector(V, L.solve_t(L.solve(rhs)));
}

/// Projection of a function given pointwise (no structure), used for generic callables.
inline DofVector l2_project(const std::function<double(double)>& f, const FESpace& V) {
    Func u;
    u.f = f;
    return l2_project(u, V);
}

/// ||u - x||_{L2(0,T)}.
inline double fe_l2_error(const Func& u, const DofVector& x) {
    const FESpace& V = x.space;
    const double h = V.h();
    KahanSum s;
    for (std::size_t e = 0; e < V.n(); ++e) {
        const double a = V.mesh.node(e);
        const Poly p = element_poly(x, e);
        s.add(element_integral(V, u, e, [&](double t, double ut) {
            const double d = ut - poly_eval(p, (t - a) / h);
            return d * d;
        }));
    }
    return std::sqrt(std::max(0.0, s.value()));
}

/// L2 norm of a finite element function.
inline double fe_l2_norm(const DofVector& x) {
    Vec mx = matvec(mass_matrix(x.space), x.values);
    return std::sqrt(std::max(0.0, dot(mx, x.values)));
}

} // namespace mht
