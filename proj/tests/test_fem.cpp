#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "mht/analysis.hpp"
#include "oracles.hpp"

using namespace mht;
using std::numbers::pi;

TEST(BasisEval, PiecewiseConstant) {
    const FESpace V(Mesh(4, 2.0), 0);
    const double h = V.h();
    EXPECT_EQ(basis_eval(V, 1, 0.5 * h), 1.0);
    EXPECT_EQ(basis_eval(V, 1, 1.5 * h), 0.0);
}

TEST(BasisEval, Hat) {
    const FESpace V(Mesh(4, 2.0), 1);
    EXPECT_DOUBLE_EQ(basis_eval(V, 1, V.mesh.node(1)), 1.0);
    EXPECT_DOUBLE_EQ(basis_eval(V, 1, V.mesh.node(2)), 0.0);
    EXPECT_DOUBLE_EQ(basis_eval(V, 1, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(basis_eval(V, 1, 0.25 * V.h()), 0.25);
}

TEST(BasisEval, QuadraticLagrangeProperty) {
    const FESpace V(Mesh(3, 2.0), 2);
    for (std::size_t i = 1; i <= V.dof(); ++i)
        for (std::size_t j = 0; j < V.dof(); ++j)
            EXPECT_NEAR(basis_eval(V, i, dof_node(V, j)), i - 1 == j ? 1.0 : 0.0, 1e-14);
    EXPECT_THROW(basis_eval(V, 0, 0.1), std::out_of_range);
    EXPECT_THROW(basis_eval(V, 7, 0.1), std::out_of_range);
}

TEST(BasisEval, PartitionOfUnityAwayFromZero) {
    for (int nu : {1, 2}) {
        const FESpace V(Mesh(5, 2.0), nu);
        for (double t = V.h(); t <= 2.0; t += 0.013) {
            double s = 0.0;
            for (std::size_t i = 1; i <= V.dof(); ++i) s += basis_eval(V, i, t);
            EXPECT_NEAR(s, 1.0, 1e-13) << "nu=" << nu << " t=" << t;
        }
    }
}

TEST(FESpace, Validation) {
    EXPECT_THROW(Mesh(0, 2.0), std::invalid_argument);
    EXPECT_THROW(Mesh(4, 0.0), std::invalid_argument);
    EXPECT_THROW(FESpace(Mesh(4, 2.0), 3), std::invalid_argument);
    EXPECT_EQ(FESpace(Mesh(4, 2.0), 2).dof(), 8u);
}

TEST(MassMatrix, PiecewiseConstantIsScaledIdentity) {
    const FESpace V(Mesh(6, 2.0), 0);
    const DenseMatrix M = mass_matrix(V);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(M(i, j), i == j ? V.h() : 0.0);
}

TEST(MassMatrix, HatsTridiagonal) {
    const FESpace V(Mesh(6, 2.0), 1);
    const DenseMatrix M = mass_matrix(V);
    const double h = V.h();
    EXPECT_NEAR(M(2, 1), h / 6.0, 1e-15);
    EXPECT_NEAR(M(2, 2), 4.0 * h / 6.0, 1e-15);
    EXPECT_NEAR(M(2, 3), h / 6.0, 1e-15);
    EXPECT_NEAR(M(5, 5), h / 3.0, 1e-15);
    EXPECT_EQ(M(2, 4), 0.0);
}

TEST(MassMatrix, QuadraticAgainstQuadrature) {
    const FESpace V(Mesh(3, 2.0), 2);
    const DenseMatrix M = mass_matrix(V);
    for (std::size_t i = 1; i <= V.dof(); ++i)
        for (std::size_t j = 1; j <= V.dof(); ++j) {
            double s = 0.0;
            for (std::size_t e = 0; e < 3; ++e)
                s += gauss_integrate([&](double t) { return basis_eval(V, i, t) * basis_eval(V, j, t); },
                                     V.mesh.node(e), V.mesh.node(e + 1));
            EXPECT_NEAR(M(i - 1, j - 1), s, 1e-14);
        }
}

TEST(BasisFourierCoeffs, PiecewiseConstantClosedForm) {
    const std::size_t n = 5;
    const double T = 2.0;
    const FESpace V(Mesh(n, T), 0);
    for (std::size_t i = 1; i <= n; ++i) {
        Vec c = basis_fourier_coeffs(V, i, Basis::cosine, 1001);
        for (std::size_t k = 0; k <= 1000; ++k) {
            const double lam = lambda_k(k, T);
            const double ref =
                2.0 / (T * lam) * (std::sin(lam * V.mesh.node(i)) - std::sin(lam * V.mesh.node(i - 1)));
            ASSERT_NEAR(c[k], ref, 1e-14) << "i=" << i << " k=" << k;
        }
    }
    // the same through the step function coefficient formula
    DofVector e1(V);
    e1.values[2] = 1.0;
    Vec c = basis_fourier_coeffs(V, 3, Basis::cosine, 40);
    for (std::size_t k = 0; k < 40; ++k) EXPECT_NEAR(pwc_cos_coeffs(e1, k), c[k], 1e-14);
}

TEST(BasisFourierCoeffs, HigherDegreeAgainstQuadrature) {
    const double T = 2.0;
    for (int nu : {1, 2}) {
        const FESpace V(Mesh(3, T), nu);
        for (std::size_t i = 1; i <= V.dof(); ++i)
            for (Basis b : {Basis::sine, Basis::cosine}) {
                Vec c = basis_fourier_coeffs(V, i, b, 30);
                for (std::size_t k : {0, 1, 7, 29}) {
                    double s = 0.0;
                    for (std::size_t e = 0; e < 24; ++e)
                        s += gauss_integrate(
                            [&](double t) {
                                const double lam = lambda_k(k, T);
                                return basis_eval(V, i, t) * (b == Basis::sine ? std::sin(lam * t) : std::cos(lam * t));
                            },
                            T * double(e) / 24.0, T * double(e + 1) / 24.0);
                    EXPECT_NEAR(c[k], 2.0 / T * s, 1e-13);
                }
            }
    }
}

TEST(L2Project, IdentityOnTheSpace) {
    std::mt19937_64 rng(21);
    for (int nu : {0, 1, 2}) {
        const FESpace V(Mesh(7, 2.0), nu);
        const DofVector x(V, oracle::random_vec(rng, V.dof()));
        const DofVector p = l2_project([&](double t) { return fe_eval(x, t); }, V);
        for (std::size_t i = 0; i < V.dof(); ++i) EXPECT_NEAR(p.values[i], x.values[i], 1e-13);
        Func u;
        u.f = [&](double t) { return fe_eval(x, t); };
        EXPECT_NEAR(fe_l2_error(u, x), 0.0, 1e-14);
    }
}

TEST(L2Project, CellAverages) {
    const FESpace V(Mesh(4, 2.0), 0);
    const DofVector p = l2_project([](double t) { return t; }, V);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p.values[i], (double(i) + 0.5) * V.h(), 1e-15);
    const DofVector q = l2_project(make_func("t_23", 2.0), FESpace(Mesh(2, 2.0), 0));
    EXPECT_NEAR(q.values[0], 0.6, 1e-13);
}

TEST(L2Project, Stability) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> a(-3.0, 3.0);
    for (int t = 0; t < 20; ++t) {
        const double c0 = a(rng), c1 = a(rng), c2 = a(rng), w = 3.0 * std::abs(a(rng));
        auto f = [=](double x) { return c0 + c1 * std::sin(w * x) + c2 * x * x; };
        const double nu = std::sqrt(gauss_integrate([&](double x) { return f(x) * f(x); }, 0.0, 2.0, gauss_rule<40>()));
        for (int deg : {0, 1, 2}) {
            const DofVector p = l2_project(f, FESpace(Mesh(9, 2.0), deg));
            EXPECT_LE(fe_l2_norm(p), nu + 1e-10);
        }
    }
}

TEST(L2Error, SawtoothOfLinear) {
    const FESpace V(Mesh(2, 2.0), 0);
    const DofVector p = l2_project([](double t) { return t; }, V);
    Func u;
    u.f = [](double t) { return t; };
    EXPECT_NEAR(fe_l2_error(u, p), std::sqrt(2.0 / 12.0), 1e-14);
}

TEST(L2Error, ProjectionOrder) {
    // ||u - Q_h u|| = O(h^s): sin is smooth (s = 1 for steps), t^{1/6} lies in H^{2/3-eps}
    Func root = make_func("t_23", 2.0);
    root.f = [](double t) { return std::pow(t, 1.0 / 6.0); };
    for (const auto& [u, s] : std::vector<std::pair<Func, double>>{{make_func("sin_pi4", 2.0), 1.0}, {root, 2.0 / 3.0}}) {
        Vec err;
        for (std::size_t n = 8; n <= 256; n *= 2) err.push_back(fe_l2_error(u, l2_project(u, FESpace(Mesh(n, 2.0), 0))));
        const Vec e = eoc(err);
        for (std::size_t i = 1; i < e.size(); ++i) EXPECT_NEAR(e[i], s, 0.05) << "s=" << s << " row " << i;
    }
}
