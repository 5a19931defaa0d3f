#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "mht/analysis.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace mht;
using std::numbers::pi;

TEST(InfSup, TwoElements) { EXPECT_NEAR(infsup_constant(0, 2, 2.0).c_S, 0.411711, 5e-7); }

TEST(InfSup, SingleElementIsCatalanRatio) {
    // B = 8GT/pi^2, M = h = T
    EXPECT_NEAR(infsup_constant(0, 1, 2.0).c_S, 8.0 * 0.915965594177219 / (pi * pi), 1e-13);
    EXPECT_NEAR(infsup_constant(0, 1, 2.0).c_S, 0.7424537, 1e-7);
}

TEST(InfSup, LinearElementsFineMesh) {
    const InfSupReport r = infsup_constant(1, 1024, 2.0);
    EXPECT_NEAR(r.c_S, 0.001931, 5e-7);
    EXPECT_NEAR(r.c_S_over_h, 0.988, 5e-4);
}

TEST(InfSup, IndependentOfHorizon) {
    for (double T : {0.5, 7.0}) EXPECT_NEAR(infsup_constant(0, 16, T).c_S, infsup_constant(0, 16, 2.0).c_S, 1e-13);
}

TEST(TrigIdentities, AllHold) {
    for (const auto& o : {props::discrete_orthogonality(64), props::cosine_square_sum(64),
                          props::interior_cosine_orthogonality(64)})
        EXPECT_LE(o.worst, o.limit) << o.name;
}

TEST(Recurrences, RandomStepFunctions) {
    std::mt19937_64 rng(41);
    const auto o = props::recurrences(rng);
    EXPECT_LE(o.worst, o.limit) << o.name;
}

TEST(NormEquivalence, Indicator) {
    const FESpace V(Mesh(4, 2.0), 0);
    DofVector x(V);
    x.values[1] = 1.0;
    const NormEquivalence r = norm_equivalence_check(x);
    EXPECT_NEAR(r.norm2, V.h(), 1e-15);
    EXPECT_TRUE(r.lower_ok && r.upper_ok && r.pi_ok);
}

TEST(NormEquivalence, ConstantVectorCoefficientsDecay) {
    const FESpace V(Mesh(8, 2.0), 0);
    const DofVector x(V, Vec(8, 1.0));
    for (std::size_t k = 0; k < 40; ++k) {
        const double lam = lambda_k(k, 2.0);
        EXPECT_NEAR(pwc_cos_coeffs(x, k), 2.0 / (2.0 * lam) * std::sin(2.0 * lam), 1e-13);
        EXPECT_NEAR(std::abs(pwc_cos_coeffs(x, k)), 4.0 / ((2.0 * k + 1.0) * pi), 1e-13);
    }
    EXPECT_NO_THROW(norm_equivalence_check(x));
}

TEST(NormEquivalence, RandomVectors) {
    std::mt19937_64 rng(43);
    const auto o = props::norm_equivalence(rng);
    EXPECT_LE(o.worst, o.limit) << o.name;
}

TEST(MinimalM, WorstCaseAndConstant) {
    // M = n - 1 gives the worst case 2 sqrt(3) (8n^2 - 4n(2n-1)) / (pi^2 (2n+1)^2)
    for (std::size_t n : {4, 16, 64}) {
        const double nn = double(n);
        EXPECT_NEAR(cs_formula(n, n - 1), 2.0 * std::sqrt(3.0) / (pi * pi) * 8.0 * nn / ((2.0 * nn + 1.0) * (2.0 * nn + 1.0)),
                    1e-14);
    }
    // a constant vector needs a single mode (pi^2/3 S_0 = (pi^2/3)(T/2)(16/pi^2) >= T), M = 0
    const FESpace V(Mesh(32, 2.0), 0);
    const MinimalM m = minimal_M_and_cs(DofVector(V, Vec(32, 1.0)));
    EXPECT_EQ(m.M, 0u);
    EXPECT_NEAR(m.c_S, 2.0 * std::sqrt(3.0) / (pi * pi) * (16.0 * 32 * 32 - 8.0 * 32) / std::pow(4.0 * 32 - 1.0, 2), 1e-14);
    EXPECT_NEAR(m.c_S, 2.0 * std::sqrt(3.0) / (pi * pi), 1e-4); // the n -> infinity limit
    EXPECT_THROW(minimal_M_and_cs(DofVector(V)), std::invalid_argument);
}

TEST(ProjectedInverse, ZeroSource) {
    const FESpace V(Mesh(8, 2.0), 0);
    const ProjectedInverse w = qh_ht_inverse(DofVector(V));
    EXPECT_EQ(w.norm, 0.0);
}

TEST(ProjectedInverse, PairingEqualsSquaredNorm) {
    // <x, H_T w> = ||w||^2 with the matrix pairing
    std::mt19937_64 rng(45);
    for (std::size_t n : {4, 16, 64}) {
        const FESpace V(Mesh(n, 2.0), 0);
        const DofVector x(V, oracle::random_vec(rng, n));
        const ProjectedInverse w = qh_ht_inverse(x);
        const DenseMatrix B = hilbert_matrix(V);
        EXPECT_NEAR(ht_pairing(x, w.w, B), w.norm * w.norm, 1e-10 * std::max(1.0, w.norm * w.norm));
    }
}

TEST(InfSupTheorem, RandomStepFunctions) {
    std::mt19937_64 rng(47);
    for (const auto& o : props::infsup_theorem(rng)) EXPECT_LE(o.worst, o.limit) << o.name;
}

TEST(Residual, PublishedCubicValues) {
    EXPECT_NEAR(qh_ht_inverse_residual(make_func("cubic_a", 2.0), 4, 2.0).norm, 0.45239154, 5e-9);
    EXPECT_NEAR(qh_ht_inverse_residual(make_func("cubic_b", 2.0), 8, 2.0).norm, 0.21675270, 5e-9);
}

TEST(Residual, ZeroForFunctionsInTheSpace) {
    Func c;
    c.f = [](double) { return 3.0; };
    c.poly = Poly{3.0};
    EXPECT_NEAR(qh_ht_inverse_residual(c, 8, 2.0).norm, 0.0, 1e-13);
}

TEST(Residual, SpectralEvaluationAgrees) {
    const Func u = make_func("sin_pi4", 2.0);
    const ResidualInverse r = qh_ht_inverse_residual(u, 4, 2.0);
    const Vec w = qh_ht_inverse_residual_spectral(u, 4, 2.0, 4000);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(w[j], r.w.values[j], 1e-5);
}

TEST(HtProject, PublishedErrors) {
    // these are the published entries; some of them are not reproduced for nu > 0
    EXPECT_NEAR(ht_project(make_func("sin_pi4", 2.0), 2, 8, 2.0).error, 7.051e-5, 0.5e-7);
    EXPECT_NEAR(ht_project(make_func("t_Tt_23", 2.0), 1, 4, 2.0).error, 5.054e-2, 0.5e-4);
    EXPECT_NEAR(ht_project(make_func("t_23", 2.0), 0, 2, 2.0).error, 4.796e-1, 0.5e-3);
}

TEST(HtProject, ExactOnTheSpace) {
    for (int nu : {0, 1, 2}) {
        Func u;
        const double a = 0.7;
        u.f = [a, nu](double t) { return nu == 0 ? a : a * t; };
        u.poly = nu == 0 ? Poly{a} : Poly{0.0, a};
        EXPECT_NEAR(ht_project(u, nu, 8, 2.0).error, 0.0, 1e-12) << "nu=" << nu;
    }
}

TEST(Split, LinearInputHasNoSecondPart) {
    Func u;
    u.f = [](double t) { return 2.0 * t - 1.0; };
    u.df = [](double) { return 2.0; };
    u.ddf = [](double) { return 0.0; };
    const SplitResult s = split_u1_u2(u, 8, 2.0);
    EXPECT_EQ(s.norm_u2, 0.0);
    // u - Q_h u is exactly u^1 for linear u
    const DofVector q = l2_project(u, FESpace(Mesh(8, 2.0), 0));
    for (double t = 0.01; t < 2.0; t += 0.1) EXPECT_NEAR(u.f(t) - fe_eval(q, t), s.u1(t), 1e-13);
}

TEST(Split, SumReproducesProjectionError) {
    for (const char* id : {"cubic_a", "cubic_b", "sin_pi4"}) {
        const Func u = make_func(id, 2.0);
        const std::size_t n = 16;
        const SplitResult s = split_u1_u2(u, n, 2.0);
        const DofVector q = l2_project(u, FESpace(Mesh(n, 2.0), 0));
        for (double t = 0.013; t < 2.0; t += 0.097) EXPECT_NEAR(u.f(t) - fe_eval(q, t), s.u1(t) + s.u2(t), 1e-12) << id;
        EXPECT_LE(s.norm_u2, s.norm_u2_bound * (1.0 + 1e-12)) << id;
    }
}

TEST(Split, BoundsOnCubics) {
    for (const auto& o : props::split_bounds()) EXPECT_LE(o.worst, o.limit) << o.name;
}

TEST(Wh1, MatchesFoldedPairingAndBound) {
    for (const char* id : {"cubic_a", "cubic_b"})
        for (std::size_t n : {4, 32, 128}) {
            const Func u = make_func(id, 2.0);
            const Wh1 a = wh1_norm(u, n, 2.0);
            const Vec b = wh1_folded(u, n, 2.0);
            for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a.w[i], b[i], 1e-11);
            EXPECT_LE(a.norm2, a.bound);
        }
}

TEST(FKernel, ContinuousNearZeroAndBounded) {
    EXPECT_NEAR(f_kernel(1e-6), f_kernel(2e-6), 1e-5);
    EXPECT_THROW(f_kernel(0.0), DomainError);
    EXPECT_THROW(f_kernel(2.0), DomainError);
    for (double x : {0.01, 0.3, 1.0, 1.5}) EXPECT_NEAR(f_kernel_mu_sum(x), f_kernel_mu_sum_direct(x, 2000000), 1e-9);
    EXPECT_EQ(props::f_bound(2000).worst, 0.0);
}

TEST(Eoc, Examples) {
    const Vec e = eoc({1.0, 0.25, 0.0625});
    EXPECT_TRUE(std::isnan(e[0]));
    EXPECT_DOUBLE_EQ(e[1], 2.0);
    EXPECT_DOUBLE_EQ(e[2], 2.0);
    EXPECT_THROW(eoc({1.0}), std::invalid_argument);
    EXPECT_THROW(eoc({1.0, 0.0}), std::domain_error);
}

TEST(ResidualStability, PublishedSmallMeshValues) {
    const ResidualStability a = cs_of_residual(make_func("sin_pi4", 2.0), 4, 2.0);
    EXPECT_NEAR(a.c_S, 0.3437, 0.5e-4);
    EXPECT_NEAR(a.res_norm, 4.922e-2, 0.5e-5);
    const ResidualStability b = cs_of_residual(make_func("t_23", 2.0), 2, 2.0);
    EXPECT_NEAR(b.c_S, 0.4467, 0.5e-4);
    EXPECT_NEAR(b.res_norm, 1.629e-1, 0.5e-4);
}

TEST(ResidualStability, QuotientAboveClosedFormBound) {
    for (const char* id : {"sin_pi4", "t_23", "t_Tt_23"})
        for (std::size_t n : {4, 16, 64}) {
            const ResidualStability r = cs_of_residual(make_func(id, 2.0), n, 2.0);
            EXPECT_GE(r.c_S, r.c_S_bound) << id << " n=" << n;
        }
}

TEST(ConvergenceTable, Construction) {
    const auto t = ConvergenceTable::from_values("error", 0, 2.0, "sin_pi4", {2, 4, 8}, {0.4, 0.2, 0.1});
    EXPECT_EQ(t.rows.size(), 3u);
    EXPECT_DOUBLE_EQ(t.rows[2].h, 0.25);
    EXPECT_DOUBLE_EQ(t.rows[2].eoc, 1.0);
    EXPECT_THROW(ConvergenceTable::from_values("error", 0, 2.0, "", {2, 8}, {1.0, 0.5}), std::invalid_argument);
}
