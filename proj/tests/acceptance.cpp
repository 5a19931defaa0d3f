// Acceptance run: one PASS/FAIL line per criterion, details above it.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

#include "mht/positivity.hpp"
#include "mht/tables.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace mht;
using std::numbers::pi;

namespace {

// tolerances for the criteria that are not table comparisons
constexpr double kFoldedVsSpectral = 1e-9;
constexpr double kSpectralVsQuadrature = 1e-7;
constexpr double kKernelVsSeries = 1e-8;
constexpr double kSandwichTop = 0.43;
constexpr double kPropertyBudgetSeconds = 60.0;
constexpr double kDoubleAgreement = 1e-13;

struct Verdict {
    bool ok = true;
    void check(bool c) { ok = ok && c; }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

bool check_tables(const std::vector<Column>& cols, const std::vector<std::string>& tables) {
    std::size_t total = 0;
    std::vector<Failure> fails;
    for (const auto& c : cols) {
        if (std::find(tables.begin(), tables.end(), c.key.table) == tables.end()) continue;
        const auto f = compare_column(c, default_tolerance(c.key));
        total += c.table.rows.size();
        fails.insert(fails.end(), f.begin(), f.end());
    }
    for (const auto& f : fails)
        std::printf("    %s n=%zu %s: expected %.6g got %.6g (tol %.3g)\n", f.key.name().c_str(), f.n, f.what.c_str(),
                    f.expected, f.got, f.tolerance);
    std::printf("    %zu rows checked, %zu mismatches\n", total, fails.size());
    return fails.empty();
}

void print_column(const Column& c) {
    std::printf("  %s\n", c.key.name().c_str());
    for (const auto& r : c.table.rows)
        std::printf("    n=%-5zu %s  %s\n", r.n, format_value(c.key.quantity, r.value).c_str(),
                    format_eoc(r.eoc).c_str());
}

bool criterion7(const std::vector<Column>& cols) {
    bool ok = true;
    for (const auto& c : cols) {
        if (c.key.table != "table1" || c.key.quantity != "c_S_over_h" || c.key.nu != 0) continue;
        for (const auto& r : c.table.rows) {
            const double nn = double(r.n);
            const double floor = 0.5 * (2.0 * std::sqrt(3.0) / (pi * pi)) * 8.0 / ((2.0 + 1.0 / nn) * (2.0 + 1.0 / nn));
            const bool in = r.value >= floor && r.value <= kSandwichTop;
            if (!in) std::printf("    n=%zu c_S/h=%.6f outside [%.6f, %.2f]\n", r.n, r.value, floor, kSandwichTop);
            ok = ok && in;
        }
    }
    return ok;
}

bool criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::vector<props::Outcome> out{props::parseval(rng),
                                    props::adjoint(rng),
                                    props::isometry(rng),
                                    props::discrete_orthogonality(256),
                                    props::cosine_square_sum(256),
                                    props::interior_cosine_orthogonality(256),
                                    props::recurrences(rng),
                                    props::norm_equivalence(rng)};
    for (auto& o : props::infsup_theorem(rng)) out.push_back(o);
    for (auto& o : props::split_bounds()) out.push_back(o);
    out.push_back(props::f_bound(10000));
    const double dt = seconds_since(t0);
    bool ok = dt < kPropertyBudgetSeconds;
    for (const auto& o : out) {
        std::printf("    %-48s worst %.3e limit %.1e %s\n", o.name.c_str(), o.worst, o.limit, o.ok() ? "ok" : "VIOLATED");
        ok = ok && o.ok();
    }
    std::printf("    property suites took %.1f s (budget %.0f s)\n", dt, kPropertyBudgetSeconds);
    return ok;
}

bool criterion9() {
    bool ok = true;
    double worst = 0.0;
    for (std::size_t n = 2; n <= 64; n *= 2) {
        const FESpace V(Mesh(n, 2.0), 0);
        AssemblyOptions spec;
        spec.method = AssemblyMethod::truncated_spectral;
        const double d = max_diff(hilbert_matrix(V), hilbert_matrix(V, spec));
        worst = std::max(worst, d);
    }
    std::printf("    folded vs truncated spectral, nu=0, n<=64: max %.3e (tol %.0e)\n", worst, kFoldedVsSpectral);
    ok = ok && worst <= kFoldedVsSpectral;

    worst = 0.0;
    for (int nu : {0, 1, 2})
        for (std::size_t n = 2; n <= 32; n *= 2) {
            const FESpace V(Mesh(n, 2.0), nu);
            AssemblyOptions spec;
            spec.method = AssemblyMethod::truncated_spectral;
            const DenseMatrix B = hilbert_matrix(V, spec);
            for (std::size_t j = 0; j < V.dof(); ++j) {
                const Vec row = oracle::vp_row(V, j);
                for (std::size_t i = 0; i < V.dof(); ++i) worst = std::max(worst, std::abs(B(j, i) - row[i]));
            }
        }
    std::printf("    spectral vs principal value quadrature, all nu, n<=32, every entry: max %.3e (tol %.0e)\n", worst,
                kSpectralVsQuadrature);
    ok = ok && worst <= kSpectralVsQuadrature;

    worst = 0.0;
    std::mt19937_64 rng(99);
    const double T = 2.0;
    const Vec c = props::decaying_coeffs(rng, 30);
    for (int i = 0; i < 20; ++i) {
        const double t = T * (double(i) + 0.5) / 20.0;
        const double kernel = kernel_apply_vp([&](double s) { return series_eval(SineSeries{T, c}, s); }, t, T);
        worst = std::max(worst, std::abs(kernel - series_eval(CosineSeries{T, c}, t)));
    }
    std::printf("    kernel vs series at 20 points: max %.3e (tol %.0e)\n", worst, kKernelVsSeries);
    return ok && worst <= kKernelVsSeries;
}

bool criterion10() {
    // the symmetric part is assembled again in extended precision and certified by a shifted
    // Cholesky factorization; the double precision eigenvalue is printed for comparison only
    bool ok = true;
    for (int nu : {0, 1, 2})
        for (std::size_t n = 2; n <= 128; n *= 2) {
            const DenseMatrix B = hilbert_matrix(FESpace(Mesh(n, 2.0), nu));
            DenseMatrix S(B.rows(), B.cols());
            for (std::size_t i = 0; i < B.rows(); ++i)
                for (std::size_t j = 0; j < B.cols(); ++j) S(i, j) = 0.5 * (B(i, j) + B(j, i));
            const double m = sym_eig(S).values.front();
            const PositivityCertificate c = certify_symmetric_positivity(nu, n, 2.0, &B);
            const bool good = c.certified && c.max_dev_double <= kDoubleAgreement;
            std::printf("    nu=%d n=%-4zu lambda_min ~ 1e%.1f (> 1e%.1f, %u digits), |S_mp - S| %.1e, double %.3e %s\n",
                        nu, n, c.log10_lambda, c.log10_shift, c.digits, c.max_dev_double, m, good ? "" : "FAILED");
            ok = ok && good;
        }
    return ok;
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    RunRequest req;
    req.tables = {"table1", "table2", "table3", "table4", "table5", "table6", "table7", "table8"};
    req.workers = env_threads();
    std::printf("computing tables (workers %u)\n", req.workers);
    std::fflush(stdout);
    const std::vector<Column> cols = run_tables(req);
    std::printf("tables done in %.1f s\n", seconds_since(t0));

    const char* dir = std::getenv("HT_ACCEPTANCE_OUT");
    const std::filesystem::path out = dir ? dir : "acceptance_results";
    std::filesystem::create_directories(out);
    for (const auto& c : cols) {
        std::ofstream(out / (c.key.name() + ".csv")) << to_csv(c);
        print_column(c);
    }

    const std::vector<std::vector<std::string>> groups{{"table1"}, {"table2"}, {"table3"},
                                                       {"table4"}, {"table5"}, {"table6", "table7", "table8"}};
    std::map<int, bool> verdict;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::printf("criterion %zu details:\n", g + 1);
        verdict[int(g) + 1] = check_tables(cols, groups[g]);
    }
    std::printf("criterion 7 details:\n");
    verdict[7] = criterion7(cols);
    std::printf("criterion 8 details:\n");
    verdict[8] = criterion8();
    std::printf("criterion 9 details:\n");
    verdict[9] = criterion9();
    std::printf("criterion 10 details:\n");
    verdict[10] = criterion10();

    bool all = true;
    for (const auto& [k, ok] : verdict) {
        std::printf("criterion %d: %s\n", k, ok ? "PASS" : "FAIL");
        all = all && ok;
    }
    std::printf("total time %.1f s\n", seconds_since(t0));
    return all ? 0 : 1;
}
