#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "analysis.hpp"
#include "reference_tables.hpp"

namespace mht {

/// Runs job(i) for i < count on a pool of workers. Each job writes only its own slot,
/// so results do not depend on scheduling. The first exception (by index) is rethrown.
template <class F>
void run_jobs(std::size_t count, unsigned workers, F&& job) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::exception_ptr> errs(count);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    job(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

/// Worker count from HT_THREADS, 1 when unset or invalid.
inline unsigned env_threads() {
    const char* s = std::getenv("HT_THREADS");
    if (!s) return 1;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    return (end != s && v > 0 && v < 1024) ? unsigned(v) : 1u;
}

/// u equal to the first basis function of the degree nu space on n elements.
inline Func basis1_func(std::size_t n, double T, int nu) {
    Func u;
    u.id = "psi1";
    const FESpace V(Mesh(n, T), nu);
    u.f = [V](double t) { return basis_eval(V, 1, t); };
    return u;
}

struct TableKey {
    std::string table;
    std::string quantity;
    int nu = 0;
    std::string func;
    auto operator<=>(const TableKey&) const = default;
    std::string name() const {
        std::string s = table + "_" + quantity + "_nu" + std::to_string(nu);
        if (!func.empty()) s += "_" + func;
        return s;
    }
};

struct Column {
    TableKey key;
    ConvergenceTable table;
};

inline bool is_cs_quantity(const std::string& q) { return q.rfind("c_S", 0) == 0; }

inline const std::vector<std::string>& table_ids() {
    static const std::vector<std::string> ids{"table1", "table2", "table3", "table4", "table5",
                                              "table6", "table7", "table8", "fig2",   "custom"};
    return ids;
}

/// Test function(s) behind an error or residual table.
inline std::vector<std::string> table_funcs(const std::string& table) {
    if (table == "table2" || table == "table6") return {"sin_pi4"};
    if (table == "table3" || table == "table7") return {"t_23"};
    if (table == "table4" || table == "table8") return {"t_Tt_23"};
    if (table == "table5") return {"cubic_a", "cubic_b"};
    return {};
}

struct RunRequest {
    std::set<std::string> tables;
    std::vector<int> nus{0, 1, 2};
    std::size_t nmin = 2;
    std::size_t nmax = 2048;
    std::size_t nmax_table5 = 128;
    double T = 2.0;
    std::vector<std::string> custom_funcs; // errors of these functions for every nu (table "custom")
    unsigned workers = 1;                  // concurrent (nu, n) jobs
    unsigned threads = 1;                  // threads inside one job
};

namespace detail {

struct Job {
    int nu;
    std::size_t n;
    bool cs = false;
    std::vector<std::string> err_funcs;
    std::vector<std::string> res_funcs;
};

struct JobOut {
    double cs = 0.0;
    std::map<std::string, double> err;
    std::map<std::string, ResidualStability> res;
};

using Moments = std::vector<std::array<double, 4>>;

inline Func func_for(const std::string& id, std::size_t n, double T, int nu) {
    return id == "psi1" ? basis1_func(n, T, nu) : make_func(id, T);
}

inline bool needs_moments(const std::string& id) {
    if (id == "psi1") return false;
    return !make_func(id, 2.0).poly;
}

inline JobOut run_job(const Job& job, double T, unsigned threads,
                      const std::map<std::pair<std::string, std::size_t>, Moments>& moments) {
    JobOut out;
    const FESpace V(Mesh(job.n, T), job.nu);
    const auto basis = basis_functions(V);
    const DenseMatrix B = folded_pair_matrix(basis, basis, job.n, T, threads);
    if (job.cs) out.cs = min_generalized_singular(B, mass_matrix(V)).sigma_min;
    if (job.err_funcs.empty() && job.res_funcs.empty()) return out;

    const LUFactor lu(B);
    auto solve = [&](const Vec& f) {
        Vec x = lu.solve(f);
        Vec r = matvec(B, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = f[i] - r[i];
        Vec d = lu.solve(r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += d[i];
        return x;
    };
    auto rhs = [&](const std::string& id, const Func& u) {
        if (id == "psi1") {
            Vec f(V.dof());
            for (std::size_t j = 0; j < f.size(); ++j) f[j] = B(j, 0);
            return f;
        }
        if (u.poly) return hilbert_rhs_for(u, basis, job.n, T, RhsMethod::exact_poly);
        const Moments& G = moments.at({id, job.n});
        Vec f(basis.size());
        for (std::size_t j = 0; j < f.size(); ++j) f[j] = pair_with_moments(basis[j], G);
        return f;
    };

    for (const auto& id : job.err_funcs) {
        const Func u = func_for(id, job.n, T, job.nu);
        const DofVector uh(V, solve(rhs(id, u)));
        out.err[id] = fe_l2_error(u, uh);
    }
    for (const auto& id : job.res_funcs) {
        if (job.nu != 0) throw std::invalid_argument("residual tables need nu = 0");
        const Func u = func_for(id, job.n, T, job.nu);
        const Vec f = rhs(id, u);
        const DofVector q = l2_project(u, V);
        const Vec bq = matvec(B, q.values);
        DofVector w(V), d(V);
        const DofVector uh(V, solve(f));
        for (std::size_t j = 0; j < job.n; ++j) {
            w.values[j] = (f[j] - bq[j]) / V.h();
            d.values[j] = uh.values[j] - q.values[j];
        }
        ResidualStability rs{};
        rs.res_norm = pwc_norm(w);
        rs.err_norm = pwc_norm(d);
        if (rs.err_norm > 0.0) {
            const MinimalM mm = minimal_M_and_cs(d);
            rs.c_S = rs.res_norm / rs.err_norm;
            rs.c_S_bound = mm.c_S;
            rs.M = mm.M;
        }
        out.res[id] = rs;
    }
    return out;
}

} // namespace detail

/// Computes every column needed by the requested tables, in a fixed order:
/// tables as listed in table_ids(), then nu ascending, then functions as listed.
inline std::vector<Column> run_tables(const RunRequest& req) {
    const double T = req.T;
    if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (req.nmin < 1 || req.nmax < req.nmin) throw std::invalid_argument("bad n range");
    auto has = [&](const char* t) { return req.tables.count(t) > 0; };
    auto ns_upto = [&](std::size_t nmax) {
        std::vector<std::size_t> v;
        for (std::size_t n = req.nmin; n <= nmax; n *= 2) v.push_back(n);
        return v;
    };
    const auto ns = ns_upto(req.nmax);
    const auto ns5 = ns_upto(std::min(req.nmax, req.nmax_table5));

    std::vector<std::string> err_funcs;
    for (const char* t : {"table2", "table3", "table4"})
        if (has(t)) err_funcs.push_back(table_funcs(t)[0]);
    if (has("custom"))
        for (const auto& f : req.custom_funcs)
            if (std::find(err_funcs.begin(), err_funcs.end(), f) == err_funcs.end()) err_funcs.push_back(f);
    std::vector<std::string> res_funcs;
    for (const char* t : {"table6", "table7", "table8"})
        if (has(t)) res_funcs.push_back(table_funcs(t)[0]);

    std::vector<detail::Job> jobs;
    for (int nu : req.nus) {
        for (std::size_t n : ns) {
            detail::Job j{nu, n, has("table1"), err_funcs, {}};
            if (nu == 0) j.res_funcs = res_funcs;
            if (nu == 0 && has("table5") && n <= ns5.back())
                for (const auto& f : table_funcs("table5")) j.res_funcs.push_back(f);
            if (j.cs || !j.err_funcs.empty() || !j.res_funcs.empty()) jobs.push_back(std::move(j));
        }
    }
    // Largest jobs first keeps the pool busy at the end.
    std::stable_sort(jobs.begin(), jobs.end(), [](const detail::Job& a, const detail::Job& b) {
        return a.n * (a.nu == 2 ? 2 : 1) > b.n * (b.nu == 2 ? 2 : 1);
    });

    // H_T^{-1} u element moments are shared by all degrees.
    std::vector<std::pair<std::string, std::size_t>> mkeys;
    for (const auto& j : jobs)
        for (const auto* list : {&j.err_funcs, &j.res_funcs})
            for (const auto& f : *list)
                if (detail::needs_moments(f)) mkeys.push_back({f, j.n});
    std::sort(mkeys.begin(), mkeys.end());
    mkeys.erase(std::unique(mkeys.begin(), mkeys.end()), mkeys.end());
    std::vector<detail::Moments> mvals(mkeys.size());
    run_jobs(mkeys.size(), req.workers, [&](std::size_t i) {
        mvals[i] = hinv_moments(make_func(mkeys[i].first, T), mkeys[i].second, T, req.threads);
    });
    std::map<std::pair<std::string, std::size_t>, detail::Moments> moments;
    for (std::size_t i = 0; i < mkeys.size(); ++i) moments.emplace(mkeys[i], std::move(mvals[i]));

    std::vector<detail::JobOut> outs(jobs.size());
    run_jobs(jobs.size(), req.workers, [&](std::size_t i) { outs[i] = detail::run_job(jobs[i], T, req.threads, moments); });
    std::map<std::pair<int, std::size_t>, const detail::JobOut*> by;
    for (std::size_t i = 0; i < jobs.size(); ++i) by[{jobs[i].nu, jobs[i].n}] = &outs[i];

    std::vector<Column> cols;
    auto add = [&](TableKey key, const std::vector<std::size_t>& nlist, auto&& get) {
        Vec v;
        for (std::size_t n : nlist) v.push_back(get(*by.at({key.nu, n}), n));
        cols.push_back({key, ConvergenceTable::from_values(key.quantity, key.nu, T, key.func, nlist, v)});
    };
    for (const auto& t : table_ids()) {
        if (!has(t.c_str())) continue;
        if (t == "table1") {
            for (int nu : req.nus) {
                add({t, "c_S", nu, ""}, ns, [](const detail::JobOut& o, std::size_t) { return o.cs; });
                add({t, "c_S_over_h", nu, ""}, ns,
                    [T](const detail::JobOut& o, std::size_t n) { return o.cs / (T / double(n)); });
            }
        } else if (t == "table2" || t == "table3" || t == "table4") {
            const std::string f = table_funcs(t)[0];
            for (int nu : req.nus)
                add({t, "error", nu, f}, ns, [f](const detail::JobOut& o, std::size_t) { return o.err.at(f); });
        } else if (t == "custom") {
            for (int nu : req.nus)
                for (const auto& f : req.custom_funcs)
                    add({t, "error", nu, f}, ns, [f](const detail::JobOut& o, std::size_t) { return o.err.at(f); });
        } else if (t == "table5" || t == "table6" || t == "table7" || t == "table8") {
            if (std::find(req.nus.begin(), req.nus.end(), 0) == req.nus.end()) continue;
            const auto& nl = t == "table5" ? ns5 : ns;
            for (const auto& f : table_funcs(t)) {
                if (t != "table5")
                    add({t, "c_S_residual", 0, f}, nl,
                        [f](const detail::JobOut& o, std::size_t) { return o.res.at(f).c_S; });
                add({t, "residual", 0, f}, nl,
                    [f](const detail::JobOut& o, std::size_t) { return o.res.at(f).res_norm; });
            }
        }
    }
    return cols;
}

// ---- comparison with the published values ----

struct Tolerance {
    double abs = 0.0; // |got - expected| <= abs + rel |expected|
    double rel = 0.0;
    double eoc_tol = -1.0;      // negative: eoc not checked
    std::size_t eoc_from_n = 0; // eoc rows with n >= this are checked
    std::optional<double> eoc_target; // unset: compare with the published eoc of the row
};

inline Tolerance default_tolerance(const TableKey& k) {
    Tolerance t;
    if (k.table == "table1") {
        if (k.quantity == "c_S") t.abs = k.nu == 0 ? 5e-6 : 5e-5;
        else t.abs = 0.002;
        return t;
    }
    if (k.table == "table2") {
        t.rel = 5e-3;
        t.eoc_tol = 0.02;
        t.eoc_from_n = 16;
        t.eoc_target = double(k.nu + 1);
        return t;
    }
    if (k.table == "table3" || k.table == "table4") {
        t.rel = 1.6e-2;
        t.eoc_tol = 0.02;
        t.eoc_from_n = 512;
        t.eoc_target = k.table == "table3" ? 0.67 : (k.nu == 0 ? 1.00 : 1.17);
        return t;
    }
    if (k.table == "table5") {
        t.abs = 1e-6;
        t.eoc_tol = 0.01;
        t.eoc_target = k.func == "cubic_a" ? 2.00 : 1.50;
        return t;
    }
    if (k.table == "table6" || k.table == "table7" || k.table == "table8") {
        t.rel = 5e-3;
        t.eoc_tol = k.table == "table8" ? 0.03 : 0.02;
        return t;
    }
    return t;
}

struct Failure {
    TableKey key;
    std::size_t n;
    std::string what; // value or eoc
    double expected, got, tolerance;
};

/// Compares a computed column with the published one on the rows both have.
inline std::vector<Failure> compare_column(const Column& c, const Tolerance& tol) {
    std::vector<Failure> fails;
    const reference::Column* ref = reference::find(c.key.table, c.key.quantity, c.key.nu, c.key.func);
    if (!ref) return fails;
    const auto ref_ns = reference::mesh_sizes(2048);
    for (const auto& row : c.table.rows) {
        const auto it = std::find(ref_ns.begin(), ref_ns.end(), row.n);
        if (it == ref_ns.end()) continue;
        const std::size_t r = std::size_t(it - ref_ns.begin());
        if (r >= ref->values.size()) continue;
        const double e = ref->values[r];
        const double lim = tol.abs + tol.rel * std::abs(e);
        if (!(std::abs(row.value - e) <= lim)) fails.push_back({c.key, row.n, "value", e, row.value, lim});
        if (tol.eoc_tol < 0.0 || std::isnan(row.eoc) || row.n < tol.eoc_from_n) continue;
        double target;
        if (tol.eoc_target) target = *tol.eoc_target;
        else if (r >= 1 && r - 1 < ref->eoc.size()) target = ref->eoc[r - 1];
        else continue;
        if (!(std::abs(row.eoc - target) <= tol.eoc_tol)) fails.push_back({c.key, row.n, "eoc", target, row.eoc, tol.eoc_tol});
    }
    return fails;
}

// ---- output ----

inline std::string format_value(const std::string& quantity, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, is_cs_quantity(quantity) ? "%.6f" : "%.5e", v);
    return buf;
}

inline std::string format_h(double h) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", h);
    return buf;
}

inline std::string format_eoc(double e) {
    if (std::isnan(e)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", e);
    return buf;
}

inline std::string to_csv(const Column& c) {
    std::ostringstream os;
    os << "n,h,value,eoc\n";
    for (const auto& r : c.table.rows)
        os << r.n << ',' << format_h(r.h) << ',' << format_value(c.key.quantity, r.value) << ',' << format_eoc(r.eoc)
           << '\n';
    return os.str();
}

inline std::string to_markdown(const Column& c) {
    std::ostringstream os;
    os << "| n | h | value | eoc |\n|---:|---:|---:|---:|\n";
    for (const auto& r : c.table.rows)
        os << "| " << r.n << " | " << format_h(r.h) << " | " << format_value(c.key.quantity, r.value) << " | "
           << format_eoc(r.eoc) << " |\n";
    return os.str();
}

inline std::string failures_csv(const std::vector<Failure>& fs) {
    std::ostringstream os;
    os << "table,quantity,nu,func,n,check,expected,got,tolerance\n";
    char buf[256];
    for (const auto& f : fs) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%s,%zu,%s,%.10g,%.10g,%.3g\n", f.key.table.c_str(),
                      f.key.quantity.c_str(), f.key.nu, f.key.func.c_str(), f.n, f.what.c_str(), f.expected, f.got,
                      f.tolerance);
        os << buf;
    }
    return os.str();
}

} // namespace mht
