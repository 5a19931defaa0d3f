// Reproduces the stability and convergence tables and the F-bound grid.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mht/tables.hpp"

namespace fs = std::filesystem;

namespace {

void apply_overrides(const nlohmann::json& j, const mht::TableKey& key, mht::Tolerance& t) {
    auto take = [&](const nlohmann::json& o) {
        if (o.contains("abs")) t.abs = o["abs"].get<double>();
        if (o.contains("rel")) t.rel = o["rel"].get<double>();
        if (o.contains("eoc_tol")) t.eoc_tol = o["eoc_tol"].get<double>();
        if (o.contains("eoc_from_n")) t.eoc_from_n = o["eoc_from_n"].get<std::size_t>();
        if (o.contains("eoc_target")) {
            if (o["eoc_target"].is_null()) t.eoc_target.reset();
            else t.eoc_target = o["eoc_target"].get<double>();
        }
    };
    // most specific key wins: table, table/quantity, table/quantity/nu
    for (const std::string k : {key.table, key.table + "/" + key.quantity,
                                key.table + "/" + key.quantity + "/" + std::to_string(key.nu)})
        if (j.contains(k)) take(j[k]);
}

bool write_file(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
    return bool(f);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tables for the Hilbert-type L2 projection"};
    std::string table = "table1";
    std::vector<int> nus;
    std::size_t nmax = 0;
    double T = 2.0;
    std::vector<std::string> funcs;
    std::string format = "csv";
    std::string out = "results";
    std::string tol_path;
    unsigned threads = 0;
    bool no_check = false;

    app.add_option("--table", table, "table1..table8, fig2 or custom")
        ->check(CLI::IsMember(mht::table_ids()));
    app.add_option("--nu", nus, "polynomial degrees")->check(CLI::Range(0, 2));
    app.add_option("--nmax", nmax, "largest number of elements (power of two)");
    app.add_option("--horizon", T, "final time T")->check(CLI::PositiveNumber);
    app.add_option("--func", funcs, "test functions for custom: sin_pi4, t_23, t_Tt_23, cubic_a, cubic_b, psi1");
    app.add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
    app.add_option("--out", out, "output directory");
    app.add_option("--tol-table", tol_path, "JSON file with tolerance overrides")->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "worker count (default: HT_THREADS or 1)");
    app.add_flag("--no-check", no_check, "skip the comparison with the published values");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (nmax != 0 && (nmax < 2 || (nmax & (nmax - 1)) != 0)) {
        std::cerr << "--nmax must be a power of two >= 2\n";
        return 1;
    }
    for (const auto& f : funcs) {
        const auto& ids = mht::func_ids();
        if (f != "psi1" && std::find(ids.begin(), ids.end(), f) == ids.end()) {
            std::cerr << "unknown function: " << f << "\n";
            return 1;
        }
    }
    if (table == "custom" && funcs.empty()) {
        std::cerr << "--table custom needs --func\n";
        return 1;
    }

    nlohmann::json overrides = nlohmann::json::object();
    if (!tol_path.empty()) {
        try {
            std::ifstream f(tol_path);
            overrides = nlohmann::json::parse(f);
        } catch (const std::exception& e) {
            std::cerr << "cannot read tolerance table: " << e.what() << "\n";
            return 1;
        }
    }

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "cannot create " << out << ": " << ec.message() << "\n";
        return 1;
    }
    const std::string ext = format == "csv" ? ".csv" : ".md";

    if (table == "fig2") {
        const auto grid = mht::f_bound_grid(10000);
        std::ostringstream os;
        std::size_t bad = 0;
        double worst = -1e300;
        if (format == "csv") os << "x,gap\n";
        else os << "| x | gap |\n|---:|---:|\n";
        char buf[96];
        for (const auto& [x, g] : grid) {
            std::snprintf(buf, sizeof buf, format == "csv" ? "%.10f,%.6e\n" : "| %.10f | %.6e |\n", x, g);
            os << buf;
            worst = std::max(worst, g);
            if (g > 0.0) ++bad;
        }
        if (!write_file(fs::path(out) / ("fig2" + ext), os.str())) return 1;
        std::printf("fig2: %zu points, max gap %.3e, %zu violations\n", grid.size(), worst, bad);
        return bad == 0 ? 0 : 2;
    }

    mht::RunRequest req;
    req.tables = {table};
    if (!nus.empty()) {
        std::sort(nus.begin(), nus.end());
        nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
        req.nus = nus;
    } else if (table == "table5" || table == "table6" || table == "table7" || table == "table8") {
        req.nus = {0};
    }
    if (nmax != 0) req.nmax = req.nmax_table5 = nmax;
    else if (table == "table5") req.nmax = 128;
    else if (table == "custom") req.nmax = 64;
    req.T = T;
    req.custom_funcs = funcs;
    req.workers = threads != 0 ? threads : mht::env_threads();

    std::vector<mht::Column> cols;
    try {
        cols = mht::run_tables(req);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    std::vector<mht::Failure> fails;
    for (const auto& c : cols) {
        const std::string body = format == "csv" ? mht::to_csv(c) : mht::to_markdown(c);
        if (!write_file(fs::path(out) / (c.key.name() + ext), body)) {
            std::cerr << "cannot write output\n";
            return 1;
        }
        std::cout << "## " << c.key.name() << "\n" << mht::to_markdown(c) << "\n";
        if (no_check || T != 2.0) continue;
        mht::Tolerance tol = mht::default_tolerance(c.key);
        apply_overrides(overrides, c.key, tol);
        auto f = mht::compare_column(c, tol);
        fails.insert(fails.end(), f.begin(), f.end());
    }
    if (!fails.empty()) {
        const std::string list = mht::failures_csv(fails);
        write_file(fs::path(out) / "failures.csv", list);
        std::cerr << list;
        return 2;
    }
    return 0;
}
