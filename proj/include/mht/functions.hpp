#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "piecewise.hpp"

namespace mht {

/// A scalar function on (0,T) with optional structure the solvers can exploit.
struct Func {
    std::string id;
    std::function<double(double)> f;
    std::function<double(double)> df;  // may be empty
    std::function<double(double)> ddf; // may be empty
    std::optional<Poly> poly;          // global polynomial coefficients, if any
    bool sing0 = false;                // nonsmooth at t = 0
    bool singT = false;                // nonsmooth at t = T
    // Evaluation in terms of the distance to T; used near t = T.
    std::function<double(double)> f_from_T;

    double operator()(double t) const { return f(t); }
    double eval_near_T(double t, double d) const { return f_from_T ? f_from_T(d) : f(t); }
};

inline Func make_poly_func(std::string id, Poly g) {
    Func u;
    u.id = std::move(id);
    u.poly = g;
    u.f = [g](double t) { return poly_eval(g, t); };
    Poly d1 = poly_deriv(g), d2 = poly_deriv(d1);
    u.df = [d1](double t) { return poly_eval(d1, t); };
    u.ddf = [d2](double t) { return poly_eval(d2, t); };
    return u;
}

/// Catalogue: sin_pi4, t_23, t_Tt_23, cubic_a, cubic_b.
inline Func make_func(const std::string& id, double T) {
    using std::numbers::pi;
    if (id == "sin_pi4") {
        Func u;
        u.id = id;
        u.f = [](double t) { return std::sin(pi * t / 4.0); };
        u.df = [](double t) { return pi / 4.0 * std::cos(pi * t / 4.0); };
        u.ddf = [](double t) { return -pi * pi / 16.0 * std::sin(pi * t / 4.0); };
        return u;
    }
    if (id == "t_23") {
        Func u;
        u.id = id;
        u.f = [](double t) { return std::cbrt(t * t); };
        u.df = [](double t) { return 2.0 / 3.0 / std::cbrt(t); };
        u.ddf = [](double t) { return -2.0 / 9.0 / (t * std::cbrt(t)); };
        u.sing0 = true;
        return u;
    }
    if (id == "t_Tt_23") {
        Func u;
        u.id = id;
        u.f = [T](double t) { return t * std::cbrt((T - t) * (T - t)); };
        u.f_from_T = [T](double d) { return (T - d) * std::cbrt(d * d); };
        u.df = [T](double t) {
            const double d = T - t;
            return std::cbrt(d * d) - 2.0 / 3.0 * t / std::cbrt(d);
        };
        u.ddf = [T](double t) {
            const double d = T - t;
            return -4.0 / 3.0 / std::cbrt(d) - 2.0 / 9.0 * t / (d * std::cbrt(d));
        };
        u.singT = true;
        return u;
    }
    if (id == "cubic_a") return make_poly_func(id, {0.0, 0.0, -10.0, 1.0});
    if (id == "cubic_b") return make_poly_func(id, {0.0, -10.0, 0.0, 1.0});
    throw std::invalid_argument("unknown test function: " + id);
}

inline const std::vector<std::string>& func_ids() {
    static const std::vector<std::string> ids{"sin_pi4", "t_23", "t_Tt_23", "cubic_a", "cubic_b"};
    return ids;
}

} // namespace mht
