#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "specfun.hpp"

namespace mht {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

enum class SingMap { none, power_left, power_right };

struct QuadratureSpec {
    int points_per_oscillation = 16;
    double tol = 1e-12;
    SingMap map = SingMap::none;
    double alpha = 1.0; // tau = t^alpha near the mapped endpoint
    int max_nodes = 1 << 22;
};

/// Gauss-Legendre rule on [-1,1] with N points.
struct GaussRule {
    std::vector<double> x, w;
};

template <unsigned N>
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, N>;
        GaussRule r;
        const auto& a = G::abscissa();
        const auto& wt = G::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) {
                r.x.push_back(0.0);
                r.w.push_back(wt[i]);
            } else {
                r.x.push_back(-a[i]);
                r.w.push_back(wt[i]);
                r.x.push_back(a[i]);
                r.w.push_back(wt[i]);
            }
        }
        return r;
    }();
    return rule;
}

inline const GaussRule& default_rule() { return gauss_rule<20>(); }

template <class F>
double gauss_integrate(F&& f, double a, double b, const GaussRule& r = default_rule()) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + hw * r.x[i]);
    return s * hw;
}

/// Composite Gauss on [a,b] with geometric refinement toward the flagged ends.
/// f receives (t, distance to a, distance to b) so callers can avoid cancellation.
template <class F>
double graded_integrate3(F&& f, double a, double b, bool grade_a, bool grade_b, int levels = 40,
                         double ratio = 0.15, const GaussRule& r = default_rule()) {
    const double L = b - a;
    if (L <= 0.0) return 0.0;
    double mid_lo = 0.0, mid_hi = L;
    if (grade_a && grade_b) { mid_lo = 0.5 * L; mid_hi = 0.5 * L; }
    else if (grade_a) mid_lo = L;
    else if (grade_b) mid_hi = 0.0;
    KahanSum s;
    auto seg = [&](double lo, double hi, bool from_b) {
        // lo, hi are offsets; from_b: offsets measured from b
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        double acc = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            const double d = c + hw * r.x[i];
            if (from_b) acc += r.w[i] * f(b - d, L - d, d);
            else acc += r.w[i] * f(a + d, d, L - d);
        }
        s.add(acc * hw);
    };
    if (grade_a) {
        double hi = mid_lo;
        for (int l = 0; l < levels; ++l) {
            double lo = hi * ratio;
            seg(lo, hi, false);
            hi = lo;
        }
        seg(0.0, hi, false);
    }
    if (grade_b) {
        double hi = L - mid_hi;
        for (int l = 0; l < levels; ++l) {
            double lo = hi * ratio;
            seg(lo, hi, true);
            hi = lo;
        }
        seg(0.0, hi, true);
    }
    if (!grade_a && !grade_b) seg(0.0, L, false);
    return s.value();
}

template <class F>
double graded_integrate(F&& f, double a, double b, bool grade_a, bool grade_b, int levels = 40,
                        double ratio = 0.15) {
    return graded_integrate3([&](double t, double, double) { return f(t); }, a, b, grade_a, grade_b,
                             levels, ratio);
}

} // namespace mht
