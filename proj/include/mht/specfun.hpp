#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mht {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

namespace detail {

// sum_{mu>=0} (a+mu)^{-p}: 32 explicit terms, Euler-Maclaurin remainder.
inline double hurwitz_em(int p, double a) {
    constexpr int N = 32;
    KahanSum s;
    for (int mu = N - 1; mu >= 0; --mu) s.add(std::pow(a + mu, -p));

    const double x = a + N;
    double tail = std::pow(x, 1 - p) / (p - 1) + 0.5 * std::pow(x, -p);
    // B_{2j}/(2j)!
    static constexpr double b[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
                                   1.0 / 47900160.0};
    double rising = p; // p (p+1) ... (p+2j-2)
    double xp = std::pow(x, -p - 1);
    for (int j = 1; j <= 5; ++j) {
        tail += b[j - 1] * rising * xp;
        rising *= (p + 2 * j - 1) * double(p + 2 * j);
        xp /= x * x;
    }
    s.add(tail);
    return s.value();
}

} // namespace detail

/// Hurwitz zeta for integer order p >= 2.
inline double hurwitz_zeta(int p, double a) {
    if (!(a > 0.0)) throw DomainError("hurwitz_zeta: offset must be positive");
    if (p < 2) throw DomainError("hurwitz_zeta: order must be >= 2");
    return detail::hurwitz_em(p, a);
}

/// sum_{mu>=0} (a+mu)^{-p} for p in {2,3,4}.
inline double hurwitz_tail(int p, double a) {
    if (p < 2 || p > 4) throw DomainError("hurwitz_tail: order must be 2, 3 or 4, got " + std::to_string(p));
    if (!(a > 0.0)) throw DomainError("hurwitz_tail: offset must be positive");
    return detail::hurwitz_em(p, a);
}

/// gamma(k,n) = sum_mu (2k+1)^2 / (2k+1+4 mu n)^2
inline double gamma_kn(long k, long n) {
    if (n < 1) throw DomainError("gamma_kn: n must be >= 1");
    if (k < 0 || k > 2 * n - 1) throw DomainError("gamma_kn: k outside [0, 2n-1]");
    const double a = (2.0 * k + 1.0) / (4.0 * n);
    return a * a * hurwitz_tail(2, a);
}

/// sum_{mu>=0} (x + mu pi)^{-p}
inline double shifted_power_sum(int p, double x) {
    using std::numbers::pi;
    return std::pow(pi, -p) * hurwitz_zeta(p, x / pi);
}

} // namespace mht
