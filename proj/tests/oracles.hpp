#pragma once

// Test-only numeric oracles, deliberately independent of the library's
// implementation paths (different algorithms, separately coded).

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracles {

// recursive adaptive Simpson
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

// plain composite sieve written differently from the library's: marks
// multiples of every integer, no prime list reuse
inline std::int64_t sieve_count_independent(std::int64_t limit) {
    std::vector<char> comp(static_cast<std::size_t>(limit) + 1, 0);
    std::int64_t count = 0;
    for (std::int64_t i = 2; i <= limit; ++i) {
        if (comp[static_cast<std::size_t>(i)]) continue;
        ++count;
        if (i <= limit / i)
            for (std::int64_t j = i * i; j <= limit; j += i) comp[static_cast<std::size_t>(j)] = 1;
    }
    return count;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
    double flo = f(lo);
    for (int it = 0; it < 500 && hi - lo > tol * std::max(1.0, std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// zeta(1+eps) by Euler-Maclaurin with a 1e5-term head
inline double zeta_one_plus(double eps) {
    const double s = 1.0 + eps;
    const std::int64_t K = 100000;
    double sum = 0.0;
    for (std::int64_t k = K; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    const double Kd = static_cast<double>(K);
    sum += std::pow(Kd, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(Kd, -s) +
           s / 12.0 * std::pow(Kd, -s - 1.0);
    return sum;
}

} // namespace oracles
