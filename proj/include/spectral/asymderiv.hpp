#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spectral/heattrace.hpp"
#include "spectral/rvfun.hpp"
#include "spectral/spectrum.hpp"

namespace spectral {

// n-th derivative of g(t) = f(1/t), assembled from the chain-rule expansion
//   g^(n)(t) = sum_{m=1}^n (n!/m!) C(n-1, m-1) (-1)^n t^{-(n+m)} f^(m)(1/t).
// n <= 8.
double g_derivative(const RVSpec& spec, double t, int n);

// (-1)^n t^n g^(n)(t) / g(t) over a decreasing grid; tends to
// Gamma(p+n)/Gamma(p) as t drops to 0. Requires p > 0.
std::vector<std::pair<double, double>> ratio_limit_series(const RVSpec& spec, int n,
                                                          const std::vector<double>& t_grid);

// lhs = sum_{m=1}^n (n!/m!) C(n-1, m-1) p(p-1)...(p-m+1), rhs = rising
// factorial p(p+1)...(p+n-1); returned for comparison. n <= 20.
std::pair<double, double> pochhammer_identity(int n, double p);

// Exact integer arithmetic variant for rational p = num/den; both sides are
// returned scaled by den^n. n <= 10, den <= 16.
struct PochhammerExact {
    __int128 lhs_scaled = 0;
    __int128 rhs_scaled = 0;
};
PochhammerExact pochhammer_identity_exact(int n, long long num, long long den);

struct DerivativeCheck {
    int n = 0;
    double t = 0.0;
    double analytic = 0.0; // (-1)^n * trace_power(s, t, n)
    double numeric = 0.0;  // central finite difference of trace_power(., ., 0)
    double rel_err = 0.0;
};

// Central finite-difference validation of (-1)^n F^(n)(t) = Tr X^n e^{-tX},
// stencils of order 1..4. h <= 0 picks a t-scaled default per order.
DerivativeCheck fd_derivative_check(const Spectrum& s, double t, int n, double h = 0.0,
                                    const TraceOptions& opts = {});

struct CauchyBoundReport {
    struct Point {
        double t = 0.0;
        double lhs = 0.0; // ||X^n e^{-tX}||_1
        double rhs = 0.0; // n! (sin theta)^{-n} t^{-n} F((1 - sin theta) t)
        bool holds = false;
    };
    std::vector<Point> points;
    bool all_hold = false;
    double worst_margin = 0.0; // max lhs/rhs over the grid
};

CauchyBoundReport cauchy_bound_check(const Spectrum& s, const std::vector<double>& t_grid, int n,
                                     double theta, const TraceOptions& opts = {});

// Ratio series Theta_n(t) / (Gamma(p+n)/Gamma(p) t^{-n} f(1/t)); the law's
// amplitude must carry the established constant of Theta_0 ~ f(1/t).
std::vector<std::pair<double, double>> derivative_asymptotics_check(
    const Spectrum& s, const RVSpec& spec, int n, const std::vector<double>& t_grid,
    const TraceOptions& opts = {});

} // namespace spectral
