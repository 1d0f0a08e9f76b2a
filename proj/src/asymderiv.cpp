#include "spectral/asymderiv.hpp"

#include <array>
#include <cmath>
#include <string>

namespace spectral {

namespace {

double binomial(int n, int k) {
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v *= static_cast<double>(n - k + j) / j;
    return v;
}

double falling(double p, int m) {
    double v = 1.0;
    for (int j = 0; j < m; ++j) v *= p - j;
    return v;
}

double rising(double p, int n) {
    double v = 1.0;
    for (int j = 0; j < n; ++j) v *= p + j;
    return v;
}

// default step: balances stencil truncation against summation rounding
double default_step(double t, int n) {
    switch (n) {
        case 1: return t * 1e-4;
        case 2: return t * 3e-4;
        case 3: return t * 1.5e-3;
        default: return t * 4e-3;
    }
}

} // namespace

double g_derivative(const RVSpec& spec, double t, int n) {
    spec.validate();
    if (!(t > 0.0)) throw DomainError("g_derivative: t must be > 0");
    if (n < 0 || n > 8) throw UsageError("g_derivative: unsupported order " + std::to_string(n));
    if (n == 0) return rv_eval_at_inverse(spec, t);
    const std::vector<double> f = rv_derivatives(spec, 1.0 / t, n);
    double nfact = 1.0;
    for (int j = 2; j <= n; ++j) nfact *= j;
    double sum = 0.0;
    double mfact = 1.0;
    for (int m = 1; m <= n; ++m) {
        mfact *= m;
        sum += nfact / mfact * binomial(n - 1, m - 1) * std::pow(t, -double(n + m)) *
               f[static_cast<std::size_t>(m)];
    }
    return (n % 2 == 0 ? 1.0 : -1.0) * sum;
}

std::vector<std::pair<double, double>> ratio_limit_series(const RVSpec& spec, int n,
                                                          const std::vector<double>& t_grid) {
    spec.validate();
    if (!(spec.power > 0.0))
        throw DomainError("ratio_limit_series: the law must have index p > 0");
    if (n < 0 || n > 8)
        throw UsageError("ratio_limit_series: unsupported order " + std::to_string(n));
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (const double t : t_grid) {
        if (n == 0) {
            out.emplace_back(t, 1.0);
            continue;
        }
        const double g0 = rv_eval_at_inverse(spec, t);
        const double gn = g_derivative(spec, t, n);
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        out.emplace_back(t, sign * std::pow(t, n) * gn / g0);
    }
    return out;
}

std::pair<double, double> pochhammer_identity(int n, double p) {
    if (n < 1 || n > 20) throw UsageError("pochhammer_identity: n must be in 1..20");
    double nfact = 1.0;
    for (int j = 2; j <= n; ++j) nfact *= j;
    double lhs = 0.0;
    double mfact = 1.0;
    for (int m = 1; m <= n; ++m) {
        mfact *= m;
        lhs += nfact / mfact * binomial(n - 1, m - 1) * falling(p, m);
    }
    return {lhs, rising(p, n)};
}

PochhammerExact pochhammer_identity_exact(int n, long long num, long long den) {
    if (n < 1 || n > 10) throw UsageError("pochhammer_identity_exact: n must be in 1..10");
    if (den < 1 || den > 16) throw UsageError("pochhammer_identity_exact: den must be in 1..16");
    // everything scaled by den^n stays integral
    const auto b128 = [](long long v) { return static_cast<__int128>(v); };
    PochhammerExact out;
    // n!/m! * C(n-1, m-1) as exact integers
    for (int m = 1; m <= n; ++m) {
        __int128 coef = 1;
        for (int j = m + 1; j <= n; ++j) coef *= j; // n!/m!
        __int128 binom = 1;
        for (int j = 1; j <= m - 1; ++j) binom = binom * (n - m + j) / j;
        __int128 fall = 1; // den^m * p(p-1)...(p-m+1)
        for (int j = 0; j < m; ++j) fall *= b128(num) - b128(j) * b128(den);
        __int128 scale = 1; // den^{n-m}
        for (int j = 0; j < n - m; ++j) scale *= b128(den);
        out.lhs_scaled += coef * binom * fall * scale;
    }
    out.rhs_scaled = 1;
    for (int j = 0; j < n; ++j) out.rhs_scaled *= b128(num) + b128(j) * b128(den);
    return out;
}

DerivativeCheck fd_derivative_check(const Spectrum& s, double t, int n, double h,
                                    const TraceOptions& opts) {
    if (!s.is_real() || s.min_real_part() < 0.0)
        throw DomainError("fd_derivative_check: needs a real nonnegative spectrum");
    if (n < 1 || n > 4) throw UsageError("fd_derivative_check: order must be in 1..4");
    if (!(t > 0.0)) throw DomainError("fd_derivative_check: t must be > 0");
    if (h <= 0.0) h = default_step(t, n);
    if (h >= t / 10.0) throw UsageError("fd_derivative_check: step too large (h >= t/10)");

    TraceOptions tight = opts;
    tight.eta_rel = std::min(opts.eta_rel, 1e-14);
    const auto F = [&](double tt) { return trace_power(s, tt, 0, tight).value.real(); };

    DerivativeCheck chk;
    chk.n = n;
    chk.t = t;
    switch (n) {
        case 1: chk.numeric = (F(t + h) - F(t - h)) / (2.0 * h); break;
        case 2: chk.numeric = (F(t + h) - 2.0 * F(t) + F(t - h)) / (h * h); break;
        case 3:
            chk.numeric = (F(t + 2 * h) - 2.0 * F(t + h) + 2.0 * F(t - h) - F(t - 2 * h)) /
                          (2.0 * h * h * h);
            break;
        default:
            chk.numeric = (F(t + 2 * h) - 4.0 * F(t + h) + 6.0 * F(t) - 4.0 * F(t - h) +
                           F(t - 2 * h)) /
                          (h * h * h * h);
            break;
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    chk.analytic = sign * trace_power(s, t, n, tight).value.real();
    chk.rel_err =
        std::fabs(chk.analytic - chk.numeric) / std::max(std::fabs(chk.analytic), 1e-300);
    return chk;
}

CauchyBoundReport cauchy_bound_check(const Spectrum& s, const std::vector<double>& t_grid, int n,
                                     double theta, const TraceOptions& opts) {
    if (!s.is_real() || s.min_real_part() < 0.0)
        throw DomainError("cauchy_bound_check: needs a real nonnegative spectrum");
    if (!(theta > 0.0) || !(theta < M_PI / 2))
        throw UsageError("cauchy_bound_check: theta must lie in (0, pi/2)");
    if (n < 0 || n > 8) throw UsageError("cauchy_bound_check: order must be in 0..8");
    const double st = std::sin(theta);
    double c_n = 1.0;
    for (int j = 2; j <= n; ++j) c_n *= j;
    c_n *= std::pow(st, -double(n));
    const double a = 1.0 - st;

    CauchyBoundReport rep;
    rep.all_hold = true;
    for (const double t : t_grid) {
        CauchyBoundReport::Point pt;
        pt.t = t;
        pt.lhs = trace_norm_power(s, t, n, opts).norm_value;
        pt.rhs = c_n * std::pow(t, -double(n)) * trace_power(s, a * t, 0, opts).value.real();
        pt.holds = pt.lhs <= pt.rhs * (1.0 + 1e-12);
        rep.worst_margin = std::max(rep.worst_margin, pt.lhs / pt.rhs);
        rep.all_hold = rep.all_hold && pt.holds;
        rep.points.push_back(pt);
    }
    return rep;
}

std::vector<std::pair<double, double>> derivative_asymptotics_check(
    const Spectrum& s, const RVSpec& spec, int n, const std::vector<double>& t_grid,
    const TraceOptions& opts) {
    spec.validate();
    if (n < 0 || n > 8)
        throw UsageError("derivative_asymptotics_check: unsupported order " + std::to_string(n));
    const double ratio_const =
        spec.power > 0.0 ? gamma(spec.power + n) / gamma(spec.power) : (n == 0 ? 1.0 : 0.0);
    if (!(ratio_const > 0.0))
        throw DomainError("derivative_asymptotics_check: law index must be positive for n >= 1");
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (const double t : t_grid) {
        const double theta_n = trace_norm_power(s, t, n, opts).norm_value;
        const double denom = ratio_const * std::pow(t, -double(n)) * rv_eval_at_inverse(spec, t);
        out.emplace_back(t, theta_n / denom);
    }
    return out;
}

} // namespace spectral
