#include "spectral/rvfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace spectral {

namespace {

constexpr int kMaxDerivOrder = 8;

// Truncated Taylor series around a point: c[i] = f^(i)(x) / i!.
struct Jet {
    std::array<double, kMaxDerivOrder + 1> c{};
    int len = 1; // number of coefficients carried

    static Jet variable(double x, int len) {
        Jet j;
        j.len = len;
        j.c[0] = x;
        if (len > 1) j.c[1] = 1.0;
        return j;
    }
};

Jet jet_scale(const Jet& u, double s) {
    Jet w = u;
    for (int i = 0; i < w.len; ++i) w.c[i] *= s;
    return w;
}

Jet jet_mul(const Jet& u, const Jet& v) {
    Jet w;
    w.len = u.len;
    for (int k = 0; k < w.len; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += u.c[j] * v.c[k - j];
        w.c[k] = acc;
    }
    return w;
}

// w = ln(u), u.c[0] > 0. Recurrence: w_k = (u_k - (1/k) sum_{j<k} j w_j u_{k-j}) / u_0.
Jet jet_log(const Jet& u) {
    Jet w;
    w.len = u.len;
    w.c[0] = std::log(u.c[0]);
    for (int k = 1; k < w.len; ++k) {
        double acc = u.c[k];
        for (int j = 1; j < k; ++j) acc -= (static_cast<double>(j) / k) * w.c[j] * u.c[k - j];
        w.c[k] = acc / u.c[0];
    }
    return w;
}

// w = u^alpha, u.c[0] > 0. Recurrence: w_k = (1/(k u_0)) sum_{j<k} (alpha(k-j) - j) u_{k-j} w_j.
Jet jet_pow(const Jet& u, double alpha) {
    Jet w;
    w.len = u.len;
    w.c[0] = std::pow(u.c[0], alpha);
    for (int k = 1; k < w.len; ++k) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j)
            acc += (alpha * (k - j) - j) * u.c[k - j] * w.c[j];
        w.c[k] = acc / (k * u.c[0]);
    }
    return w;
}

Jet jet_shift(const Jet& u, double s) {
    Jet w = u;
    w.c[0] += s;
    return w;
}

// Log-factor jet of the law at x, including domain checks shared with rv_eval.
Jet log_factor_jet(const RVSpec& spec, double x, int len) {
    Jet L = Jet::variable(x, len);
    for (int depth = 1; depth <= spec.log_depth; ++depth) {
        if (spec.mode == LogMode::Shifted) {
            L = jet_log(jet_shift(L, 1.0));
        } else {
            if (L.c[0] <= 0.0)
                throw DomainError("raw log tower nonpositive at depth " + std::to_string(depth) +
                                  " for x = " + std::to_string(x));
            L = jet_log(L);
        }
    }
    return L;
}

} // namespace

void RVSpec::validate() const {
    if (!(amplitude > 0.0)) throw DomainError("RVSpec: amplitude C must be > 0");
    if (log_depth < 0) throw DomainError("RVSpec: log depth k must be >= 0");
    if (power < 0.0) throw DomainError("RVSpec: index p must be >= 0");
    if (power == 0.0 && log_exponent <= 0.0)
        throw DomainError("RVSpec: p = 0 requires r > 0");
}

double RVSpec::domain_threshold() const {
    if (mode == LogMode::Shifted || log_depth == 0 || log_exponent == 0.0) return 0.0;
    // ln applied k times is positive above a tower of k-1 e's.
    double tau = 1.0;
    for (int j = 1; j < log_depth; ++j) tau = std::exp(tau);
    return tau;
}

double ln_iter(int k, double x, LogMode mode) {
    if (k < 0) throw DomainError("ln_iter: depth must be >= 0");
    if (mode == LogMode::Shifted) {
        if (x < 0.0) throw DomainError("ln_iter: shifted mode needs x >= 0");
        double v = x;
        for (int j = 0; j < k; ++j) v = std::log1p(v);
        return v;
    }
    double v = x;
    for (int j = 1; j <= k; ++j) {
        if (v <= 0.0)
            throw DomainError("ln_iter: raw log undefined at depth " + std::to_string(j) +
                              " (value " + std::to_string(v) + ")");
        v = std::log(v);
    }
    return v;
}

double rv_eval(const RVSpec& spec, double x) {
    spec.validate();
    if (!(x > 0.0)) throw DomainError("rv_eval: x must be > 0");
    double v = spec.amplitude;
    if (spec.power != 0.0) v *= std::pow(x, spec.power);
    if (spec.log_exponent != 0.0) {
        const double l = ln_iter(spec.log_depth, x, spec.mode);
        if (l <= 0.0)
            throw DomainError("rv_eval: log factor nonpositive at x = " + std::to_string(x));
        v *= std::pow(l, spec.log_exponent);
    }
    if (!std::isfinite(v)) throw OverflowError("rv_eval: non-finite result");
    return v;
}

double rv_eval_at_inverse(const RVSpec& spec, double t) {
    if (!(t > 0.0)) throw DomainError("rv_eval_at_inverse: t must be > 0");
    return rv_eval(spec, 1.0 / t);
}

double gamma(double x) {
    if (!(x > 0.0)) throw DomainError("gamma: argument must be > 0");
    // Lanczos, g = 7, 9 coefficients.
    static const double kCoef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection; no poles reachable for x in (0, 0.5)
        return M_PI / (std::sin(M_PI * x) * gamma(1.0 - x));
    }
    const double z = x - 1.0;
    double a = kCoef[0];
    for (int i = 1; i < 9; ++i) a += kCoef[i] / (z + i);
    const double t = z + 7.5;
    const double v = std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
    if (!std::isfinite(v)) throw OverflowError("gamma: overflow");
    return v;
}

double lambert_w0(double y) {
    if (y < 0.0) throw DomainError("lambert_w0: defined on [0, inf)");
    if (y == 0.0) return 0.0;
    // W0(y) <= ln(1+y) on [0, inf), so this brackets the root of x e^x - y.
    double lo = 0.0;
    double hi = std::max(1.0, std::log1p(y));
    for (int it = 0; it < 200 && (hi - lo) > 1e-8 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::exp(mid) < y ? lo : hi) = mid;
    }
    double w = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const double ew = std::exp(w);
        w -= (w * ew - y) / (ew * (1.0 + w));
    }
    return w;
}

namespace {

// gamma_lower(s, z) by power series, best for z < s + 1
double lower_gamma_series(double s, double z) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= z / (s + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(s * std::log(z) - z);
}

// E1(z) = Gamma(0, z) by the alternating series, for z < ~1.5
double expint_e1_series(double z) {
    static const double kEulerGamma = 0.5772156649015328606;
    double sum = -kEulerGamma - std::log(z);
    double term = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= -z / k;
        sum -= term / k;
        if (std::fabs(term) < 1e-18 * std::max(1.0, std::fabs(sum))) break;
    }
    return sum;
}

// Lentz continued fraction, valid for z >= max(1, s+1)
double upper_gamma_cf(double s, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 2000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(s * std::log(z) - z) * h;
}

} // namespace

double upper_incomplete_gamma(double s, double z) {
    if (z < 0.0) throw DomainError("upper_incomplete_gamma: z must be >= 0");
    if (z == 0.0) {
        if (s <= 0.0) throw DomainError("upper_incomplete_gamma: diverges at z = 0 for s <= 0");
        return gamma(s);
    }
    if (z >= std::max(1.0, s + 1.0)) return upper_gamma_cf(s, z);
    if (s > 1e-8) return gamma(s) - lower_gamma_series(s, z);
    // s <= 0, z < 1: anchor at the fractional level in [0, 1), then walk the
    // recurrence Gamma(s, z) = (Gamma(s+1, z) - z^s e^{-z}) / s downward
    const double s_frac = s - std::floor(s);
    const bool integer_like = s_frac < 1e-8 || s_frac > 1.0 - 1e-8;
    double cur, g;
    if (integer_like) {
        cur = 0.0;
        g = expint_e1_series(z);
    } else {
        cur = s_frac;
        g = gamma(s_frac) - lower_gamma_series(s_frac, z);
    }
    const int steps = static_cast<int>(std::lround(cur - s));
    for (int j = 1; j <= steps; ++j) {
        const double sj = cur - j;
        g = (g - std::exp(sj * std::log(z) - z)) / sj;
    }
    return g;
}

std::vector<double> rv_derivatives(const RVSpec& spec, double x, int n) {
    spec.validate();
    if (n < 0 || n > kMaxDerivOrder)
        throw UsageError("rv_derivatives: order must be in 0.." + std::to_string(kMaxDerivOrder));
    if (!(x > 0.0)) throw DomainError("rv_derivatives: x must be > 0");
    const int len = n + 1;
    Jet f = Jet::variable(x, len);
    if (spec.power != 0.0) {
        f = jet_pow(f, spec.power);
    } else {
        f = Jet::variable(1.0, len);
        f.c[1] = 0.0;
    }
    if (spec.log_exponent != 0.0) {
        Jet L = log_factor_jet(spec, x, len);
        if (L.c[0] <= 0.0)
            throw DomainError("rv_derivatives: log factor nonpositive at x = " + std::to_string(x));
        f = jet_mul(f, jet_pow(L, spec.log_exponent));
    }
    f = jet_scale(f, spec.amplitude);
    std::vector<double> out(len);
    double fact = 1.0;
    for (int i = 0; i < len; ++i) {
        out[i] = f.c[i] * fact;
        fact *= (i + 1);
    }
    return out;
}

double smooth_var_ratio(const RVSpec& spec, int n, double x) {
    spec.validate();
    if (n < 1) throw UsageError("smooth_var_ratio: order must be >= 1");
    if (n > kMaxDerivOrder)
        throw UsageError("smooth_var_ratio: unsupported order " + std::to_string(n) +
                         " (max " + std::to_string(kMaxDerivOrder) + ")");
    if (spec.log_exponent == 0.0) {
        // pure power, the limit is attained identically
        double v = 1.0;
        for (int j = 0; j < n; ++j) v *= spec.power - j;
        return v;
    }
    const std::vector<double> d = rv_derivatives(spec, x, n);
    return std::pow(x, n) * d[static_cast<std::size_t>(n)] / d[0];
}

PotterReport potter_check(const RVSpec& spec, double a, double eps,
                          const std::vector<std::pair<double, double>>& grid,
                          double threshold) {
    spec.validate();
    if (grid.empty()) throw UsageError("potter_check: empty grid");
    if (!(a > 1.0)) throw UsageError("potter_check: a must be > 1");
    if (!(eps > 0.0)) throw UsageError("potter_check: eps must be > 0");
    const double floor_x = std::max(threshold, spec.domain_threshold());
    PotterReport report;
    report.threshold_used = floor_x;
    report.worst_margin = 0.0;
    for (const auto& [x, y] : grid) {
        if (x < floor_x || y < floor_x)
            throw UsageError("potter_check: grid point below threshold");
        const double ratio = rv_eval(spec, y) / rv_eval(spec, x);
        const double q = y / x;
        const double bound =
            a * std::max(std::pow(q, spec.power + eps), std::pow(q, spec.power - eps));
        const double margin = ratio / bound;
        if (margin > report.worst_margin) {
            report.worst_margin = margin;
            report.worst_pair = {x, y};
        }
    }
    report.holds = report.worst_margin <= 1.0;
    return report;
}

LnBoundConstant ln_bound_constant(double eps) {
    if (!(eps > 0.0) || eps > 1.0) throw DomainError("ln_bound_constant: eps must be in (0, 1]");
    if (eps == 1.0) return {1.0, 0.0};
    const double target = 1.0 / eps;
    const auto h = [](double x) { return (1.0 + x) * std::log1p(x) / x; };
    double lo = 1e-300, hi = 1.0;
    while (h(hi) < target) hi *= 2.0;
    for (int it = 0; it < 400 && (hi - lo) > 1e-10 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < target ? lo : hi) = mid;
    }
    const double x_eps = 0.5 * (lo + hi);
    const double c_eps = std::log1p(x_eps) / std::pow(x_eps, eps);
    return {c_eps, x_eps};
}

} // namespace spectral
