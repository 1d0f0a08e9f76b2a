#include "spectral/tauberian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace spectral {

namespace {

// Solve the 3x3 (or smaller) normal equations by Gaussian elimination with
// partial pivoting. Throws FitError on a singular system.
template <int N>
std::array<double, N> solve_normal(std::array<std::array<double, N>, N> a,
                                   std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-300)
            throw FitError("fit: singular design matrix (degenerate grid)");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int cc = col; cc < N; ++cc) a[r][cc] -= f * a[col][cc];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double acc = b[r];
        for (int cc = r + 1; cc < N; ++cc) acc -= a[r][cc] * x[cc];
        x[r] = acc / a[r][r];
    }
    return x;
}

void check_inverse_target(const Spectrum& s) {
    if (!s.unbounded_above())
        throw DomainError("karamata: counting comparison needs an unbounded increasing spectrum");
}

} // namespace

AsymptoticFit fit_prc(const std::vector<std::pair<double, double>>& samples,
                      bool declare_p_zero) {
    if (samples.size() < 8) throw UsageError("fit_prc: need at least 8 samples");
    double t_min = samples.front().first, t_max = samples.front().first;
    for (const auto& [t, theta] : samples) {
        if (!(theta > 0.0)) throw DomainError("fit_prc: theta samples must be > 0");
        if (!(t > 0.0) || t >= 0.5) throw DomainError("fit_prc: t samples must lie in (0, 0.5)");
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }
    if (t_max / t_min < 99.0)
        throw UsageError("fit_prc: t samples must span at least two decades");

    AsymptoticFit fit;
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.n_points = static_cast<int>(samples.size());

    // regressors: 1, -ln t, ln ln(1/t)
    if (!declare_p_zero) {
        std::array<std::array<double, 3>, 3> ata{};
        std::array<double, 3> atb{};
        for (const auto& [t, theta] : samples) {
            const std::array<double, 3> row{1.0, -std::log(t), std::log(std::log(1.0 / t))};
            const double y = std::log(theta);
            for (int i = 0; i < 3; ++i) {
                atb[i] += row[i] * y;
                for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
            }
        }
        const auto x = solve_normal<3>(ata, atb);
        fit.p_hat = x[1];
        fit.r_hat = x[2];
        fit.c_hat = std::exp(x[0]) / gamma(1.0 + std::max(fit.p_hat, -0.5));
        double ss = 0.0;
        for (const auto& [t, theta] : samples) {
            const double pred =
                x[0] + x[1] * -std::log(t) + x[2] * std::log(std::log(1.0 / t));
            const double resid = std::log(theta) - pred;
            ss += resid * resid;
        }
        fit.residual = std::sqrt(ss / samples.size());
    } else {
        std::array<std::array<double, 2>, 2> ata{};
        std::array<double, 2> atb{};
        for (const auto& [t, theta] : samples) {
            const std::array<double, 2> row{1.0, std::log(std::log(1.0 / t))};
            const double y = std::log(theta);
            for (int i = 0; i < 2; ++i) {
                atb[i] += row[i] * y;
                for (int j = 0; j < 2; ++j) ata[i][j] += row[i] * row[j];
            }
        }
        const auto x = solve_normal<2>(ata, atb);
        fit.p_hat = 0.0;
        fit.r_hat = x[1];
        fit.c_hat = std::exp(x[0]); // Gamma(1) = 1
        double ss = 0.0;
        for (const auto& [t, theta] : samples) {
            const double resid =
                std::log(theta) - (x[0] + x[1] * std::log(std::log(1.0 / t)));
            ss += resid * resid;
        }
        fit.residual = std::sqrt(ss / samples.size());
    }
    return fit;
}

std::vector<std::pair<double, double>> karamata_forward(
    const Spectrum& s, const std::function<double(double)>& law,
    const std::vector<double>& t_grid, const TraceOptions& opts) {
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (const double t : t_grid) {
        const double theta = trace_norm_power(s, t, 0, opts).norm_value;
        const double f = law(1.0 / t);
        if (!(f > 0.0)) throw DomainError("karamata_forward: law must be positive");
        out.emplace_back(t, theta / f);
    }
    return out;
}

std::vector<std::pair<double, double>> karamata_forward(const Spectrum& s, const RVSpec& spec,
                                                        const std::vector<double>& t_grid,
                                                        const TraceOptions& opts) {
    spec.validate();
    return karamata_forward(
        s, [&spec](double x) { return rv_eval(spec, x); }, t_grid, opts);
}

std::vector<std::pair<double, double>> karamata_inverse(
    const Spectrum& s, const std::function<double(double)>& law,
    const std::vector<double>& lam_grid) {
    check_inverse_target(s);
    std::vector<std::pair<double, double>> out;
    out.reserve(lam_grid.size());
    for (const double lam : lam_grid) {
        if (lam < s.min_real_part())
            throw DomainError("karamata_inverse: lam below the spectrum");
        if (s.model() == SpectrumModel::Primes && lam > static_cast<double>(s.prime_limit()))
            throw DomainError("karamata_inverse: lam beyond the prime sieve limit");
        const double f = law(lam);
        if (!(f > 0.0)) throw DomainError("karamata_inverse: law must be positive");
        out.emplace_back(lam, static_cast<double>(s.counting(lam)) / f);
    }
    return out;
}

std::vector<std::pair<double, double>> karamata_inverse(const Spectrum& s, const RVSpec& spec,
                                                        const std::vector<double>& lam_grid) {
    spec.validate();
    const double floor_lam = spec.domain_threshold();
    for (const double lam : lam_grid)
        if (lam < floor_lam) throw DomainError("karamata_inverse: lam below the law domain");
    return karamata_inverse(
        s, [&spec](double x) { return rv_eval(spec, x); }, lam_grid);
}

LiminfReport liminf_check(const Spectrum& s, const RVSpec& spec, double c,
                          const std::vector<double>& t_grid,
                          const std::vector<double>& lam_grid, double slack,
                          const TraceOptions& opts) {
    if (!(c > 0.0)) throw UsageError("liminf_check: c must be > 0");
    LiminfReport rep;
    rep.slack = slack;
    rep.min_counting_ratio = std::numeric_limits<double>::infinity();
    for (const auto& [lam, ratio] : karamata_inverse(s, spec, lam_grid))
        rep.min_counting_ratio = std::min(rep.min_counting_ratio, ratio);
    rep.min_trace_ratio = std::numeric_limits<double>::infinity();
    for (const auto& [t, ratio] : karamata_forward(s, spec, t_grid, opts))
        rep.min_trace_ratio = std::min(rep.min_trace_ratio, ratio);
    rep.threshold = c * gamma(1.0 + spec.power) * (1.0 - slack);
    rep.hypothesis_met = rep.min_counting_ratio >= c;
    rep.passes = rep.hypothesis_met && rep.min_trace_ratio >= rep.threshold;
    return rep;
}

std::vector<std::pair<double, double>> lambert_weyl_check(const Spectrum& s, double p, double r,
                                                          const std::vector<double>& lam_grid) {
    check_inverse_target(s);
    std::vector<std::pair<double, double>> out;
    out.reserve(lam_grid.size());
    for (const double lam : lam_grid) {
        if (!(lam > 0.0)) throw DomainError("lambert_weyl_check: lam must be > 0");
        const double w = lambert_w0(lam);
        const double arg = std::exp(w);
        if (s.model() == SpectrumModel::Primes && arg > static_cast<double>(s.prime_limit()))
            throw DomainError("lambert_weyl_check: e^{W0(lam)} beyond the prime sieve limit");
        const double denom = std::pow(lam, r) * std::exp((p - r) * w);
        out.emplace_back(lam, static_cast<double>(s.counting(arg)) / denom);
    }
    return out;
}

} // namespace spectral
