#include "spectral/ideals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spectral {

namespace {

constexpr std::int64_t kExpansionCap = 10'000'000;

struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

const char* to_string(IdealVerdict v) {
    switch (v) {
        case IdealVerdict::BoundedSoFar: return "bounded_so_far";
        case IdealVerdict::Diverging: return "diverging";
        case IdealVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<SingularRun> singular_value_runs(const Spectrum& s, std::int64_t depth,
                                             bool inverse) {
    if (depth < 1) throw UsageError("singular_values: depth must be >= 1");
    if (inverse && s.has_zero_eigenvalue())
        throw DomainError("singular_values: zero eigenvalue has no inverse");
    std::vector<SingularRun> runs;
    const std::int64_t count = s.entry_count();
    // Finite models are gathered whole (their largest values may come last in
    // enumeration order); unbounded models contribute their first `depth`
    // distinct eigenvalues before sorting.
    for (std::int64_t i = 0; count == Spectrum::kUnbounded ? i < depth : i < count; ++i) {
        const EigenEntry e = s.entry(i);
        const double a = std::hypot(e.re, e.im);
        runs.push_back({inverse ? 1.0 / a : a, e.mult});
    }
    std::stable_sort(runs.begin(), runs.end(),
                     [](const SingularRun& x, const SingularRun& y) { return x.value > y.value; });
    // trim to exactly depth values (or everything, if fewer exist)
    std::int64_t keep = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (keep + runs[i].count >= depth) {
            runs[i].count = depth - keep;
            runs.resize(i + 1);
            break;
        }
        keep += runs[i].count;
    }
    while (!runs.empty() && runs.back().count == 0) runs.pop_back();
    return runs;
}

std::vector<double> singular_values(const Spectrum& s, std::int64_t n, bool inverse) {
    if (n > kExpansionCap)
        throw BudgetError("singular_values: expansion beyond 1e7 entries", 0.0);
    const auto runs = singular_value_runs(s, n, inverse);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::min(n, kExpansionCap)));
    for (const auto& r : runs)
        for (std::int64_t j = 0; j < r.count; ++j) out.push_back(r.value);
    return out;
}

IdealReport ideal_report(const std::vector<SingularRun>& runs, double p) {
    if (!(p > 0.0)) throw UsageError("ideal_report: p must be > 0");
    if (runs.empty()) throw UsageError("ideal_report: empty input");
    std::int64_t depth = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!(runs[i].value >= 0.0) || runs[i].count < 1)
            throw UsageError("ideal_report: malformed run");
        if (i > 0 && runs[i].value > runs[i - 1].value + 1e-15 * runs[i - 1].value)
            throw UsageError("ideal_report: values must be nonincreasing");
        depth += runs[i].count;
    }

    // checkpoint depths: powers of two, run ends (when few), final depth
    std::vector<std::int64_t> marks;
    for (std::int64_t m = 1; m <= depth; m *= 2) marks.push_back(m);
    if (runs.size() <= 64) {
        std::int64_t end = 0;
        for (const auto& r : runs) {
            end += r.count;
            marks.push_back(end);
        }
    }
    marks.push_back(depth);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    IdealReport rep;
    rep.p = p;
    rep.depth = depth;

    Kahan S;
    double W = 0.0, M = 0.0;
    std::int64_t j = 0;
    std::size_t mark_idx = 0;
    for (const auto& r : runs) {
        const double vp = std::pow(r.value, p);
        const std::int64_t end = j + r.count;
        while (j < end) {
            std::int64_t next = end;
            if (mark_idx < marks.size() && marks[mark_idx] <= end) next = marks[mark_idx];
            const double s_before = S.s;
            S.add(static_cast<double>(next - j) * vp);
            // within a constant run the weak term k^{1/p} s_k peaks at the
            // segment end; S_m / ln(1+m) peaks at one of the two endpoints
            W = std::max(W, std::pow(static_cast<double>(next), 1.0 / p) * r.value);
            const double phi_start =
                (s_before + vp) / std::log1p(static_cast<double>(j + 1));
            const double phi_end = S.s / std::log1p(static_cast<double>(next));
            M = std::max(M, std::max(phi_start, phi_end));
            if (mark_idx < marks.size() && marks[mark_idx] == next) {
                rep.checkpoints.push_back({next, S.s, W, M});
                ++mark_idx;
            }
            j = next;
        }
    }
    rep.schatten_partial = S.s;
    rep.weak_quasinorm = W;
    rep.macaev_norm = M;

    // verdicts from the power-of-two checkpoints
    std::vector<IdealCheckpoint> po2;
    for (const auto& cp : rep.checkpoints)
        if (is_pow2(cp.n)) po2.push_back(cp);
    const IdealCheckpoint final_cp{depth, S.s, W, M};

    const auto at_or_below = [&](std::int64_t n) {
        const IdealCheckpoint* best = &po2.front();
        for (const auto& cp : po2)
            if (cp.n <= n) best = &cp;
        return *best;
    };

    if (po2.size() >= 4) {
        const double d_last = po2[po2.size() - 1].schatten_partial -
                              po2[po2.size() - 2].schatten_partial;
        const double d_prev = po2[po2.size() - 2].schatten_partial -
                              po2[po2.size() - 3].schatten_partial;
        rep.schatten_increment_ratio = d_prev > 0.0 ? d_last / d_prev : 0.0;
        if (d_last <= 1e-12 * std::max(rep.schatten_partial, 1e-300) ||
            rep.schatten_increment_ratio <= 0.75)
            rep.schatten_verdict = IdealVerdict::BoundedSoFar;
        else if (rep.schatten_increment_ratio >= 0.9)
            rep.schatten_verdict = IdealVerdict::Diverging;

        const IdealCheckpoint quarter = at_or_below(depth / 4);
        rep.weak_growth_ratio =
            quarter.weak_quasinorm > 0.0 ? final_cp.weak_quasinorm / quarter.weak_quasinorm : 0.0;
        if (rep.weak_growth_ratio >= 1.10)
            rep.weak_verdict = IdealVerdict::Diverging;
        else if (rep.weak_growth_ratio > 0.0 && rep.weak_growth_ratio <= 1.01)
            rep.weak_verdict = IdealVerdict::BoundedSoFar;

        const auto half_log =
            at_or_below(static_cast<std::int64_t>(std::sqrt(static_cast<double>(depth))));
        rep.macaev_growth_ratio =
            half_log.macaev_norm > 0.0 ? final_cp.macaev_norm / half_log.macaev_norm : 0.0;
        if (rep.schatten_verdict == IdealVerdict::BoundedSoFar ||
            rep.weak_verdict == IdealVerdict::BoundedSoFar ||
            (rep.macaev_growth_ratio > 0.0 && rep.macaev_growth_ratio <= 1.25))
            rep.macaev_verdict = IdealVerdict::BoundedSoFar;
        else if (rep.macaev_growth_ratio >= 1.5)
            rep.macaev_verdict = IdealVerdict::Diverging;
    }
    return rep;
}

IdealReport ideal_report(const std::vector<double>& s_values, double p) {
    std::vector<SingularRun> runs;
    runs.reserve(s_values.size());
    for (const double v : s_values) {
        if (!runs.empty() && runs.back().value == v)
            ++runs.back().count;
        else
            runs.push_back({v, 1});
    }
    return ideal_report(runs, p);
}

std::vector<ZetaScanPoint> zeta_eps_scan(const Spectrum& s, double p,
                                         const std::vector<double>& eps_grid,
                                         const TraceOptions& opts) {
    if (!s.is_real() || !(s.min_real_part() > 0.0) || s.has_zero_eigenvalue())
        throw DomainError("zeta_eps_scan: needs an invertible positive real spectrum");
    if (!(p > 0.0)) throw UsageError("zeta_eps_scan: p must be > 0");
    const double index = s.inverse_power_index();
    std::vector<ZetaScanPoint> out;
    out.reserve(eps_grid.size());
    for (const double eps : eps_grid) {
        if (!(eps > 0.0)) throw UsageError("zeta_eps_scan: eps must be > 0");
        const double se = p + eps;
        if (se <= index + 1e-12)
            throw DivergenceError("zeta_eps_scan: series diverges at eps = " +
                                  std::to_string(eps));
        ZetaScanPoint pt;
        pt.eps = eps;
        Kahan sum;
        const std::int64_t count = s.entry_count();
        const double eta = std::max(opts.eta_rel, 1e-11);
        double tail_est = 0.0, tail_bound = std::numeric_limits<double>::infinity();
        bool certified = false;
        std::int64_t i = 0;
        for (;; ++i) {
            const bool exhausted = (count != Spectrum::kUnbounded && i >= count);
            if (exhausted) {
                tail_bound = 0.0;
                certified = true;
                if (s.model() == SpectrumModel::Primes) {
                    // integer lattice past the sieve limit dominates the rest
                    const double x0 = static_cast<double>(s.prime_limit() + 1);
                    tail_bound = std::pow(x0, -se) + std::pow(x0, 1.0 - se) / (se - 1.0);
                    certified = tail_bound <= eta * sum.s;
                }
                break;
            }
            const EigenEntry e = s.entry(i);
            sum.add(static_cast<double>(e.mult) * std::exp(-se * s.entry_log_re(i)));
            if ((i + 1) % 65536 == 0 || i + 1 == opts.max_terms) {
                const double K = static_cast<double>(i + 1);
                switch (s.model()) {
                    case SpectrumModel::PowerLaw: {
                        const double C = s.param_amplitude(), pm = s.param_p();
                        const double q = se / pm; // > 1 by the divergence guard
                        const double m = K + 0.5;
                        const double est = std::pow(C, q) * std::pow(m, 1.0 - q) / (q - 1.0);
                        const double err =
                            q * std::pow(C, q) * std::pow(m, -q - 1.0) / 24.0 + 1e-14 * est;
                        if (err <= eta * (sum.s + est)) {
                            tail_est = est;
                            tail_bound = err;
                            certified = true;
                        }
                        break;
                    }
                    case SpectrumModel::LogLaw: {
                        // sum_{k>K} e^{-se k^{1/r}} <= int_K^inf e^{-se x^{1/r}} dx
                        const double r = s.param_r();
                        const double u = se * std::pow(K, 1.0 / r);
                        if (u > r + 1.0) {
                            const double b =
                                r * std::pow(se, -r) * upper_incomplete_gamma(r, u);
                            if (b <= eta * sum.s) {
                                tail_bound = b;
                                certified = true;
                            }
                        }
                        break;
                    }
                    default: {
                        // unit-gap models: dominated by the integer lattice
                        const double x0 = s.entry(i).re + 1.0;
                        const double b =
                            std::pow(x0, -se) + std::pow(x0, 1.0 - se) / (se - 1.0);
                        if (b <= eta * sum.s) {
                            tail_bound = b;
                            certified = true;
                        }
                        break;
                    }
                }
                if (certified) {
                    ++i;
                    break;
                }
            }
            if (i + 1 >= opts.max_terms)
                throw BudgetError("zeta_eps_scan: budget exhausted at eps = " +
                                      std::to_string(eps),
                                  tail_bound);
        }
        pt.value = eps * (sum.s + tail_est);
        pt.tail_bound = eps * (std::isfinite(tail_bound) ? tail_bound : 0.0);
        pt.certified = certified;
        out.push_back(pt);
    }
    return out;
}

Z1LogCheck z1_log_check(const Spectrum& s, const std::vector<double>& t_grid,
                        const TraceOptions& opts) {
    if (!s.is_real() || !(s.min_real_part() > 0.0) || s.has_zero_eigenvalue())
        throw DomainError("z1_log_check: needs an invertible positive real spectrum");
    Z1LogCheck out;
    out.ratio.reserve(t_grid.size());
    for (const double t : t_grid) {
        if (!(t > 0.0) || t >= 1.0)
            throw DomainError("z1_log_check: t grid must lie in (0, 1)");
        const double f = trace_norm_power(s, t, -1, opts).norm_value;
        out.ratio.emplace_back(t, f / std::log(1.0 / t));
    }
    // d/dt ||A^{-1} e^{-tA}||_1 = -||e^{-tA}||_1, checked by central differences
    TraceOptions fd_opts = opts;
    fd_opts.eta_rel = std::min(opts.eta_rel, 1e-14);
    for (std::size_t i = 1; i + 1 < t_grid.size(); ++i) {
        const double t = t_grid[i];
        const double h = t * 1e-5;
        const double fp = trace_norm_power(s, t + h, -1, fd_opts).norm_value;
        const double fm = trace_norm_power(s, t - h, -1, fd_opts).norm_value;
        Z1LogCheck::DerivPoint pt;
        pt.t = t;
        pt.numeric = (fp - fm) / (2.0 * h);
        pt.analytic = -trace_norm_power(s, t, 0, fd_opts).norm_value;
        pt.rel_err = std::fabs(pt.numeric - pt.analytic) /
                     std::max(std::fabs(pt.analytic), 1e-300);
        out.derivative_checks.push_back(pt);
    }
    return out;
}

} // namespace spectral
