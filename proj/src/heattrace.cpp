#include "spectral/heattrace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "spectral/quadrature.hpp"

namespace spectral {

namespace {

constexpr int kChunk = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

std::complex<double> complex_ipow(std::complex<double> z, int n) {
    if (n == 0) return {1.0, 0.0};
    const bool neg = n < 0;
    int m = neg ? -n : n;
    std::complex<double> acc{1.0, 0.0};
    while (m > 0) {
        if (m & 1) acc *= z;
        z *= z;
        m >>= 1;
    }
    return neg ? 1.0 / acc : acc;
}

// sum_{i>=0} A (x0 + i d)^m e^{-t (x0 + i d)}, geometric domination.
// Returns inf while the bound is not yet valid at this cutoff.
double lattice_tail_bound(double A, double m, double d, double x0, double t) {
    if (!(x0 > 0.0)) return kInf;
    if (x0 > 1e306) return 1e-300;
    const double decay = t - std::max(m, 0.0) / x0;
    if (!(decay > 0.0) || !(d > 0.0)) return kInf;
    const double h0 = A * std::exp(m * std::log(x0) - t * x0);
    const double rho = std::exp(-d * decay);
    return h0 / (1.0 - rho);
}

// Power-law models: analytic continuation of the index-space sum past K by
// the midpoint rule, sum_{k>K} g(k) ~ int_{K+1/2}^inf g(x) dx with
// g(x) = (x/C)^{n/p} e^{-t (x/C)^{1/p}}. The midpoint error is bounded by
// (1/24) int |g''|, itself a short sum of incomplete-gamma integrals.
struct Continuation {
    double estimate = 0.0;
    double error = kInf;
};

// int_m^inf x^{a+alpha} e^{-tp x^b} dx = (1/b) tp^{-s} Gamma(s, u),
// s = (a+alpha+1)/b, u = tp m^b
double power_exp_integral(double a, double alpha, double b, double tp, double u) {
    const double s = (a + alpha + 1.0) / b;
    return (1.0 / b) * std::pow(tp, -s) * upper_incomplete_gamma(s, u);
}

Continuation power_law_continuation(double C, double p, int n, double t, std::int64_t K) {
    Continuation out;
    const double m = static_cast<double>(K) + 0.5;
    const double a = n / p;
    const double b = 1.0 / p;
    const double tp = t * std::pow(C, -b);
    const double u = tp * std::pow(m, b);
    const double s_est = n + p;
    out.estimate = C * p * std::pow(t, -s_est) * upper_incomplete_gamma(s_est, u);
    const double scale = std::pow(C, -a); // g(x) = scale * x^a e^{-tp x^b}
    const double i_m2 = power_exp_integral(a, -2.0, b, tp, u);
    const double i_b2 = power_exp_integral(a, b - 2.0, b, tp, u);
    const double i_2b2 = power_exp_integral(a, 2.0 * b - 2.0, b, tp, u);
    const double aa = std::fabs(a);
    out.error = scale / 24.0 *
                ((a * a + aa) * i_m2 + (2.0 * aa * b + b * std::fabs(b - 1.0)) * tp * i_b2 +
                 b * b * tp * tp * i_2b2);
    out.error += 1e-13 * std::fabs(out.estimate); // evaluation slack
    return out;
}

struct ModelTailShape {
    double A = 1.0; // |lambda|^n mult majorant constant
    double m = 0.0; // power of Re lambda in the majorant
};

ModelTailShape tail_shape(const Spectrum& s, int n) {
    switch (s.model()) {
        case SpectrumModel::ComplexLine: {
            const double c = s.param_c();
            return {n > 0 ? std::pow(1.0 + c * c, 0.5 * n) : 1.0, static_cast<double>(n)};
        }
        case SpectrumModel::TriangularComplex:
            return {n > 0 ? std::pow(2.0, 0.5 * n) : 1.0, static_cast<double>(n + 1)};
        case SpectrumModel::NonHolomorphic:
            return {n > 0 ? std::pow(2.0, 0.5 * n) : 1.0, 2.0 * static_cast<double>(n)};
        default:
            return {1.0, static_cast<double>(n)};
    }
}

TraceValue eval_trace(const Spectrum& s, double t, int n, const TraceOptions& opts) {
    if (!(t > 0.0)) throw DomainError("trace: t must be > 0");
    if (n < -12 || n > 12) throw UsageError("trace: power n outside supported range [-12, 12]");
    if (n < 0 && (!(s.min_real_part() > 0.0) || s.has_zero_eigenvalue()))
        throw DomainError("trace: negative powers need an invertible spectrum");

    // Negative real parts (explicit lists) are handled by an exact shift of
    // the exponent, multiplied back at the end.
    const double shift = std::min(0.0, s.min_real_part());

    Kahan acc_re, acc_im, acc_norm;
    const std::int64_t count = s.entry_count();
    std::int64_t i = 0;
    double best_bound = kInf;
    TraceValue out;
    out.t = t;
    out.n = n;

    const bool real_path = s.is_real();
    // paired 50-term window maxima so the heuristic always sees at least the
    // last 50 consecutive terms (explicit spectra only)
    double window_max = 0.0, prev_window_max = 0.0;
    std::int64_t recent_n = 0;

    double tail_add = 0.0, tail_bound = 0.0;
    bool tail_certified = false, done = false;

    while (!done) {
        const std::int64_t chunk_end = i + kChunk;
        Kahan ch_re, ch_im, ch_norm;
        for (; i < chunk_end && (count == Spectrum::kUnbounded || i < count); ++i) {
            const EigenEntry e = s.entry(i);
            const double mult = static_cast<double>(e.mult);
            double term_norm;
            if (real_path) {
                double term;
                if (t * (e.re - shift) > 1500.0) {
                    // x^n e^{-tx} underflows well past double range for n <= 12
                    term = 0.0;
                    term_norm = 0.0;
                } else if (e.re == 0.0) {
                    term = (n == 0) ? mult : 0.0;
                    term_norm = term;
                } else {
                    const double lt = n * std::log(std::fabs(e.re)) + std::log(mult) -
                                      t * (e.re - shift);
                    term_norm = lt < -745.0 ? 0.0 : std::exp(lt);
                    term = (e.re < 0.0 && (n & 1)) ? -term_norm : term_norm;
                }
                ch_re.add(term);
                ch_norm.add(term_norm);
            } else {
                const double base = std::exp(-t * (e.re - shift));
                const std::complex<double> rot{std::cos(t * e.im), -std::sin(t * e.im)};
                const std::complex<double> lam{e.re, e.im};
                const std::complex<double> term = mult * complex_ipow(lam, n) * base * rot;
                ch_re.add(term.real());
                ch_im.add(term.imag());
                term_norm = mult * std::pow(std::hypot(e.re, e.im), n) * base;
                ch_norm.add(term_norm);
            }
            if (recent_n % 50 == 0) {
                prev_window_max = window_max;
                window_max = term_norm;
            } else {
                window_max = std::max(window_max, term_norm);
            }
            ++recent_n;
        }
        acc_re.add(ch_re.s);
        acc_im.add(ch_im.s);
        acc_norm.add(ch_norm.s);

        const bool exhausted = (count != Spectrum::kUnbounded && i >= count);
        const double partial = acc_norm.s;
        if (i >= opts.min_terms || exhausted) {
            switch (s.model()) {
                case SpectrumModel::Explicit:
                case SpectrumModel::Counterexample: {
                    if (exhausted) {
                        tail_bound = 0.0;
                        tail_certified = true;
                        done = true;
                    } else if (s.model() == SpectrumModel::Explicit && recent_n >= 100 &&
                               std::max(window_max, prev_window_max) <
                                   opts.eta_rel / std::max<std::int64_t>(i, 1) * partial) {
                        // heuristic stop: 50 consecutive negligible terms
                        const double recent = std::max(window_max, prev_window_max);
                        tail_bound = static_cast<double>(count - i) * recent;
                        tail_certified = false;
                        done = true;
                    }
                    break;
                }
                case SpectrumModel::PowerLaw: {
                    if (i >= 64) {
                        const Continuation c =
                            power_law_continuation(s.param_amplitude(), s.param_p(), n, t, i);
                        best_bound = std::min(best_bound, c.error);
                        if (c.error <= opts.eta_rel * (partial + c.estimate)) {
                            tail_add = c.estimate;
                            tail_bound = c.error;
                            tail_certified = true;
                            done = true;
                        }
                    }
                    break;
                }
                case SpectrumModel::Primes: {
                    const double x0 =
                        exhausted ? static_cast<double>(s.prime_limit() + 1) : s.entry(i).re;
                    const double b = lattice_tail_bound(1.0, n, 1.0, x0, t);
                    best_bound = std::min(best_bound, b);
                    if (b <= opts.eta_rel * partial) {
                        tail_bound = b;
                        tail_certified = true;
                        done = true;
                    } else if (exhausted) {
                        throw BudgetError(
                            "trace: prime sieve exhausted before the tail was certified", b);
                    }
                    break;
                }
                case SpectrumModel::LogLaw: {
                    const double r = s.param_r();
                    const std::int64_t k_min =
                        r > 1.0 ? static_cast<std::int64_t>(std::ceil(std::pow(r - 1.0, r))) + 1
                                : 1;
                    if (i >= k_min + 1) {
                        const double x0 = s.entry(i).re;
                        double b;
                        if (x0 > 1e306) {
                            b = 1e-300; // terms underflow to zero from here on
                        } else {
                            const double d = s.entry(i + 1).re - x0; // gaps nondecreasing
                            b = lattice_tail_bound(1.0, n, d, x0, t);
                        }
                        best_bound = std::min(best_bound, b);
                        if (b <= opts.eta_rel * partial) {
                            tail_bound = b;
                            tail_certified = true;
                            done = true;
                        }
                    }
                    break;
                }
                default: { // ComplexLine / TriangularComplex / NonHolomorphic, unit gaps
                    const ModelTailShape sh = tail_shape(s, n);
                    const double x0 = static_cast<double>(i + 1);
                    const double b = lattice_tail_bound(sh.A, sh.m, 1.0, x0, t);
                    best_bound = std::min(best_bound, b);
                    if (b <= opts.eta_rel * partial) {
                        tail_bound = b;
                        tail_certified = true;
                        done = true;
                    }
                    break;
                }
            }
        }
        if (!done && i >= opts.max_terms) {
            char tbuf[32];
            std::snprintf(tbuf, sizeof tbuf, "%g", t);
            throw BudgetError(std::string("trace: term budget exhausted before tail "
                                          "certification (t = ") +
                                  tbuf + ")",
                              best_bound);
        }
    }

    const double unshift = std::exp(-t * shift); // e^{-t*shift} with shift <= 0
    out.value = std::complex<double>(acc_re.s + tail_add, acc_im.s) * unshift;
    out.norm_value = (acc_norm.s + tail_add) * unshift;
    out.truncation_index = i;
    out.tail_bound = tail_bound * unshift;
    out.tail_certified = tail_certified;
    return out;
}

} // namespace

TraceValue trace_power(const Spectrum& s, double t, int n, const TraceOptions& opts) {
    return eval_trace(s, t, n, opts);
}

TraceValue trace_norm_power(const Spectrum& s, double t, int n, const TraceOptions& opts) {
    return eval_trace(s, t, n, opts);
}

ImaginaryDefect imaginary_defect(const Spectrum& s, double t, const TraceOptions& opts) {
    const TraceValue t0 = eval_trace(s, t, 0, opts);
    const TraceValue t1 = eval_trace(s, t, 1, opts);
    ImaginaryDefect d;
    d.defect = std::complex<double>(t0.norm_value, 0.0) - t0.value;
    d.bound = t * t1.norm_value;
    const double slack = 2.0 * t0.tail_bound + t * t1.tail_bound +
                         1e-12 * (std::abs(d.defect) + d.bound);
    d.holds = std::abs(d.defect) <= d.bound + slack;
    return d;
}

double integral_proxy(const std::function<double(double)>& f, double t, double rel_tol) {
    if (!(t > 0.0)) throw DomainError("integral_proxy: t must be > 0");
    // locate the tail cut t f(x) > 45 by doubling; failure to reach it in a
    // huge range means e^{-t f} cannot be decaying fast enough to integrate
    double x_hi = 1.0;
    while (t * f(x_hi) < 45.0) {
        x_hi *= 2.0;
        if (x_hi > 1e15)
            throw DivergenceError("integral_proxy: t*f(x) stays below 45 out to 1e15");
    }
    // scale where the integrand starts to decay noticeably
    double x_scale = x_hi;
    {
        double lo = 0.0, hi = x_hi;
        for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (t * f(mid) < 1.0 ? lo : hi) = mid;
        }
        x_scale = std::max(hi, 1e-30);
    }
    std::vector<double> brk{0.0};
    for (double x = x_scale / 8.0; x < x_hi; x *= 2.0) brk.push_back(x);
    brk.push_back(x_hi);
    const auto g = [&](double x) { return std::exp(-t * f(x)); };
    const QuadResult q = integrate_panels(g, brk, rel_tol);
    return q.value;
}

double integral_proxy(const RVSpec& f, double t, double rel_tol) {
    f.validate();
    if (f.mode == LogMode::Raw && f.domain_threshold() > 0.0)
        throw UsageError("integral_proxy: raw-log laws are not defined near 0; use shifted logs");
    return integral_proxy([&](double x) { return rv_eval(f, x); }, t, rel_tol);
}

CavalieriCheck cavalieri_check(const Spectrum& s, double t, const TraceOptions& opts) {
    if (!s.is_real() || s.min_real_part() < 0.0)
        throw DomainError("cavalieri_check: needs a real nonnegative spectrum");
    if (!(t > 0.0)) throw DomainError("cavalieri_check: t must be > 0");
    CavalieriCheck out;
    out.lhs = eval_trace(s, t, 0, opts).value.real();
    // quadrature of N(x/t) e^{-x} with panels aligned to the jumps of N
    const double x_max = 60.0;
    const double lam_max = x_max / t;
    if (s.counting(lam_max) > 5'000'000)
        throw BudgetError("cavalieri_check: too many jumps below the tail cut", 0.0);
    std::vector<double> brk{0.0};
    const std::int64_t count = s.entry_count();
    for (std::int64_t i = 0; count == Spectrum::kUnbounded || i < count; ++i) {
        const double x = t * s.entry(i).re;
        if (x > x_max) break;
        if (x > 0.0) brk.push_back(x);
    }
    brk.push_back(x_max);
    const CountingFunction N(s);
    const auto g = [&](double x) { return static_cast<double>(N(x / t)) * std::exp(-x); };
    out.rhs = integrate_panels(g, brk, 1e-11, 1e-300, 200000).value;
    out.rel_gap = std::fabs(out.lhs - out.rhs) / std::max(std::fabs(out.lhs), 1e-300);
    return out;
}

MellinCheck mellin_power(const Spectrum& s, double q, double shift, const TraceOptions& opts) {
    if (!s.is_real()) throw DomainError("mellin_power: needs a real spectrum");
    if (!(s.min_real_part() + shift > 0.0))
        throw DomainError("mellin_power: spectrum plus shift must be positive");
    if (!(q > 0.0)) throw DomainError("mellin_power: q must be > 0");
    const double index = s.inverse_power_index();
    if (q <= index + 1e-9)
        throw DivergenceError("mellin_power: q = " + std::to_string(q) +
                              " is not above the spectrum index " + std::to_string(index));

    MellinCheck out;

    // ---- series: sum mult (shift + lambda)^{-q} with a certified tail ----
    Kahan series;
    const std::int64_t count = s.entry_count();
    std::int64_t i = 0;
    double series_tail = kInf;
    double tail_add = 0.0;
    for (;; ++i) {
        const bool exhausted = (count != Spectrum::kUnbounded && i >= count);
        if (!exhausted && i < opts.max_terms) {
            const EigenEntry e = s.entry(i);
            if (e.re < 1e306)
                series.add(static_cast<double>(e.mult) * std::pow(shift + e.re, -q));
        }
        if (exhausted) {
            series_tail = 0.0;
            if (s.model() == SpectrumModel::Primes) {
                // remaining primes dominated by the integer lattice past the limit
                const double x0 = static_cast<double>(s.prime_limit() + 1);
                series_tail = std::pow(shift + x0, -q) +
                              std::pow(shift + x0, 1.0 - q) / (q - 1.0);
            }
            break;
        }
        if (i >= 4096 && i % kChunk == 0) {
            if (s.model() == SpectrumModel::PowerLaw) {
                // midpoint continuation in index space with a shift sandwich
                const double C = s.param_amplitude(), p = s.param_p();
                const double m = static_cast<double>(i) + 0.5;
                const double qp = q / p;
                if (qp > 1.0) {
                    const double hi = std::pow(C, qp) * std::pow(m, 1.0 - qp) / (qp - 1.0);
                    const double lamK = std::pow(m / C, 1.0 / p);
                    const double lo = hi * std::pow(1.0 + shift / lamK, -q);
                    const double gp = qp * std::pow(C, qp) * std::pow(m, -qp - 1.0);
                    const double err = 0.5 * (hi - lo) + gp / 24.0 + 1e-14 * hi;
                    if (err <= std::max(opts.eta_rel, 1e-12) * (series.s + hi)) {
                        tail_add = 0.5 * (hi + lo);
                        series_tail = err;
                        break;
                    }
                }
            } else {
                const double x0 = s.entry(i).re;
                const double b =
                    std::pow(shift + x0, -q) + std::pow(shift + x0, 1.0 - q) / (q - 1.0);
                if (b <= std::max(opts.eta_rel, 1e-10) * series.s) {
                    series_tail = b;
                    break;
                }
            }
        }
        if (i >= opts.max_terms)
            throw BudgetError("mellin_power: series budget exhausted", series_tail);
    }
    out.series = series.s + tail_add;

    // ---- integral: Gamma(q)^{-1} int t^{q-1} Theta_shift(t) dt, t = e^{-v} ----
    const double lam1 = s.min_real_part() + shift;
    const double v_lo = -std::log(60.0 / lam1);
    // counting majorant Theta(t) <= c1 Gamma(1+alpha) t^{-alpha} picks the
    // small-t cutoff so the remainder is negligible
    double c1 = 1.0, alpha = 1.0;
    switch (s.model()) {
        case SpectrumModel::PowerLaw:
            c1 = s.param_amplitude();
            alpha = s.param_p();
            break;
        case SpectrumModel::LogLaw: {
            const double r = s.param_r();
            c1 = std::max(1.0, std::pow(r / M_E, r));
            alpha = 1.0;
            break;
        }
        default:
            c1 = 1.0;
            alpha = 1.0;
            break;
    }
    double v_hi;
    double remainder_hi;
    if (count != Spectrum::kUnbounded && s.model() != SpectrumModel::Primes) {
        const double n_tot = static_cast<double>(s.counting(1e300));
        v_hi = (std::log(n_tot + 1.0) + 34.0) / q;
        remainder_hi = n_tot * std::exp(-q * v_hi) / q / gamma(q);
    } else {
        const double t_lo_target =
            1e-10 * std::fabs(out.series) * gamma(q) * (q - alpha) / (c1 * gamma(1.0 + alpha));
        v_hi = -std::log(std::pow(t_lo_target, 1.0 / (q - alpha)));
        v_hi = std::min(std::max(v_hi, 5.0), 600.0);
        const double t_lo = std::exp(-v_hi);
        remainder_hi =
            c1 * gamma(1.0 + alpha) * std::pow(t_lo, q - alpha) / ((q - alpha) * gamma(q));
    }
    TraceOptions eval_opts = opts;
    eval_opts.eta_rel = std::max(opts.eta_rel, 1e-11);
    const auto integrand = [&](double v) {
        const double t = std::exp(-v);
        const double theta = eval_trace(s, t, 0, eval_opts).value.real();
        return std::exp(-q * v - t * shift) * theta;
    };
    const QuadResult quad = integrate_adaptive(integrand, v_lo, v_hi, 1e-10, 1e-300, 4000);
    out.integral = quad.value / gamma(q) + 0.5 * remainder_hi;
    const double integral_err = quad.abs_error / gamma(q) + 0.5 * remainder_hi;

    out.rel_gap = std::fabs(out.series - out.integral) / std::max(std::fabs(out.series), 1e-300);
    out.certified = series_tail <= 1e-7 * std::fabs(out.series) &&
                    integral_err <= 1e-6 * std::fabs(out.integral);
    return out;
}

} // namespace spectral
