#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include "spectral/rvfun.hpp"
#include "spectral/spectrum.hpp"

namespace spectral {

struct TraceOptions {
    double eta_rel = 1e-12;              // certify tail <= eta_rel * partial sum
    std::int64_t max_terms = 10'000'000; // aggregated entries per evaluation
    std::int64_t min_terms = 0;          // force at least this many before stopping
};

// Truncated evaluation of sum_k lambda_k^n e^{-t lambda_k} (value) and
// sum_k |lambda_k|^n e^{-t Re lambda_k} (norm_value). tail_bound certifies
// the modulus of whatever the evaluation did not account for exactly.
struct TraceValue {
    std::complex<double> value{0.0, 0.0};
    double norm_value = 0.0;
    std::int64_t truncation_index = 0; // aggregated entries consumed
    double tail_bound = 0.0;
    bool tail_certified = true;
    double t = 0.0;
    int n = 0;
};

TraceValue trace_power(const Spectrum& s, double t, int n, const TraceOptions& opts = {});
TraceValue trace_norm_power(const Spectrum& s, double t, int n, const TraceOptions& opts = {});

struct ImaginaryDefect {
    std::complex<double> defect{0.0, 0.0}; // sum e^{-t Re} - Tr e^{-tA}
    double bound = 0.0;                    // t * ||A e^{-tA}||_1
    bool holds = false;
};

// Checks |sum_k e^{-t Re lambda_k} - Tr e^{-tA}| <= t ||A e^{-tA}||_1.
ImaginaryDefect imaginary_defect(const Spectrum& s, double t, const TraceOptions& opts = {});

// int_0^inf e^{-t f(x)} dx for a positive nondecreasing f, adaptive
// quadrature with the tail cut where t f(x) > 45.
double integral_proxy(const RVSpec& f, double t, double rel_tol = 1e-9);
double integral_proxy(const std::function<double(double)>& f, double t, double rel_tol = 1e-9);

struct CavalieriCheck {
    double lhs = 0.0; // sum e^{-t lambda_k}
    double rhs = 0.0; // int_0^inf N(x/t) e^{-x} dx by quadrature
    double rel_gap = 0.0;
};

CavalieriCheck cavalieri_check(const Spectrum& s, double t, const TraceOptions& opts = {});

struct MellinCheck {
    double series = 0.0;   // sum (shift + lambda_k)^{-q}
    double integral = 0.0; // Gamma(q)^{-1} int t^{q-1} Tr e^{-t(shift+A)} dt
    double rel_gap = 0.0;
    bool certified = true;
};

// Resolvent-power identity at exponent q; requires q above the spectrum's
// estimated heat-trace index, else DivergenceError.
MellinCheck mellin_power(const Spectrum& s, double q, double shift = 1.0,
                         const TraceOptions& opts = {});

} // namespace spectral
