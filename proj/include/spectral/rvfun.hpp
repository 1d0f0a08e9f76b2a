#pragma once

#include <utility>
#include <vector>

#include "spectral/errors.hpp"

namespace spectral {

// How the slowly varying log factor is evaluated.
//   Shifted: Ln_k with Ln_{k+1}(x) = ln(1 + Ln_k(x)), defined on [0, inf).
//   Raw:     ln applied k times, defined only where the whole tower is positive.
enum class LogMode { Shifted, Raw };

// Parametric regularly varying law f(x) = C * x^p * (log factor)^r with
// log depth k. The admissible index range is p > 0 with any r, or p = 0
// with r > 0.
struct RVSpec {
    double amplitude = 1.0;    // C > 0
    double power = 1.0;        // p >= 0
    double log_exponent = 0.0; // r
    int log_depth = 0;         // k >= 0
    LogMode mode = LogMode::Shifted;

    void validate() const; // throws DomainError on an inadmissible parameter set

    // Smallest x whose raw log tower is strictly positive (tower of e's).
    // 0 for Shifted mode or depth 0.
    double domain_threshold() const;
};

// Iterated logarithm. Shifted mode computes Ln_k, Raw mode ln∘...∘ln.
// Raw mode throws DomainError naming the depth at which the tower left
// the domain of the next logarithm.
double ln_iter(int k, double x, LogMode mode);

// f(x) = C * x^p * (log factor)^r. Strictly positive on its domain;
// non-finite results raise OverflowError.
double rv_eval(const RVSpec& spec, double x);

// Convenience entry: rv_eval(spec, 1/t).
double rv_eval_at_inverse(const RVSpec& spec, double t);

// Gamma function on (0, inf), Lanczos approximation (g = 7, 9 coefficients).
double gamma(double x);

// Principal Lambert branch on [0, inf): the unique x >= 0 with x e^x = y.
double lambert_w0(double y);

// Upper incomplete gamma Gamma(s, z) = int_z^inf u^{s-1} e^{-u} du.
// Supports s <= 0 only for z >= 0.5 (continued-fraction regime).
double upper_incomplete_gamma(double s, double z);

// Derivatives f, f', ..., f^(n) of the law at x, assembled by product and
// chain rule (truncated Taylor recurrences). n <= 8.
std::vector<double> rv_derivatives(const RVSpec& spec, double x, int n);

// x^n f^(n)(x) / f(x); tends to p(p-1)...(p-n+1) as x -> inf.
// Exact falling factorial for pure powers (r = 0).
double smooth_var_ratio(const RVSpec& spec, int n, double x);

struct PotterReport {
    bool holds = false;
    std::pair<double, double> worst_pair{0.0, 0.0}; // (x, y) with the worst margin
    double worst_margin = 0.0;                      // max of ratio / bound over the grid
    double threshold_used = 0.0;
};

// Pointwise check of the Potter bound
//   f(y)/f(x) <= a * max((y/x)^{p+eps}, (y/x)^{p-eps})
// over the supplied grid of pairs; all grid coordinates must be >= threshold.
PotterReport potter_check(const RVSpec& spec, double a, double eps,
                          const std::vector<std::pair<double, double>>& grid,
                          double threshold);

struct LnBoundConstant {
    double c_eps;
    double x_eps;
};

// Smallest constant with ln(1+x) <= c_eps * x^eps on [0, inf), found by
// solving h(x) = (1+x) ln(1+x) / x = 1/eps (h is increasing, h(0+) = 1);
// then c_eps = ln(1+x_eps) / x_eps^eps.
LnBoundConstant ln_bound_constant(double eps);

} // namespace spectral
