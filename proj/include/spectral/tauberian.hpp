#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "spectral/heattrace.hpp"
#include "spectral/rvfun.hpp"
#include "spectral/spectrum.hpp"

namespace spectral {

struct AsymptoticFit {
    double p_hat = 0.0;
    double r_hat = 0.0;
    double c_hat = 0.0;
    double residual = 0.0; // RMS of log-model residuals
    double t_min = 0.0, t_max = 0.0;
    int n_points = 0;
};

// Least-squares fit of ln theta(t) ~ ln(C Gamma(1+p)) - p ln t + r ln ln(1/t)
// over (t, theta) samples. With declare_p_zero the p column is dropped.
AsymptoticFit fit_prc(const std::vector<std::pair<double, double>>& samples,
                      bool declare_p_zero = false);

// Ratio series Theta(t) / f(1/t) over a decreasing t grid; converges to
// Gamma(1+p) C under the counting law N(lam) ~ C f(lam). The law may also be
// an arbitrary positive callable (the parametric family is not assumed).
std::vector<std::pair<double, double>> karamata_forward(const Spectrum& s, const RVSpec& spec,
                                                        const std::vector<double>& t_grid,
                                                        const TraceOptions& opts = {});
std::vector<std::pair<double, double>> karamata_forward(
    const Spectrum& s, const std::function<double(double)>& law,
    const std::vector<double>& t_grid, const TraceOptions& opts = {});

// Ratio series N(lam) / f(lam) over an increasing lam grid.
std::vector<std::pair<double, double>> karamata_inverse(const Spectrum& s, const RVSpec& spec,
                                                        const std::vector<double>& lam_grid);
std::vector<std::pair<double, double>> karamata_inverse(
    const Spectrum& s, const std::function<double(double)>& law,
    const std::vector<double>& lam_grid);

struct LiminfReport {
    double min_counting_ratio = 0.0; // min over lam of N/f
    double min_trace_ratio = 0.0;    // min over t of Theta/f(1/t)
    double threshold = 0.0;          // c * Gamma(1+p) * (1 - slack)
    bool hypothesis_met = false;     // min_counting_ratio >= c
    bool passes = false;             // only meaningful when hypothesis_met
    double slack = 0.0;
};

LiminfReport liminf_check(const Spectrum& s, const RVSpec& spec, double c,
                          const std::vector<double>& t_grid,
                          const std::vector<double>& lam_grid, double slack = 0.05,
                          const TraceOptions& opts = {});

// Ratio series N(e^{W0(lam)}) / (lam^r e^{(p-r) W0(lam)}); boundedness
// restates the counting law for depth-1 logarithmic factors.
std::vector<std::pair<double, double>> lambert_weyl_check(const Spectrum& s, double p, double r,
                                                          const std::vector<double>& lam_grid);

} // namespace spectral
