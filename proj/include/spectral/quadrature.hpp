#pragma once

#include <functional>
#include <vector>

namespace spectral {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // estimated
    long evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 bisection on [a, b]. Splits the worst panel
// until the summed error estimate drops below max(abs_floor, rel_tol * |I|).
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-9, double abs_floor = 1e-300,
                              int max_panels = 20000);

// Same, but seeded with caller-supplied panel breakpoints (ascending,
// first = a, last = b). Useful when the integrand has known kinks or jumps.
QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& breakpoints,
                            double rel_tol = 1e-9, double abs_floor = 1e-300,
                            int max_panels = 20000);

} // namespace spectral
