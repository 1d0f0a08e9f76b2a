#include "spectral/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "spectral/errors.hpp"

namespace spectral {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK dqk15 constants).
const double kXgk[8] = {
    0.991455371120812639207, 0.949107912342758524526, 0.864864423359769072790,
    0.741531185599394439864, 0.586087235467691130295, 0.405845151377397166907,
    0.207784955007898467601, 0.0};
const double kWgk[8] = {
    0.022935322010529224964, 0.063092092629978553291, 0.104790010322250183840,
    0.140653259715525918745, 0.169004726639267902827, 0.190350578064785409913,
    0.204432940075298892414, 0.209482141084727828013};
const double kWg[4] = {
    0.129484966168869693271, 0.279705391489276667901, 0.381830050505118944950,
    0.417959183673469387755};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    const double fc = f(mid);
    fv[7] = fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        fv[i] = f(mid - dx);
        fv[14 - i] = f(mid + dx);
    }
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double pair = fv[i] + fv[14 - i];
        resk += kWgk[i] * pair;
        if (i % 2 == 1) resg += kWg[i / 2] * pair;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::fabs(fv[i] - reskh) + std::fabs(fv[14 - i] - reskh));
    resasc *= half;
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {a, b, resk * half, err};
}

QuadResult run(const std::function<double(double)>& f, std::priority_queue<Panel> heap,
               double rel_tol, double abs_floor, int max_panels, long evals) {
    // heap already holds the seeded panels
    double total = 0.0, total_err = 0.0;
    {
        std::priority_queue<Panel> copy = heap;
        while (!copy.empty()) {
            total += copy.top().value;
            total_err += copy.top().error;
            copy.pop();
        }
    }
    int panels = static_cast<int>(heap.size());
    while (total_err > std::max(abs_floor, rel_tol * std::fabs(total)) && panels < max_panels) {
        Panel worst = heap.top();
        heap.pop();
        if (worst.error <= 0.0 || worst.b - worst.a < 1e-15 * std::max(1.0, std::fabs(worst.b))) {
            // unrefinable; its contribution stays in the totals
            if (heap.empty()) break;
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    return {total, total_err, evals};
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_floor, int max_panels) {
    if (!(b >= a)) throw UsageError("integrate_adaptive: b < a");
    if (a == b) return {0.0, 0.0, 0};
    std::priority_queue<Panel> heap;
    heap.push(gk15(f, a, b));
    return run(f, std::move(heap), rel_tol, abs_floor, max_panels, 15);
}

QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& breakpoints,
                            double rel_tol, double abs_floor, int max_panels) {
    if (breakpoints.size() < 2) throw UsageError("integrate_panels: need at least 2 breakpoints");
    std::priority_queue<Panel> heap;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] >= breakpoints[i]))
            throw UsageError("integrate_panels: breakpoints not ascending");
        if (breakpoints[i + 1] == breakpoints[i]) continue;
        heap.push(gk15(f, breakpoints[i], breakpoints[i + 1]));
        evals += 15;
    }
    if (heap.empty()) return {0.0, 0.0, 0};
    return run(f, std::move(heap), rel_tol, abs_floor, max_panels, evals);
}

} // namespace spectral
