// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Usage: acceptance --cli <path-to-spectral-binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spectral/asymderiv.hpp"
#include "spectral/heattrace.hpp"
#include "spectral/ideals.hpp"
#include "spectral/tauberian.hpp"

using namespace spectral;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli_path;

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<bool(std::string&)> body;
};

void run_criterion(const Criterion& c) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        ok = c.body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        ok = false;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.limit_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("runtime ") +
                  std::to_string(seconds) + "s exceeds " + std::to_string(c.limit_seconds) + "s";
    }
    std::printf("criterion %2d %s: %s (%.2fs%s%s)\n", c.id, ok ? "PASS" : "FAIL", c.name,
                seconds, detail.empty() ? "" : "; ", detail.c_str());
    if (!ok) ++g_failures;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

bool within(double value, double target, double tol) {
    return std::fabs(value - target) <= tol;
}

std::vector<double> geometric(double start, double stop, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = start * std::pow(stop / start, double(i) / (points - 1));
    return g;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- criteria ----------------------------------------------------------------

bool criterion_1(std::string& detail) {
    const Spectrum id = Spectrum::power_law(1.0, 1.0);
    double worst0 = 0.0, worst1 = 0.0;
    for (const double t : {0.01, 0.1, 1.0}) {
        const double v0 = trace_power(id, t, 0).value.real();
        const double c0 = 1.0 / std::expm1(t);
        worst0 = std::max(worst0, std::fabs(v0 - c0) / c0);
        const double v1 = trace_power(id, t, 1).value.real();
        const double c1 = std::exp(t) / (std::expm1(t) * std::expm1(t));
        worst1 = std::max(worst1, std::fabs(v1 - c1) / c1);
    }
    detail = "rel err n=0: " + num(worst0) + ", n=1: " + num(worst1);
    return worst0 <= 1e-12 && worst1 <= 1e-11;
}

bool criterion_2(std::string& detail) {
    const Spectrum tri = Spectrum::triangular_complex();
    double worst_norm = 0.0;
    for (const double t : {0.01, 0.1}) {
        const double sh = 2.0 * std::sinh(t / 2.0);
        const double closed = 1.0 / (sh * sh);
        worst_norm = std::max(
            worst_norm, std::fabs(trace_norm_power(tri, t, 0).norm_value - closed) / closed);
    }
    const TraceValue v = trace_power(tri, 1e-3, 0);
    const double re_dev = std::fabs(v.value.real() + 1.0 / 12.0);
    const double im_dev = std::fabs(v.value.imag() * 1e-6 + 0.5);
    detail = "norm rel " + num(worst_norm) + ", re dev " + num(re_dev) +
             ", im*t^2 dev " + num(im_dev);
    return worst_norm <= 1e-10 && re_dev <= 1e-3 && im_dev <= 1e-3;
}

bool criterion_3(std::string& detail) {
    double worst_gap = 0.0, worst_ratio_dev = 0.0;
    for (const double p : {0.5, 1.0, 2.0, 3.0}) {
        const Spectrum s = Spectrum::power_law(p, 1.0);
        const double gp = spectral::gamma(1.0 + p);
        for (const double t : geometric(0.01, 1.0, 100)) {
            const double theta = trace_power(s, t, 0).value.real();
            worst_gap = std::max(worst_gap, std::fabs(theta - gp * std::pow(t, -p)));
        }
        const double ratio = trace_power(s, 1e-5, 0).value.real() * std::pow(1e-5, p) / gp;
        worst_ratio_dev = std::max(worst_ratio_dev, std::fabs(ratio - 1.0));
    }
    detail = "worst |Theta - Gamma(1+p) t^-p| = " + num(worst_gap) +
             ", worst ratio dev at 1e-5 = " + num(worst_ratio_dev);
    return worst_gap <= 1.0 && worst_ratio_dev <= 0.01;
}

bool criterion_4(std::string& detail) {
    const Spectrum pr = Spectrum::primes(10'000'000);
    const auto ratio_at = [&](double t) {
        return trace_power(pr, t, 0).value.real() * t * std::log(1.0 / t);
    };
    const double r4 = ratio_at(1e-4);
    const double r2 = ratio_at(1e-2);
    const bool counting_ok = pr.counting(1e6) == 78498;
    detail = "ratio(1e-4) = " + num(r4) + ", ratio(1e-2) = " + num(r2) +
             ", N(1e6) = " + std::to_string(pr.counting(1e6));
    return r4 >= 0.85 && r4 <= 1.15 && std::fabs(r4 - 1.0) < std::fabs(r2 - 1.0) && counting_ok;
}

bool criterion_5(std::string& detail) {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> up(0.3, 4.0), ur(-2.0, 2.0), uc(0.1, 10.0);
    const std::vector<double> grid = geometric(1e-5, 1e-2, 121);
    double worst_p = 0.0, worst_r = 0.0, worst_c = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double p = up(rng), r = ur(rng), C = uc(rng);
        std::vector<std::pair<double, double>> samples;
        samples.reserve(grid.size());
        for (const double t : grid)
            samples.emplace_back(t, C * spectral::gamma(1.0 + p) * std::pow(t, -p) *
                                        std::pow(std::log(1.0 / t), r));
        const AsymptoticFit fit = fit_prc(samples);
        worst_p = std::max(worst_p, std::fabs(fit.p_hat - p));
        worst_r = std::max(worst_r, std::fabs(fit.r_hat - r));
        worst_c = std::max(worst_c, std::fabs(fit.c_hat - C) / C);
    }
    detail = "worst |dp| = " + num(worst_p) + ", |dr| = " + num(worst_r) +
             ", |dC|/C = " + num(worst_c);
    return worst_p <= 1e-6 && worst_r <= 1e-6 && worst_c <= 1e-6;
}

bool criterion_6(std::string& detail) {
    const Spectrum id = Spectrum::power_law(1.0, 1.0);
    const MellinCheck m = mellin_power(id, 2.0, 1.0);
    const double target = M_PI * M_PI / 6.0 - 1.0;
    bool diverged = false;
    try {
        mellin_power(id, 1.0, 1.0);
    } catch (const DivergenceError&) {
        diverged = true;
    }
    detail = "series rel " + num(std::fabs(m.series - target) / target) +
             ", integral rel " + num(std::fabs(m.integral - target) / target) +
             ", q=1 diverges: " + (diverged ? "yes" : "no");
    return within(m.series, target, 1e-6 * target) &&
           within(m.integral, target, 1e-6 * target) && diverged;
}

bool criterion_7(std::string& detail) {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<long long> uden(1, 16);
    for (int n = 1; n <= 10; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const long long den = uden(rng);
            std::uniform_int_distribution<long long> unum(1, 10 * den);
            const PochhammerExact e = pochhammer_identity_exact(n, unum(rng), den);
            if (e.lhs_scaled != e.rhs_scaled) {
                detail = "exact mismatch at n = " + std::to_string(n);
                return false;
            }
        }
    }
    std::uniform_real_distribution<double> up(0.1, 10.0);
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto [lhs, rhs] = pochhammer_identity(n, up(rng));
            worst = std::max(worst, std::fabs(lhs - rhs) / std::max(std::fabs(rhs), 1.0));
        }
    }
    detail = "float path worst rel = " + num(worst);
    return worst <= 1e-9;
}

bool criterion_8(std::string& detail) {
    const Spectrum id = Spectrum::power_law(1.0, 1.0);
    double worst = 0.0;
    for (const double t : {0.3, 0.5})
        for (const int n : {1, 2})
            worst = std::max(worst, fd_derivative_check(id, t, n).rel_err);
    bool cauchy_ok = true;
    const std::vector<double> grid = geometric(1e-3, 1.0, 50);
    for (const double theta : {M_PI / 6.0, M_PI / 4.0})
        for (const int n : {1, 2, 3})
            cauchy_ok = cauchy_ok && cauchy_bound_check(id, grid, n, theta).all_hold;
    detail = "worst fd rel err = " + num(worst) +
             ", cauchy holds: " + (cauchy_ok ? "yes" : "no");
    return worst <= 1e-6 && cauchy_ok;
}

bool criterion_9(std::string& detail) {
    std::vector<double> harmonic;
    harmonic.reserve(1'000'000);
    for (int k = 1; k <= 1'000'000; ++k) harmonic.push_back(1.0 / k);
    const IdealReport h = ideal_report(harmonic, 1.0);
    const bool weak_one = std::fabs(h.weak_quasinorm - 1.0) <= 1e-12;

    const Spectrum cex = Spectrum::counterexample(4);
    const std::int64_t depth = (std::int64_t{1} << 25) - 2;
    const IdealReport c = ideal_report(singular_value_runs(cex, depth, false), 1.0);
    const double limit = 1.0 / (2.0 * std::log(2.0));
    bool macaev_ok = c.macaev_norm <= limit + 0.05;
    for (const auto& cp : c.checkpoints) macaev_ok = macaev_ok && cp.macaev_norm <= limit + 0.05;
    bool witnesses_ok = true;
    for (const double cc : {2.0, 3.0}) {
        const ViolationWitness w = counterexample_violation_witness(4, cc);
        witnesses_ok = witnesses_ok && w.s_value > w.threshold;
    }

    std::vector<double> logs;
    logs.reserve(1'000'000);
    for (int k = 1; k <= 1'000'000; ++k) logs.push_back(std::log1p(double(k)) / double(k));
    const IdealReport lg = ideal_report(logs, 1.0);

    detail = "weak(1/k) = " + num(h.weak_quasinorm) +
             ", cex macaev = " + num(c.macaev_norm) +
             ", log verdict = " + to_string(lg.macaev_verdict);
    return weak_one && macaev_ok && witnesses_ok &&
           c.weak_verdict == IdealVerdict::Diverging &&
           lg.macaev_verdict == IdealVerdict::Diverging;
}

bool criterion_10(std::string& detail) {
    const Spectrum id = Spectrum::power_law(1.0, 1.0);
    const Z1LogCheck chk = z1_log_check(id, {0.5, 0.3, 0.1, 1e-6});
    const double ratio = chk.ratio.back().second;
    double deriv_err = 1.0;
    for (const auto& pt : chk.derivative_checks)
        if (std::fabs(pt.t - 0.3) < 1e-12) deriv_err = pt.rel_err;
    detail = "ratio(1e-6) = " + num(ratio) +
             ", derivative rel err at 0.3 = " + num(deriv_err);
    return ratio >= 0.98 && ratio <= 1.02 && deriv_err <= 1e-7;
}

bool criterion_11(std::string& detail) {
    const Spectrum id = Spectrum::power_law(1.0, 1.0);
    const std::vector<double> eps_grid{1e-2, 1e-3, 1e-4};
    const auto scan = zeta_eps_scan(id, 1.0, eps_grid);
    bool ok = true;
    std::string vals;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double eps = eps_grid[i];
        ok = ok && scan[i].certified && scan[i].value >= 1.0 - 3.0 * eps &&
             scan[i].value <= 1.0 + 3.0 * eps;
        vals += (i ? ", " : "") + num(scan[i].value);
    }
    detail = "eps*zeta(1+eps) = " + vals;
    return ok;
}

bool criterion_12(std::string& detail) {
    double best_f = 0.0;
    for (double eps = 0.05; eps <= 1.0; eps += 0.001)
        best_f = std::max(best_f, 1.0 / ln_bound_constant(eps).c_eps);
    const bool f_ok = within(best_f, 1.44, 0.01);
    const bool c1_ok = ln_bound_constant(1.0).c_eps == 1.0;
    const bool w_ok = within(lambert_w0(1.0), 0.567143290, 1e-9);
    double worst_gamma = 0.0;
    for (double x = 0.5; x <= 40.0; x += 0.173)
        worst_gamma =
            std::max(worst_gamma, std::fabs(spectral::gamma(x + 1.0) / (x * spectral::gamma(x)) - 1.0));
    detail = "max F = " + num(best_f) + ", W0(1) = " + num(lambert_w0(1.0)) +
             ", gamma recurrence max = " + num(worst_gamma);
    return f_ok && c1_ok && w_ok && worst_gamma <= 1e-11;
}

bool criterion_13(std::string& detail) {
    if (g_cli_path.empty()) {
        detail = "no --cli path given";
        return false;
    }
    const fs::path base = fs::temp_directory_path() / "spectral_acceptance";
    fs::remove_all(base);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"c1", "trace --spectrum power_law:p=1,C=1 --t 0.01:1:50 --power 0"},
        {"c4", "trace --spectrum primes:10000000 --t 1e-4:1e-2:20 --power 0"}};
    for (const auto& [tag, cmd] : runs) {
        for (const int threads : {1, 8}) {
            const fs::path dir = base / (tag + "_" + std::to_string(threads));
            fs::create_directories(dir);
            const std::string full = "SPECTRAL_ASYMPTOTICS_THREADS=" + std::to_string(threads) +
                                     " " + g_cli_path + " " + cmd + " --out " + dir.string();
            if (std::system(full.c_str()) != 0) {
                detail = "CLI run failed: " + full;
                return false;
            }
        }
        const std::string a = slurp(base / (tag + "_1") / "trace.csv");
        const std::string b = slurp(base / (tag + "_8") / "trace.csv");
        if (a.empty() || a != b) {
            detail = "outputs differ for " + tag;
            return false;
        }
    }
    detail = "byte-identical across SPECTRAL_ASYMPTOTICS_THREADS in {1, 8}";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];

    const std::vector<Criterion> criteria{
        {1, "geometric closed forms", 1.0, criterion_1},
        {2, "complex-spectrum suite", 5.0, criterion_2},
        {3, "power-law sandwich and Karamata", 10.0, criterion_3},
        {4, "prime semigroup", 20.0, criterion_4},
        {5, "fit round-trip property", 1.0, criterion_5},
        {6, "Mellin identity", 5.0, criterion_6},
        {7, "Pochhammer identity", 1.0, criterion_7},
        {8, "derivative checks", 5.0, criterion_8},
        {9, "ideal suite", 10.0, criterion_9},
        {10, "Z1-log characterization", 5.0, criterion_10},
        {11, "eps-scan", 10.0, criterion_11},
        {12, "special functions", 1.0, criterion_12},
        {13, "determinism across thread counts", 60.0, criterion_13},
    };
    for (const auto& c : criteria) run_criterion(c);
    if (g_failures == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
