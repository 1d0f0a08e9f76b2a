#pragma once

#include <cstdint>
#include <vector>

#include "spectral/heattrace.hpp"
#include "spectral/spectrum.hpp"

namespace spectral {

// Finite prefixes cannot decide ideal membership, so verdicts are
// three-valued with growth evidence attached.
enum class IdealVerdict { BoundedSoFar, Diverging, Inconclusive };

const char* to_string(IdealVerdict v);

struct IdealCheckpoint {
    std::int64_t n = 0;
    double schatten_partial = 0.0; // sum_{k<=n} s_k^p
    double weak_quasinorm = 0.0;   // sup_{k<=n} k^{1/p} s_k
    double macaev_norm = 0.0;      // sup_{m<=n} (1/ln(1+m)) sum_{k<=m} s_k^p
};

struct IdealReport {
    double p = 1.0;
    std::int64_t depth = 0;
    double schatten_partial = 0.0;
    double weak_quasinorm = 0.0;
    double macaev_norm = 0.0;
    IdealVerdict schatten_verdict = IdealVerdict::Inconclusive;
    IdealVerdict weak_verdict = IdealVerdict::Inconclusive;
    IdealVerdict macaev_verdict = IdealVerdict::Inconclusive;
    // growth evidence: last-increment ratio of the partial sums, weak growth
    // over two doublings, macaev growth over the top half of the log range
    double schatten_increment_ratio = 0.0;
    double weak_growth_ratio = 0.0;
    double macaev_growth_ratio = 0.0;
    std::vector<IdealCheckpoint> checkpoints; // geometric depths plus run ends
};

// First n singular values of the diagonal model (or its inverse),
// nonincreasing, multiplicity-expanded. Expansion capped at 1e7 entries.
std::vector<double> singular_values(const Spectrum& s, std::int64_t n, bool inverse);

// Run-length encoded singular values for block-constant spectra; avoids
// expanding multiplicities. Runs are emitted in nonincreasing value order.
struct SingularRun {
    double value = 0.0;
    std::int64_t count = 0;
};
std::vector<SingularRun> singular_value_runs(const Spectrum& s, std::int64_t depth, bool inverse);

IdealReport ideal_report(const std::vector<double>& s_values, double p);
IdealReport ideal_report(const std::vector<SingularRun>& runs, double p);

struct ZetaScanPoint {
    double eps = 0.0;
    double value = 0.0; // eps * sum |lambda_k|^{-(p+eps)}
    double tail_bound = 0.0;
    bool certified = true;
};

// eps-scan of eps * Tr |A|^{-(p+eps)}; stabilization as eps drops evidences
// membership in the Macaev class at exponent p.
std::vector<ZetaScanPoint> zeta_eps_scan(const Spectrum& s, double p,
                                         const std::vector<double>& eps_grid,
                                         const TraceOptions& opts = {});

struct Z1LogCheck {
    std::vector<std::pair<double, double>> ratio; // (t, ||A^{-1}e^{-tA}||_1 / ln(1/t))
    struct DerivPoint {
        double t = 0.0;
        double numeric = 0.0;  // central difference of ||A^{-1}e^{-tA}||_1
        double analytic = 0.0; // -||e^{-tA}||_1
        double rel_err = 0.0;
    };
    std::vector<DerivPoint> derivative_checks; // at interior grid points
};

Z1LogCheck z1_log_check(const Spectrum& s, const std::vector<double>& t_grid,
                        const TraceOptions& opts = {});

} // namespace spectral
