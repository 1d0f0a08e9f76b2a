#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral/rvfun.hpp"
#include "spectral/spectrum.hpp"

namespace spectral::cli {

enum class Command { Trace, Fit, Tauberian, Ideals, Derivatives, Primes, Counterexample, Report };

enum class OutputFormat { Csv, Json };

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double per_decade = 40.0;
    bool present = false;

    // geometric grid from start to stop (inclusive endpoints)
    std::vector<double> build(bool decreasing) const;
};

struct RunConfig {
    Command command = Command::Trace;
    std::string spectrum_desc;          // model:key=value,... descriptor
    std::string spectrum_json;          // path to a JSON descriptor, overridden by flags
    std::optional<RVSpec> law;
    GridSpec t_grid, lam_grid, eps_grid;
    int power = 0;                      // trace power n
    int order = 1;                      // derivative order n
    double step = 0.0;                  // finite-difference step (0 = default)
    double theta = 0.0;                 // Cauchy-circle angle (0 = skip)
    double p = 1.0;                     // ideal exponent
    double c = 0.0;                     // liminf constant (0 = skip)
    double slack = 0.05;
    // ideals defaults are model-aware: the counterexample is diagnosed
    // directly over all its blocks, everything else through its inverse
    std::optional<bool> inverse;
    std::optional<std::int64_t> depth;
    std::int64_t limit = 1'000'000;     // primes limit
    int levels = 4;
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    double rel_tol = 1e-12;
    std::int64_t max_terms = 10'000'000;
    std::uint64_t seed = 1;
    int fit_selftest = 0;               // fit: run N randomized round-trips instead
};

// Parses argv-style arguments (without the program name). Throws UsageError
// on malformed flags or grids.
RunConfig parse_config(const std::vector<std::string>& args);

// Builds the spectrum named by the config (flags win over the JSON file).
Spectrum build_spectrum(const RunConfig& config);

// Dispatches the command and writes the output files. Returns the process
// exit code: 0 ok, 1 analysis error (divergence/budget/overflow), 2 usage.
int run(const RunConfig& config);

// Full entry point used by the binary: parse + run with exit-code mapping.
int main_entry(int argc, char** argv);

} // namespace spectral::cli
