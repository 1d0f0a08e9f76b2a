#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "spectral/errors.hpp"

namespace spectral {

enum class SpectrumModel {
    Explicit,          // user list of (re, im, mult)
    PowerLaw,          // lambda_k = (k/C)^(1/p)
    LogLaw,            // lambda_k = e^(k^(1/r))
    Primes,            // lambda_k = k-th prime, sieved up to a limit
    Counterexample,    // block-constant sequence on k_l = 2^(l^2) partitions
    ComplexLine,       // lambda_k = (1+ic) k
    TriangularComplex, // lambda_k = (1+i) k with multiplicity k
    NonHolomorphic,    // lambda_k = k + i k^2
};

struct EigenEntry {
    double re = 0.0;
    double im = 0.0;
    std::int64_t mult = 1;
};

// Immutable discrete eigenvalue sequence, enumerable in nondecreasing real
// part with aggregated multiplicities. Closed-form models are generated
// lazily; nothing is materialized except Explicit lists and the prime sieve.
class Spectrum {
public:
    static Spectrum explicit_list(std::vector<EigenEntry> entries);
    static Spectrum power_law(double p, double C);
    static Spectrum log_law(double r);
    static Spectrum primes(std::int64_t limit);
    static Spectrum counterexample(int levels);
    static Spectrum complex_line(double c);
    static Spectrum triangular_complex();
    static Spectrum nonholomorphic();

    SpectrumModel model() const { return model_; }
    bool is_real() const { return is_real_; }
    double min_real_part() const { return min_real_part_; }
    bool is_positive_real_part() const { return min_real_part_ > 0.0; }
    bool has_zero_eigenvalue() const { return has_zero_; }
    // real parts grow without bound (false for Explicit and Counterexample)
    bool unbounded_above() const { return unbounded_; }
    // infimum of s with sum |lambda_k|^(-s) finite; 0 for finite spectra
    double inverse_power_index() const;

    // number of aggregated entries; kUnbounded for infinite models
    static constexpr std::int64_t kUnbounded = -1;
    std::int64_t entry_count() const;

    // i-th aggregated entry, 0-based, nondecreasing real part
    EigenEntry entry(std::int64_t i) const;
    // ln(re) of the i-th entry, finite even where re overflows (LogLaw)
    double entry_log_re(std::int64_t i) const;

    // N(lam) = #{k : Re lambda_k <= lam} counting multiplicity
    std::int64_t counting(double lam) const;

    std::vector<EigenEntry> eigenvalues_upto(double cutoff) const;

    // model parameters (valid for the matching model only)
    double param_p() const { return p_; }
    double param_amplitude() const { return c_; }
    double param_r() const { return r_; }
    double param_c() const { return c_; }
    std::int64_t prime_limit() const { return prime_limit_; }
    int levels() const { return levels_; }

private:
    Spectrum() = default;

    SpectrumModel model_ = SpectrumModel::Explicit;
    bool is_real_ = true;
    bool unbounded_ = true;
    bool has_zero_ = false;
    double min_real_part_ = 0.0;
    double p_ = 1.0, c_ = 1.0, r_ = 1.0;
    std::int64_t prime_limit_ = 0;
    int levels_ = 0;
    std::shared_ptr<const std::vector<EigenEntry>> explicit_entries_;
    std::shared_ptr<const std::vector<std::int64_t>> explicit_prefix_; // cumulative multiplicity
    std::shared_ptr<const std::vector<std::uint32_t>> primes_;
    std::vector<double> block_values_;      // Counterexample, ascending re
    std::vector<std::int64_t> block_mults_; // matching multiplicities
};

// Sieve of Eratosthenes; limit <= 1e8 (budget), throws BudgetError beyond.
std::vector<std::uint32_t> primes_upto(std::int64_t limit);

// Counting-function view over the real parts of a spectrum.
class CountingFunction {
public:
    explicit CountingFunction(const Spectrum& s) : s_(&s) {}
    std::int64_t operator()(double lam) const { return s_->counting(lam); }

private:
    const Spectrum* s_;
};

// Sum_{k=2}^{n} lambda_k of the counterexample sequence, with partial blocks
// truncated proportionally. Exact block arithmetic, levels <= 5.
double counterexample_partial_sum(int levels, std::int64_t n);

struct ViolationWitness {
    std::int64_t index;  // n = 2^((m+1)^2) - 1 with m = ceil(c)
    double s_value;      // lambda_n
    double threshold;    // c / n
};

// Witness of the weak-L1 violation: an index n with lambda_n > c / n.
ViolationWitness counterexample_violation_witness(int levels, double c);

} // namespace spectral
