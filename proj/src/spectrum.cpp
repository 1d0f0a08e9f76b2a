#include "spectral/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spectral {

namespace {

constexpr std::int64_t kMaxExplicitEntries = 10'000'000;
constexpr std::int64_t kMaxSieveLimit = 100'000'000;
constexpr std::int64_t kEnumerationBudget = 1'000'000'000;

// k_l = 2^(l^2) partition points of the counterexample sequence.
std::int64_t counterexample_k(int level) { return std::int64_t{1} << (level * level); }

void check_levels(int levels) {
    if (levels < 1 || levels > 5)
        throw DomainError("counterexample: levels must be in 1..5 (parameter levels)");
}

} // namespace

std::vector<std::uint32_t> primes_upto(std::int64_t limit) {
    if (limit < 2) throw DomainError("primes_upto: limit must be >= 2");
    if (limit > kMaxSieveLimit)
        throw BudgetError("primes_upto: limit exceeds sieve budget 1e8", 0.0);
    const auto n = static_cast<std::size_t>(limit);
    std::vector<bool> composite(n + 1, false);
    std::vector<std::uint32_t> out;
    if (limit >= 10) {
        const double dn = static_cast<double>(limit);
        out.reserve(static_cast<std::size_t>(1.2 * dn / std::log(dn)));
    }
    for (std::size_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::size_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

Spectrum Spectrum::explicit_list(std::vector<EigenEntry> entries) {
    if (entries.empty()) throw DomainError("explicit spectrum: empty list (parameter entries)");
    if (static_cast<std::int64_t>(entries.size()) > kMaxExplicitEntries)
        throw BudgetError("explicit spectrum: more than 1e7 entries", 0.0);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const EigenEntry& a, const EigenEntry& b) { return a.re < b.re; });
    Spectrum s;
    s.model_ = SpectrumModel::Explicit;
    s.unbounded_ = false;
    s.min_real_part_ = entries.front().re;
    s.is_real_ = true;
    auto prefix = std::vector<std::int64_t>(entries.size());
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].mult < 1)
            throw DomainError("explicit spectrum: multiplicity must be >= 1 (parameter mult)");
        if (entries[i].im != 0.0) s.is_real_ = false;
        if (entries[i].re == 0.0 && entries[i].im == 0.0) s.has_zero_ = true;
        acc += entries[i].mult;
        prefix[i] = acc;
    }
    s.explicit_entries_ = std::make_shared<const std::vector<EigenEntry>>(std::move(entries));
    s.explicit_prefix_ = std::make_shared<const std::vector<std::int64_t>>(std::move(prefix));
    return s;
}

Spectrum Spectrum::power_law(double p, double C) {
    if (!(p > 0.0)) throw DomainError("power_law spectrum: need p > 0 (parameter p)");
    if (!(C > 0.0)) throw DomainError("power_law spectrum: need C > 0 (parameter C)");
    Spectrum s;
    s.model_ = SpectrumModel::PowerLaw;
    s.p_ = p;
    s.c_ = C;
    s.min_real_part_ = std::pow(1.0 / C, 1.0 / p);
    return s;
}

Spectrum Spectrum::log_law(double r) {
    if (!(r > 0.0)) throw DomainError("log_law spectrum: need r > 0 (parameter r)");
    Spectrum s;
    s.model_ = SpectrumModel::LogLaw;
    s.r_ = r;
    s.min_real_part_ = M_E;
    return s;
}

Spectrum Spectrum::primes(std::int64_t limit) {
    if (limit < 2) throw DomainError("primes spectrum: limit must be >= 2 (parameter limit)");
    Spectrum s;
    s.model_ = SpectrumModel::Primes;
    s.prime_limit_ = limit;
    s.primes_ = std::make_shared<const std::vector<std::uint32_t>>(primes_upto(limit));
    s.min_real_part_ = 2.0;
    return s;
}

Spectrum Spectrum::counterexample(int levels) {
    check_levels(levels);
    Spectrum s;
    s.model_ = SpectrumModel::Counterexample;
    s.levels_ = levels;
    s.unbounded_ = false;
    // ascending real part = descending block index
    for (int l = levels; l >= 1; --l) {
        const std::int64_t m = counterexample_k(l + 1) - counterexample_k(l);
        s.block_values_.push_back(static_cast<double>(l) / static_cast<double>(m));
        s.block_mults_.push_back(m);
    }
    s.min_real_part_ = s.block_values_.front();
    return s;
}

Spectrum Spectrum::complex_line(double c) {
    Spectrum s;
    s.model_ = SpectrumModel::ComplexLine;
    s.c_ = c;
    s.is_real_ = (c == 0.0);
    s.min_real_part_ = 1.0;
    return s;
}

Spectrum Spectrum::triangular_complex() {
    Spectrum s;
    s.model_ = SpectrumModel::TriangularComplex;
    s.is_real_ = false;
    s.min_real_part_ = 1.0;
    return s;
}

Spectrum Spectrum::nonholomorphic() {
    Spectrum s;
    s.model_ = SpectrumModel::NonHolomorphic;
    s.is_real_ = false;
    s.min_real_part_ = 1.0;
    return s;
}

double Spectrum::inverse_power_index() const {
    switch (model_) {
        case SpectrumModel::PowerLaw: return p_;
        case SpectrumModel::Primes: return 1.0;
        case SpectrumModel::LogLaw: return 0.0;
        case SpectrumModel::ComplexLine: return 1.0;
        case SpectrumModel::TriangularComplex: return 2.0;
        case SpectrumModel::NonHolomorphic: return 0.5;
        case SpectrumModel::Explicit:
        case SpectrumModel::Counterexample: return 0.0;
    }
    return 0.0;
}

std::int64_t Spectrum::entry_count() const {
    switch (model_) {
        case SpectrumModel::Explicit:
            return static_cast<std::int64_t>(explicit_entries_->size());
        case SpectrumModel::Primes:
            return static_cast<std::int64_t>(primes_->size());
        case SpectrumModel::Counterexample:
            return static_cast<std::int64_t>(block_values_.size());
        default:
            return kUnbounded;
    }
}

EigenEntry Spectrum::entry(std::int64_t i) const {
    if (i < 0) throw UsageError("spectrum entry: negative index");
    const std::int64_t count = entry_count();
    if (count != kUnbounded && i >= count) throw UsageError("spectrum entry: index out of range");
    const double k = static_cast<double>(i + 1);
    switch (model_) {
        case SpectrumModel::Explicit:
            return (*explicit_entries_)[static_cast<std::size_t>(i)];
        case SpectrumModel::PowerLaw:
            return {std::pow(k / c_, 1.0 / p_), 0.0, 1};
        case SpectrumModel::LogLaw:
            return {std::exp(std::pow(k, 1.0 / r_)), 0.0, 1};
        case SpectrumModel::Primes:
            return {static_cast<double>((*primes_)[static_cast<std::size_t>(i)]), 0.0, 1};
        case SpectrumModel::Counterexample:
            return {block_values_[static_cast<std::size_t>(i)], 0.0,
                    block_mults_[static_cast<std::size_t>(i)]};
        case SpectrumModel::ComplexLine:
            return {k, c_ * k, 1};
        case SpectrumModel::TriangularComplex:
            return {k, k, static_cast<std::int64_t>(i + 1)};
        case SpectrumModel::NonHolomorphic:
            return {k, k * k, 1};
    }
    throw UsageError("spectrum entry: unknown model");
}

double Spectrum::entry_log_re(std::int64_t i) const {
    const double k = static_cast<double>(i + 1);
    switch (model_) {
        case SpectrumModel::PowerLaw: return std::log(k / c_) / p_;
        case SpectrumModel::LogLaw: return std::pow(k, 1.0 / r_);
        default: {
            const double re = entry(i).re;
            return re > 0.0 ? std::log(re) : -std::numeric_limits<double>::infinity();
        }
    }
}

std::int64_t Spectrum::counting(double lam) const {
    if (lam < min_real_part_) return 0;
    // closed-form guess for the largest 1-based index with re <= target,
    // then a local walk to absorb floating-point boundary error
    const auto adjust = [](std::int64_t guess, auto re_of, double target) {
        if (guess < 0) guess = 0;
        while (guess > 0 && re_of(guess) > target) --guess;
        while (re_of(guess + 1) <= target) ++guess;
        return guess;
    };
    switch (model_) {
        case SpectrumModel::Explicit: {
            const auto& v = *explicit_entries_;
            std::size_t lo = 0, hi = v.size();
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (v[mid].re <= lam) lo = mid + 1; else hi = mid;
            }
            return lo == 0 ? 0 : (*explicit_prefix_)[lo - 1];
        }
        case SpectrumModel::PowerLaw: {
            const double g = c_ * std::pow(lam, p_);
            if (g > 4.0e18) throw BudgetError("counting: value exceeds 2^62", 0.0);
            return adjust(static_cast<std::int64_t>(g),
                          [&](std::int64_t k) { return std::pow(k / c_, 1.0 / p_); }, lam);
        }
        case SpectrumModel::LogLaw: {
            if (lam < M_E) return 0;
            const double llam = std::log(lam); // compare the towers in log scale
            const double g = std::pow(llam, r_);
            if (g > 4.0e18) throw BudgetError("counting: value exceeds 2^62", 0.0);
            return adjust(static_cast<std::int64_t>(g),
                          [&](std::int64_t k) { return std::pow(static_cast<double>(k), 1.0 / r_); },
                          llam);
        }
        case SpectrumModel::Primes: {
            const auto& v = *primes_;
            const auto it = std::upper_bound(v.begin(), v.end(), lam);
            return static_cast<std::int64_t>(it - v.begin());
        }
        case SpectrumModel::Counterexample: {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < block_values_.size(); ++i)
                if (block_values_[i] <= lam) acc += block_mults_[i];
            return acc;
        }
        case SpectrumModel::ComplexLine:
        case SpectrumModel::NonHolomorphic: {
            return adjust(static_cast<std::int64_t>(lam),
                          [](std::int64_t k) { return static_cast<double>(k); }, lam);
        }
        case SpectrumModel::TriangularComplex: {
            const std::int64_t m = adjust(static_cast<std::int64_t>(lam),
                                          [](std::int64_t k) { return static_cast<double>(k); }, lam);
            if (m > 3'000'000'000LL) throw BudgetError("counting: value exceeds 2^62", 0.0);
            return m * (m + 1) / 2;
        }
    }
    throw UsageError("counting: unknown model");
}

std::vector<EigenEntry> Spectrum::eigenvalues_upto(double cutoff) const {
    if (cutoff < min_real_part_)
        throw UsageError("eigenvalues_upto: cutoff below the smallest real part");
    if (counting(cutoff) > kEnumerationBudget)
        throw BudgetError("eigenvalues_upto: more than 1e9 eigenvalues requested", 0.0);
    std::vector<EigenEntry> out;
    const std::int64_t count = entry_count();
    for (std::int64_t i = 0; count == kUnbounded || i < count; ++i) {
        const EigenEntry e = entry(i);
        if (e.re > cutoff) break;
        out.push_back(e);
    }
    return out;
}

double counterexample_partial_sum(int levels, std::int64_t n) {
    check_levels(levels);
    if (n < 2) throw DomainError("counterexample_partial_sum: n must be >= 2");
    if (n >= counterexample_k(levels + 1))
        throw DomainError("counterexample_partial_sum: n beyond the last level");
    double sum = 0.0;
    for (int l = 1; l <= levels; ++l) {
        const std::int64_t k_lo = counterexample_k(l);
        const std::int64_t k_hi = counterexample_k(l + 1) - 1; // block covers [k_lo, k_hi]
        if (n >= k_hi) {
            sum += static_cast<double>(l); // full block sums to exactly l
        } else if (n >= k_lo) {
            const std::int64_t m = k_hi + 1 - k_lo;
            sum += static_cast<double>(n - k_lo + 1) * static_cast<double>(l) /
                   static_cast<double>(m);
        }
    }
    return sum;
}

ViolationWitness counterexample_violation_witness(int levels, double c) {
    check_levels(levels);
    if (!(c > 1.0)) throw DomainError("violation witness: need c > 1");
    const int m = static_cast<int>(std::ceil(c));
    if (m > levels)
        throw DomainError("violation witness: ceil(c) exceeds the available levels");
    const std::int64_t n = counterexample_k(m + 1) - 1;
    const std::int64_t mult = counterexample_k(m + 1) - counterexample_k(m);
    ViolationWitness w;
    w.index = n;
    w.s_value = static_cast<double>(m) / static_cast<double>(mult);
    w.threshold = c / static_cast<double>(n);
    return w;
}

} // namespace spectral
