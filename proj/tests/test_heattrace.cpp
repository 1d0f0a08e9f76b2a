#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "spectral/heattrace.hpp"

using namespace spectral;

TEST_SUITE_BEGIN("heattrace");

namespace {
const Spectrum kIdentity = Spectrum::power_law(1.0, 1.0); // lambda_k = k
}

TEST_CASE("geometric closed forms for lambda_k = k") {
    for (const double t : {0.01, 0.1, 1.0}) {
        const TraceValue v0 = trace_power(kIdentity, t, 0);
        CHECK(v0.value.real() == doctest::Approx(1.0 / std::expm1(t)).epsilon(1e-12));
        CHECK(v0.value.imag() == 0.0);
        CHECK(v0.tail_certified);

        const TraceValue v1 = trace_power(kIdentity, t, 1);
        const double closed = std::exp(t) / (std::expm1(t) * std::expm1(t));
        CHECK(v1.value.real() == doctest::Approx(closed).epsilon(1e-11));
    }
}

TEST_CASE("single zero eigenvalue") {
    const Spectrum s = Spectrum::explicit_list({{0.0, 0.0, 1}});
    CHECK(trace_power(s, 0.7, 0).value.real() == 1.0);
    CHECK_THROWS_AS(trace_power(s, 0.7, -1), DomainError);
}

TEST_CASE("complex line closed form") {
    const double c = 2.0, t = 0.3;
    const Spectrum s = Spectrum::complex_line(c);
    const TraceValue v = trace_power(s, t, 0);
    const std::complex<double> closed =
        1.0 / (std::exp(std::complex<double>(t, c * t)) - 1.0);
    CHECK(v.value.real() == doctest::Approx(closed.real()).epsilon(1e-11));
    CHECK(v.value.imag() == doctest::Approx(closed.imag()).epsilon(1e-11));
    // norm side is the real geometric series
    CHECK(v.norm_value == doctest::Approx(1.0 / std::expm1(t)).epsilon(1e-11));
}

TEST_CASE("triangular complex trace and norm") {
    const Spectrum s = Spectrum::triangular_complex();
    for (const double t : {0.01, 0.1}) {
        const double sh = 2.0 * std::sinh(t / 2.0);
        CHECK(trace_norm_power(s, t, 0).norm_value ==
              doctest::Approx(1.0 / (sh * sh)).epsilon(1e-10));
    }
    const TraceValue v = trace_power(s, 1e-3, 0);
    CHECK(std::fabs(v.value.real() - (-1.0 / 12.0)) <= 1e-3);
    CHECK(std::fabs(v.value.imag() * 1e-6 - (-0.5)) <= 1e-3);
}

TEST_CASE("triangular trace against the rational closed forms") {
    // Re/Im of sum_k k e^{-t(1+i)k} in elementary functions
    const Spectrum s = Spectrum::triangular_complex();
    for (const double t : {0.05, 0.3, 1.0}) {
        const double et = std::exp(t);
        const double den = std::pow(et * et - 2.0 * et * std::cos(t) + 1.0, 2.0);
        const double re = ((et * et * et + et) * std::cos(t) - 2.0 * et * et) / den;
        const double im = -(et * et * et - et) * std::sin(t) / den;
        const TraceValue v = trace_power(s, t, 0);
        CHECK(v.value.real() == doctest::Approx(re).epsilon(1e-11));
        CHECK(v.value.imag() == doctest::Approx(im).epsilon(1e-11));
    }
}

TEST_CASE("complex line modulus ratio at small t") {
    // |Tr| / ||.||_1 tends to (1+c^2)^{-1/2}
    const double c = 2.0;
    const Spectrum s = Spectrum::complex_line(c);
    const TraceValue v = trace_power(s, 1e-4, 0);
    CHECK(std::abs(v.value) / v.norm_value ==
          doctest::Approx(1.0 / std::sqrt(1.0 + c * c)).epsilon(1e-3));
}

TEST_CASE("nonholomorphic norm sandwich") {
    const Spectrum s = Spectrum::nonholomorphic();
    const double t = 0.01;
    const double f2 = (std::exp(t) + std::exp(2.0 * t)) / std::pow(std::expm1(t), 3.0);
    const double norm = trace_norm_power(s, t, 1).norm_value;
    CHECK(norm > f2);
    CHECK(norm < std::sqrt(2.0) * f2);
}

TEST_CASE("power-law sandwich and small-t ratio") {
    for (const double p : {0.5, 1.0, 2.0, 3.0}) {
        const Spectrum s = Spectrum::power_law(p, 1.0);
        const double gp = spectral::gamma(1.0 + p);
        for (double t = 1.0; t >= 0.01; t *= 0.66) {
            const double theta = trace_power(s, t, 0).value.real();
            CHECK(std::fabs(theta - gp * std::pow(t, -p)) <= 1.0);
        }
        const double ratio =
            trace_power(s, 1e-5, 0).value.real() * std::pow(1e-5, p) / gp;
        CHECK(ratio >= 0.99);
        CHECK(ratio <= 1.01);
    }
}

TEST_CASE("monotone divergence over a decreasing grid") {
    for (const Spectrum& s :
         {Spectrum::power_law(2.0, 1.0), Spectrum::primes(1'000'000), Spectrum::log_law(1.0)}) {
        double prev = 0.0;
        for (double t = 0.5; t >= 1e-3; t *= 0.5) {
            const double v = trace_power(s, t, 0).value.real();
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("modulus of the trace is dominated by the norm") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ut(1e-3, 1.0);
    for (const Spectrum& s : {Spectrum::complex_line(1.5), Spectrum::triangular_complex(),
                              Spectrum::nonholomorphic()}) {
        for (int it = 0; it < 20; ++it) {
            const double t = ut(rng);
            for (const int n : {0, 1, 2}) {
                const TraceValue v = trace_power(s, t, n);
                CHECK(std::abs(v.value) <= v.norm_value * (1.0 + 1e-12) + v.tail_bound);
            }
        }
    }
}

TEST_CASE("tail certificate: doubling the cutoff moves the value less than the bound") {
    for (const Spectrum& s : {Spectrum::primes(1'000'000), Spectrum::power_law(1.0, 1.0)}) {
        const TraceValue a = trace_power(s, 0.005, 0);
        TraceOptions more;
        more.min_terms = 2 * a.truncation_index;
        const TraceValue b = trace_power(s, 0.005, 0, more);
        CHECK(std::fabs(a.value.real() - b.value.real()) <= a.tail_bound + 1e-13 * b.value.real());
    }
}

TEST_CASE("semigroup consistency against a brute-force sum") {
    const double t1 = 0.4, t2 = 0.35;
    double brute = 0.0;
    for (int k = 200; k >= 1; --k) brute += std::exp(-(t1 + t2) * k);
    CHECK(trace_power(kIdentity, t1 + t2, 0).value.real() ==
          doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("negative real parts are shifted exactly") {
    const Spectrum s = Spectrum::explicit_list({{-2.0, 0.0, 1}, {1.0, 0.0, 1}, {3.0, 0.0, 1}});
    const double t = 0.7;
    const TraceValue v0 = trace_power(s, t, 0);
    CHECK(v0.value.real() ==
          doctest::Approx(std::exp(2.0 * t) + std::exp(-t) + std::exp(-3.0 * t)).epsilon(1e-13));
    const TraceValue v1 = trace_power(s, t, 1);
    CHECK(v1.value.real() ==
          doctest::Approx(-2.0 * std::exp(2.0 * t) + std::exp(-t) + 3.0 * std::exp(-3.0 * t))
              .epsilon(1e-12));
    CHECK(v1.norm_value ==
          doctest::Approx(2.0 * std::exp(2.0 * t) + std::exp(-t) + 3.0 * std::exp(-3.0 * t))
              .epsilon(1e-12));
}

TEST_CASE("counterexample trace equals the block sum") {
    const Spectrum cex = Spectrum::counterexample(3);
    const double t = 0.4;
    double brute = 0.0;
    for (int l = 1; l <= 3; ++l) {
        const std::int64_t m = (std::int64_t{1} << ((l + 1) * (l + 1))) -
                               (std::int64_t{1} << (l * l));
        brute += double(m) * std::exp(-t * double(l) / double(m));
    }
    const TraceValue v = trace_power(cex, t, 0);
    CHECK(v.value.real() == doctest::Approx(brute).epsilon(1e-13));
    CHECK(v.tail_certified);
    CHECK(v.tail_bound == 0.0);
}

TEST_CASE("domain and budget errors") {
    CHECK_THROWS_AS(trace_power(kIdentity, 0.0, 0), DomainError);
    CHECK_THROWS_AS(trace_power(kIdentity, -1.0, 0), DomainError);
    // sieve far too small for this t: tail cannot be certified
    CHECK_THROWS_AS(trace_power(Spectrum::primes(1000), 1e-6, 0), BudgetError);
    try {
        trace_power(Spectrum::primes(1000), 1e-6, 0);
    } catch (const BudgetError& e) {
        CHECK(e.best_tail_bound > 0.0);
    }
}

TEST_CASE("imaginary defect inequality") {
    const ImaginaryDefect real_case = imaginary_defect(kIdentity, 0.2);
    CHECK(std::abs(real_case.defect) <= 1e-12);
    CHECK(real_case.holds);

    CHECK(imaginary_defect(Spectrum::complex_line(1.0), 0.5).holds);
    CHECK(imaginary_defect(Spectrum::triangular_complex(), 0.01).holds);
}

TEST_CASE("integral proxy") {
    RVSpec linear{1.0, 1.0, 0.0, 0, LogMode::Shifted};
    CHECK(integral_proxy(linear, 0.25) == doctest::Approx(4.0).epsilon(1e-8));

    RVSpec sqrt_law{1.0, 0.5, 0.0, 0, LogMode::Shifted}; // f(x) = x^{1/2}
    CHECK(integral_proxy(sqrt_law, 0.1) ==
          doctest::Approx(spectral::gamma(3.0) * std::pow(0.1, -2.0)).epsilon(1e-8));

    const double gauss = integral_proxy([](double x) { return x * x; }, 1.0);
    CHECK(gauss == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-8));

    CHECK_THROWS_AS(integral_proxy([](double x) { return std::log1p(x); }, 0.5),
                    DivergenceError);
}

TEST_CASE("cavalieri identity") {
    const Spectrum one = Spectrum::explicit_list({{1.0, 0.0, 1}});
    const CavalieriCheck c1 = cavalieri_check(one, 0.8);
    CHECK(c1.lhs == doctest::Approx(std::exp(-0.8)).epsilon(1e-12));
    CHECK(c1.rhs == doctest::Approx(std::exp(-0.8)).epsilon(1e-9));

    CHECK(cavalieri_check(kIdentity, 0.5).rel_gap <= 1e-8);
    CHECK(cavalieri_check(Spectrum::primes(100000), 0.01).rel_gap <= 1e-6);
}

TEST_CASE("engine agrees with a brute-force sum across models and powers") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ut(0.05, 1.0);
    const std::vector<Spectrum> models{
        Spectrum::power_law(1.3, 0.7), Spectrum::power_law(0.5, 2.0),
        Spectrum::primes(100000),      Spectrum::log_law(2.0),
        Spectrum::triangular_complex(), Spectrum::nonholomorphic(),
        Spectrum::complex_line(0.5)};
    for (const auto& s : models) {
        for (int it = 0; it < 6; ++it) {
            const double t = ut(rng);
            for (const int n : {0, 1, 2, -1}) {
                if (n < 0 && !(s.min_real_part() > 0.0)) continue;
                std::complex<double> brute{0.0, 0.0};
                double brute_norm = 0.0;
                for (std::int64_t k = 0; k < 2'000'000; ++k) {
                    const EigenEntry e = s.entry(k);
                    if (t * e.re > 60.0) break;
                    std::complex<double> lam{e.re, e.im};
                    std::complex<double> pw{1.0, 0.0};
                    for (int j = 0; j < std::abs(n); ++j) pw *= lam;
                    if (n < 0) pw = 1.0 / pw;
                    brute += double(e.mult) * pw * std::exp(-t * lam);
                    brute_norm += double(e.mult) * std::pow(std::abs(lam), n) * std::exp(-t * e.re);
                }
                const TraceValue v = trace_power(s, t, n);
                const double slack = v.tail_bound + 1e-11 * v.norm_value + 1e-13;
                CHECK(std::abs(v.value - brute) <= slack);
                CHECK(std::fabs(v.norm_value - brute_norm) <= slack);
            }
        }
    }
}

TEST_CASE("mellin resolvent-power identity") {
    const Spectrum zero = Spectrum::explicit_list({{0.0, 0.0, 1}});
    const MellinCheck m3 = mellin_power(zero, 3.0, 1.0);
    CHECK(m3.series == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m3.integral == doctest::Approx(1.0).epsilon(1e-6));

    const MellinCheck basel = mellin_power(kIdentity, 2.0, 1.0);
    const double target = M_PI * M_PI / 6.0 - 1.0;
    CHECK(basel.series == doctest::Approx(target).epsilon(1e-6));
    CHECK(basel.integral == doctest::Approx(target).epsilon(1e-6));
    CHECK(basel.rel_gap <= 2e-6);

    CHECK_THROWS_AS(mellin_power(kIdentity, 1.0, 1.0), DivergenceError);
    CHECK_THROWS_AS(mellin_power(Spectrum::triangular_complex(), 3.0, 1.0), DomainError);
}

TEST_CASE("raw-log laws are rejected by the integral proxy") {
    RVSpec raw{1.0, 1.0, -1.0, 1, LogMode::Raw};
    CHECK_THROWS_AS(integral_proxy(raw, 0.1), UsageError);
}

TEST_SUITE_END();
