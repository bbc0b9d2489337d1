#include <cmath>
#include <numbers>

#include <doctest.h>

#include "evanescent/fourier.hpp"

using namespace evanescent;

TEST_CASE("zero test function has zero transform") {
    const SpectralFunction s = discrete_ft(zero_function(), 64);
    for (const cplx& v : s.values) CHECK(v == cplx(0, 0));
    SpectralFunction z = s;
    CHECK(inverse_discrete_ft(z, 64, 3).value == 0.0);
}

TEST_CASE("transform at the origin matches a direct Riemann sum") {
    const long n = 64;
    double riemann = 0;
    for (long x = -20 * n; x <= 20 * n; ++x) {
        const double u = static_cast<double>(x) / n;
        riemann += std::exp(-std::numbers::pi * u * u);
    }
    riemann /= n;
    const TestFunction f = gaussian();
    CHECK(std::abs(discrete_ft_at(f, n, 0.0).real() - riemann) < 1e-10);
    CHECK(std::abs(discrete_ft_poisson(f, n, 0.0).real() - riemann) < 1e-10);
    CHECK(riemann == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lattice sum and Poisson route agree") {
    const TestFunction f = gaussian_odd(1, 0.7, 0.3);
    for (double xi : {-20.0, -3.3, 0.0, 1.7, 31.0})
        CHECK(std::abs(discrete_ft_at(f, 64, xi) - discrete_ft_poisson(f, 64, xi)) < 1e-12);
}

TEST_CASE("transform defect decreases as n doubles") {
    // A narrow Gaussian keeps the aliasing error above roundoff over the whole ladder.
    const TestFunction f = gaussian(1, 0.02);
    double prev = 1e300;
    for (long n = 32; n <= 256; n *= 2) {
        const SpectralFunction s = discrete_ft(f, n);
        double worst = 0;
        for (std::size_t j = 0; j < s.size(); ++j) worst = std::max(worst, std::abs(s.values[j] - f.ft(s.node(j))));
        CHECK(worst < prev);
        prev = worst;
    }
}

TEST_CASE("round trip recovers the samples") {
    const long n = 64;
    const TestFunction f = gaussian();
    const SpectralFunction s = discrete_ft(f, n);
    for (long x = -8; x <= 8; ++x) {
        const InverseResult r = inverse_discrete_ft(s, n, x);
        CHECK(std::abs(r.value - f(static_cast<double>(x) / n)) < 1e-8);
        CHECK(std::abs(r.imag) < 1e-8);
    }
}

TEST_CASE("constant spectral function inverts to beta^-1 n at the origin") {
    const long n = 32;
    const double beta = 2;
    SpectralFunction s{-n / 2.0, n / 2.0, std::vector<cplx>(256, cplx(1 / beta, 0))};
    CHECK(inverse_discrete_ft(s, n, 0).value == doctest::Approx(n / beta).epsilon(1e-12));
    CHECK(std::abs(inverse_discrete_ft(s, n, 5).value) < 1e-9);
}

TEST_CASE("decay constant: bounded in n, zero for zero") {
    const TestFunction f = gaussian();
    double lo = 1e300, hi = 0;
    for (long n = 32; n <= 256; n *= 2) {
        const double c = decay_constant(f, n, 3);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    CHECK(hi / lo < 1.01);
    CHECK(decay_constant(zero_function(), 64, 3) == 0.0);
}

TEST_CASE("decay constant is nondecreasing in p once the transform lives beyond |xi| = 1") {
    const TestFunction narrow = gaussian(20, 0.05);
    double prev = 0;
    for (int p = 1; p <= 6; ++p) {
        const double c = decay_constant(narrow, 64, p);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("decay constant of exp(-pi x^2) is not monotone in p") {
    // the weight 1 + |xi|^p decreases in p for |xi| < 1, where this transform carries its mass
    const TestFunction f = gaussian();
    const double p1 = decay_constant(f, 64, 1), p2 = decay_constant(f, 64, 2);
    MESSAGE("p = 1: " << p1 << ", p = 2: " << p2);
    CHECK(p1 > p2);
}

TEST_CASE("lattice Parseval") {
    for (long n : {16L, 64L}) {
        const TestFunction f = gaussian_odd(1, 0.7, 0.3);
        CHECK(spectral_norm2(discrete_ft(f, n)) == doctest::Approx(lattice_norm2(f, n)).epsilon(1e-10));
    }
}
