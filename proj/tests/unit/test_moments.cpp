#include <cmath>
#include <numbers>
#include <numeric>

#include <doctest.h>

#include "evanescent/chain.hpp"
#include "evanescent/moments.hpp"
#include "evanescent/volume.hpp"
#include "../oracles/generator_enumeration.hpp"

using namespace evanescent;

TEST_CASE("pair generator equals the term-by-term expansion on L = 6") {
    ModelParams p;
    p.n = 4;
    p.lambda = 0.7;
    const std::size_t L = 6;
    const PairGenerator g = build_pair_generator(p, L);
    PairCorrelation shape(L);
    double worst = 0;
    for (std::size_t x = 0; x < L; ++x)
        for (std::size_t y = x; y < L; ++y) {
            const auto poly = oracle::apply_generator({x, y}, L, p.gamma(), p.lambda);
            for (std::size_t u = 0; u < L; ++u)
                for (std::size_t v = u; v < L; ++v) {
                    auto it = poly.find({u, v});
                    const double want = it == poly.end() ? 0.0 : it->second;
                    worst = std::max(worst, std::abs(g.entry(shape.index(x, y), shape.index(u, v)) - want));
                }
        }
    CHECK(worst < 1e-14);
}

TEST_CASE("flip term sits only on off-diagonal entries") {
    ModelParams p;
    p.lambda = 0;
    p.n = 4;
    const std::size_t L = 8;
    const PairGenerator g = build_pair_generator(p, L);
    PairCorrelation s(L);
    CHECK(g.entry(s.index(1, 4), s.index(1, 4)) == doctest::Approx(-4 * p.gamma()));
    CHECK(g.entry(s.index(2, 2), s.index(2, 2)) == 0.0);
}

TEST_CASE("pure drift conserves the trace; exchange fixes the identity") {
    ModelParams p;
    p.lambda = 0;
    p.c = 0;
    PairCorrelation c = PairCorrelation::unit_at_origin(10);
    c.at(3, 5) = 0.2;
    const auto out = evolve_pair(c, p, 2.0, 0.01);
    CHECK(out.trace() == doctest::Approx(c.trace()).epsilon(1e-10));

    p.lambda = 1;
    const std::size_t L = 8;
    PairCorrelation id(L);
    for (std::size_t x = 0; x < L; ++x) id.at(x, x) = 1.0 / L;
    const PairGenerator g = build_pair_generator(p, L);
    std::vector<double> out_id(id.packed().size());
    g.apply(id.packed(), out_id);
    for (double v : out_id) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("T = 0 leaves C unchanged; trace conserved over the horizon") {
    ModelParams p;
    p.n = 16;
    PairCorrelation c = PairCorrelation::unit_at_origin(12);
    const auto same = evolve_pair(c, p, 0.0, 0.01);
    CHECK(same.packed() == c.packed());
    EvolveReport rep;
    const auto out = evolve_pair(c, p, 5.0, stable_step(p), &rep);
    CHECK(std::abs(out.trace() - 1) < 1e-8);
    CHECK(rep.trace_drift < 1e-8);
}

TEST_CASE("pair moments match flow Monte Carlo at L = 8") {
    ModelParams p;
    p.n = 4;
    const std::size_t L = 8;
    const double T = 0.4;
    const auto c = evolve_pair(PairCorrelation::unit_at_origin(L), p, T, stable_step(p) / 4);
    const auto mc = estimate_pair_moments(p, T, 20000, L, 31);
    for (std::size_t x = 0; x < L; ++x)
        for (std::size_t y = 0; y < L; ++y)
            CHECK(std::abs(c(x, y) - mc.mean[x * L + y]) < 4 * mc.stderr_[x * L + y] + 1e-12);
}

TEST_CASE("energy kernel: t = 0, conserved mass, sector route equals dense route") {
    ModelParams p;
    p.n = 8;
    p.a = 1;
    const auto k0 = energy_kernel(p, 0.0, 16, stable_step(p));
    CHECK(k0.S[0] == 2.0);
    for (std::size_t z = 1; z < 16; ++z) CHECK(k0.S[z] == 0.0);

    const auto k = energy_kernel(p, 1.0, 16, stable_step(p));
    CHECK(std::abs(std::accumulate(k.S.begin(), k.S.end(), 0.0) - 2) < 1e-8);
    const auto d = energy_kernel_dense(p, 1.0, 16, stable_step(p));
    for (std::size_t z = 0; z < 16; ++z) CHECK(std::abs(k.S[z] - d.S[z]) < 1e-10);
}

TEST_CASE("volume kernel: t = 0, total decay, closed form on the ring") {
    ModelParams p;
    p.n = 32;
    p.a = 1.5;
    p.beta = 2;
    const auto m0 = volume_kernel(p, 0.0, 64, stable_step(p));
    CHECK(m0.m[0] == 0.5);

    const std::size_t L = 512;
    const double t = 0.4;
    const auto m = volume_kernel(p, t, L, stable_step(p));
    const double sum = std::accumulate(m.m.begin(), m.m.end(), 0.0);
    CHECK(std::abs(sum - std::exp(-2 * p.gamma() * p.horizon(t)) / p.beta) < 1e-8);

    double worst = 0;
    for (std::size_t z = 0; z < L; ++z) {
        cplx acc = 0;
        for (std::size_t k = 0; k < L; ++k)
            acc += volume_hat(double(k) / L, p.horizon(t), p) *
                   std::polar(1.0, -2 * std::numbers::pi * double(k * z % L) / L);
        worst = std::max(worst, std::abs(acc.real() / L - m.m[z]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("pair field reductions") {
    const TestFunction f = gaussian();
    std::vector<double> kernel(64, 0.0);
    CHECK(pair_field(kernel, f, f, 64) == 0.0);
    // Riemann sums of a Gaussian converge faster than any power
    for (long n : {16L, 32L, 64L}) {
        std::vector<double> k(8 * n, 0.0);
        k[0] = 2.0;
        CHECK(std::abs(pair_field(k, f, f, n) - 2 / std::sqrt(2.0)) < 1e-10);
    }
}

TEST_CASE("signed site wraps past the half ring") {
    CHECK(signed_site(0, 8) == 0);
    CHECK(signed_site(3, 8) == 3);
    CHECK(signed_site(7, 8) == -1);
}
