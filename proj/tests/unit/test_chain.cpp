#include <cmath>
#include <numbers>
#include <numeric>

#include <doctest.h>

#include "evanescent/chain.hpp"
#include "evanescent/moments.hpp"
#include "evanescent/volume.hpp"
#include "../oracles/ode.hpp"

using namespace evanescent;

namespace {
double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }
}  // namespace

TEST_CASE("Gibbs sampling moments") {
    ModelParams p;
    const std::size_t L = 100000;
    const auto s = sample_gibbs(p, L, 11);
    CHECK(std::abs(mean_of(s.omega)) < 4 / std::sqrt(double(L)));
    std::vector<double> sq(L);
    for (std::size_t i = 0; i < L; ++i) sq[i] = s.omega[i] * s.omega[i];
    CHECK(std::abs(mean_of(sq) - 1) < 4 * std::sqrt(2.0 / L));

    p.beta = 4;
    const auto s4 = sample_gibbs(p, L, 12);
    for (std::size_t i = 0; i < L; ++i) sq[i] = s4.omega[i] * s4.omega[i];
    // variance 1/beta, and Var(w^2) = 2/beta^2
    CHECK(std::abs(mean_of(sq) - 0.25) < 4 * std::sqrt(2.0 / 16 / L));

    const auto again = sample_gibbs(p, L, 12);
    CHECK(again.omega == s4.omega);
}

TEST_CASE("free evolution: fixed points, identity, ODE oracle") {
    ChainState ones = make_state(std::vector<double>(16, 1.0));
    CHECK(evolve_free(ones, 3.1).omega == ones.omega);

    ModelParams p;
    const ChainState s = sample_gibbs(p, 32, 3);
    CHECK(evolve_free(s, 0.0).omega == s.omega);

    const std::size_t L = 32;
    const int k = 3;
    std::vector<double> w(L);
    for (std::size_t x = 0; x < L; ++x) w[x] = std::cos(2 * std::numbers::pi * k * double(x) / L);
    const ChainState out = evolve_free(make_state(w), 1.7);
    const auto ref = oracle::free_chain_ode(w, 1.7);
    double worst = 0;
    for (std::size_t x = 0; x < L; ++x) worst = std::max(worst, std::abs(out.omega[x] - ref[x]));
    CHECK(worst < 1e-8);
    CHECK(std::abs(out.energy() / make_state(w).energy() - 1) < 1e-12);
}

TEST_CASE("flip and exchange") {
    ChainState s = make_state({1, 2, 3, 4});
    apply_flip(s, 0);
    CHECK(s.omega == std::vector<double>{-1, 2, 3, 4});
    CHECK(s.energy() == 30.0);
    apply_flip(s, 0);
    CHECK(s.omega == std::vector<double>{1, 2, 3, 4});

    apply_exchange(s, 1);
    CHECK(s.omega == std::vector<double>{1, 3, 2, 4});
    CHECK(s.volume() == 10.0);
    CHECK(s.energy() == 30.0);
    apply_exchange(s, 1);
    CHECK(s.omega == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("simulation without noise is free evolution") {
    ModelParams p;
    p.c = 0;
    p.lambda = 0;
    const ChainState s = sample_gibbs(p, 64, 5);
    const auto r = simulate(s, p, 2.5, 9);
    CHECK(r.log.empty());
    CHECK(r.events == 0);
    const ChainState f = evolve_free(s, 2.5);
    for (std::size_t x = 0; x < 64; ++x) CHECK(r.state.omega[x] == doctest::Approx(f.omega[x]).epsilon(1e-12));
}

TEST_CASE("event count is Poisson with mean R T") {
    ModelParams p;
    p.n = 16;
    const std::size_t L = 32;
    const double T = 0.8;
    const double R = (p.gamma() + p.lambda) * L;
    std::vector<double> counts;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        counts.push_back(double(simulate(make_state(std::vector<double>(L, 0.0)), p, T, seed).events));
    const double m = mean_of(counts);
    CHECK(std::abs(m - R * T) < 4 * std::sqrt(R * T / 200));
}

TEST_CASE("energy drift over many events") {
    ModelParams p;
    p.n = 4;
    const ChainState s = sample_gibbs(p, 1024, 21);
    const double R = (p.gamma() + p.lambda) * 1024;
    const auto r = simulate(s, p, 1e4 / R, 22);
    CHECK(r.events > 9000);
    CHECK(std::abs(r.state.energy() / s.energy() - 1) < 1e-9);
}

TEST_CASE("simulation is a pure function of the seed") {
    ModelParams p;
    const ChainState s = sample_gibbs(p, 64, 1);
    const auto a = simulate(s, p, 3.0, 77), b = simulate(s, p, 3.0, 77);
    CHECK(a.state.omega == b.state.omega);
    CHECK(a.events == b.events);
}

TEST_CASE("event budget stops the run and flags it") {
    ModelParams p;
    SimOptions o;
    o.max_events = 5;
    const auto r = simulate(sample_gibbs(p, 64, 1), p, 100.0, 3, o);
    CHECK_FALSE(r.complete);
    CHECK(r.events == 5);
}

TEST_CASE("energy correlation estimate: t = 0 and total mass") {
    ModelParams p;
    p.n = 8;
    p.a = 1;
    const auto k0 = estimate_energy_correlation(p, 0.0, 4, 16, 1);
    CHECK(k0.mean[0] == 2.0);
    for (std::size_t z = 1; z < 16; ++z) CHECK(k0.mean[z] == 0.0);

    const auto k = estimate_energy_correlation(p, 0.3, 64, 16, 2);
    // every path is orthogonal, so the sum is exact per replica
    CHECK(std::accumulate(k.mean.begin(), k.mean.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("flow estimate matches Gaussian initial data Monte Carlo at L = 8") {
    ModelParams p;
    p.n = 4;
    p.a = 1;
    const double t = 0.1;
    const std::size_t L = 8;
    const auto flow = estimate_energy_correlation(p, t, 4000, L, 5);
    const auto direct = estimate_energy_correlation_gibbs(p, p.horizon(t), 200000, L, 6);
    for (std::size_t z = 0; z < L; ++z) {
        const double se = std::hypot(flow.stderr_[z], direct.stderr_[z]);
        CHECK(std::abs(flow.mean[z] - direct.mean[z]) < 4 * se + 1e-12);
    }
}

TEST_CASE("volume correlation: t = 0, total decay and closed form per mode") {
    ModelParams p;
    p.n = 8;
    p.a = 1;
    const auto v0 = estimate_volume_correlation(p, 0.0, 4, 16, 1);
    CHECK(v0.mean[0] == 1.0);

    const std::size_t L = 256;
    const double t = 0.5;
    EstimatorOptions opt;
    opt.threads = 4;
    const auto v = estimate_volume_correlation(p, t, 4000, L, 8, opt);
    double sum = 0, se_bound = 0;
    for (std::size_t z = 0; z < L; ++z) {
        sum += v.mean[z];
        se_bound += v.stderr_[z];
    }
    // se_bound dominates the standard error of the sum whatever the correlations
    CHECK(std::abs(sum - std::exp(-2 * p.gamma() * p.horizon(t))) < 4 * se_bound);
    CHECK(std::abs(v.theta_re[0] - sum) < 1e-12);

    for (std::size_t k = 0; k <= L / 2; ++k) {
        const cplx ref = volume_hat(double(k) / L, p.horizon(t), p);
        CHECK(std::abs(v.theta_re[k] - ref.real()) < 4 * v.theta_re_se[k] + 1e-12);
        CHECK(std::abs(v.theta_im[k] - ref.imag()) < 4 * v.theta_im_se[k] + 1e-12);
    }
}

TEST_CASE("threads do not change the estimate") {
    ModelParams p;
    p.n = 8;
    p.a = 1;
    EstimatorOptions one, four;
    four.threads = 4;
    const auto a = estimate_energy_correlation(p, 0.2, 200, 16, 3, one);
    const auto b = estimate_energy_correlation(p, 0.2, 200, 16, 3, four);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
}
