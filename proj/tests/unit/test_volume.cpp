#include <cmath>
#include <numbers>

#include <doctest.h>

#include "evanescent/moments.hpp"
#include "evanescent/volume.hpp"

using namespace evanescent;

namespace {
ModelParams at(double a, double b, long n) {
    ModelParams p;
    p.a = a;
    p.b = b;
    p.n = n;
    return p;
}
// beta^{-1} times the integral of f(u) h(u) for f = h = exp(-pi u^2)
const double overlap = 1 / std::sqrt(2.0);
}  // namespace

TEST_CASE("closed-form multiplier special values") {
    ModelParams p;
    p.beta = 2;
    p.n = 100;
    CHECK(std::abs(volume_hat(0.0, 3.0, p) - cplx(0.5 * std::exp(-2 * p.gamma() * 3), 0)) < 1e-15);
    CHECK(std::abs(volume_hat(0.3, 0.0, p) - cplx(0.5, 0)) < 1e-15);
    for (double th : {0.1, 0.27, 0.5}) {
        const double s = std::sin(std::numbers::pi * th);
        CHECK(std::abs(volume_hat(th, 1.3, p)) ==
              doctest::Approx(0.5 * std::exp(-1.3 * (2 * p.gamma() + 4 * p.lambda * s * s))).epsilon(1e-13));
    }
}

TEST_CASE("eta at t = 0 equals the static pairing and both frames coincide") {
    const TestFunction f = gaussian();
    const ModelParams p = at(1.5, 1.5, 256);
    const double e = eta(f, f, 0.0, p).value, et = eta_tilde(f, f, 0.0, p).value;
    CHECK(e == doctest::Approx(overlap).epsilon(1e-8));
    CHECK(e == doctest::Approx(et).epsilon(1e-12));
}

TEST_CASE("a > 2 makes eta vanish") {
    const TestFunction f = gaussian();
    double prev = 1e300;
    for (long n : {100L, 200L, 400L}) {
        const double v = std::abs(eta(f, f, 0.5, at(2.5, 2, n)).value);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("eta agrees with the moment solver route at n = 128") {
    const TestFunction f = gaussian();
    const ModelParams p = at(1.25, 1.5, 128);
    const double t = 0.3;
    const std::size_t L = 4096;
    const auto m = volume_kernel(p, t, L, stable_step(p));
    // the kernel sits at the later time, so f takes the shifted argument
    const double direct = pair_field(m.m, f, f, p.n);
    CHECK(std::abs(direct - eta(f, f, t, p).value) < 1e-6);
}

TEST_CASE("classification at the case points") {
    CHECK(classify_regime(1, 1.5).label == Regime::transport);
    CHECK(classify_regime(1, 1.5).transport == 2.0);
    const RegimeLabel rt = classify_regime(1, 1);
    CHECK(rt.label == Regime::relaxation_transport);
    CHECK(rt.relaxation == 2.0);
    CHECK(rt.transport == 2.0);
    CHECK(classify_regime(1.5, 1.5).label == Regime::relaxation);
    const RegimeLabel h3 = classify_regime(2, 3);
    CHECK(h3.label == Regime::heat);
    CHECK(h3.diffusion == 1.0);
    CHECK(h3.relaxation == 0.0);
    const RegimeLabel h2 = classify_regime(2, 2);
    CHECK(h2.relaxation == 2.0);
    CHECK(h2.diffusion == 1.0);
    CHECK(classify_regime(2.5, 2).label == Regime::vanish);
    CHECK(classify_regime(0.5, 1.5).label == Regime::no_evolution);
}

TEST_CASE("limit correlations in closed form") {
    const TestFunction f = gaussian();
    ModelParams p;
    CHECK(limit_correlation(classify_regime(0.5, 1.5), f, f, 0.7, p) == doctest::Approx(overlap).epsilon(1e-10));
    CHECK(limit_correlation(classify_regime(1.5, 1.5), f, f, 0.5, p) ==
          doctest::Approx(std::exp(-1.0) * overlap).epsilon(1e-10));
    // transport by 2t: integral of exp(-pi (u - 2t)^2 - pi u^2) = exp(-2 pi t^2) / sqrt2
    CHECK(limit_correlation(classify_regime(1, 1.5), f, f, 0.5, p) ==
          doctest::Approx(std::exp(-2 * std::numbers::pi * 0.25) * overlap).epsilon(1e-10));
    CHECK(limit_correlation(classify_regime(1, 1.5), f, f, 0.0, p) == doctest::Approx(overlap).epsilon(1e-12));
}

TEST_CASE("relaxation plus transport at a = b = 1") {
    const TestFunction f = gaussian();
    const double t = 0.5;
    const double want = std::exp(-2 * t) * std::exp(-2 * std::numbers::pi * t * t) * overlap;
    CHECK(limit_correlation(classify_regime(1, 1), f, f, t, ModelParams{}) == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::abs(eta(f, f, t, at(1, 1, 10000)).value - want) < 1e-2);
}
