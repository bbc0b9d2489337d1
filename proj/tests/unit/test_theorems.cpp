#include <cmath>
#include <numbers>

#include <doctest.h>

#include "evanescent/quadrature.hpp"
#include "evanescent/theorems.hpp"

using namespace evanescent;

TEST_CASE("energy phase diagram") {
    CHECK(classify_energy(1.75, 0.5) == EnergyRegime::heat);
    CHECK(classify_energy(1.5, 2) == EnergyRegime::fractional_heat);
    CHECK(classify_energy(1.0, 0.5) == EnergyRegime::no_evolution);
    CHECK(classify_energy(1.9, 0.5) == EnergyRegime::not_covered);
    CHECK(classify_energy(1.5, 0.8) == EnergyRegime::open);
    CHECK(classify_energy(1.0, 0.8) == EnergyRegime::no_evolution);
    CHECK(classify_energy(1.6, 3) == EnergyRegime::not_covered);
    CHECK(energy_regime_name(EnergyRegime::fractional_heat) == "fractional-heat");
}

TEST_CASE("heat diffusivity and the double Gaussian integral") {
    ModelParams p;
    CHECK(heat_diffusivity(p) == doctest::Approx(1 / std::sqrt(2.0)));
    const double t = 1, kappa = heat_diffusivity(p);
    // self-convolution of exp(-pi x^2) is exp(-pi w^2 / 2) / sqrt2
    const double numeric = integrate(
        [&](double w) { return std::exp(-std::numbers::pi * w * w / 2) / std::sqrt(2.0) * heat_target(w, t, p); }, -30, 30,
        1e-13);
    const double closed = 2 / std::sqrt(2.0) / std::sqrt(4 * std::numbers::pi * t * kappa) *
                          std::sqrt(std::numbers::pi / (std::numbers::pi / 2 + 1 / (4 * t * kappa)));
    CHECK(numeric == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("volume suite reports transport 2 grad at (1, 1.5)") {
    const SuiteReport r = theorem_suite("Tvol", {});
    bool seen = false;
    for (const VolumeCase& c : r.volume.cases) {
        if (c.a != 1 || c.b != 1.5) continue;
        seen = true;
        CHECK(c.label.label == Regime::transport);
        CHECK(c.label.transport == 2.0);
        CHECK(c.error_10000 < 1e-2);
        CHECK(c.error_10000 < c.error_1000);
    }
    CHECK(seen);
    CHECK(r.pass);
    CHECK(r.to_json()["volume"]["cases"].size() == 15);
}

TEST_CASE("small energy kernel comparison is finite and normalised") {
    const KernelComparison k = compare_energy_kernel(theorem1_params(16), 1.0, 256, TargetKind::heat);
    CHECK(k.mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::isfinite(k.distance));
    CHECK(k.distance < 1);
}

TEST_CASE("theorem suite honours the budget") {
    const SuiteReport r = theorem_suite("T1", {16, 32, 64}, 1e-9);
    CHECK_FALSE(r.complete);
    CHECK_FALSE(r.pass);
    CHECK(r.to_json()["complete"] == false);
    CHECK_THROWS_AS(theorem_suite("T3", {16}), ConfigError);
}

TEST_CASE("lemma checks all pass") {
    for (const Check& c : lemma_checks()) {
        INFO(c.name << " = " << c.value << " (threshold " << c.threshold << ")");
        CHECK(c.pass);
    }
}
