#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "evanescent/fourier.hpp"
#include "evanescent/moments.hpp"
#include "evanescent/params.hpp"
#include "evanescent/volume.hpp"

namespace evanescent {

// Energy-side phase diagram: where the macroscopic energy kernel is known and what it is.
enum class EnergyRegime { no_evolution, heat, fractional_heat, open, not_covered };
std::string energy_regime_name(EnergyRegime r);
EnergyRegime classify_energy(double a, double b);

// Diffusivity of the heat limit, lambda = c = 1 gives 1/sqrt(2).
double heat_diffusivity(const ModelParams& p);
// (2/beta^2) (4 pi t kappa)^{-1/2} exp(-u^2 / (4 t kappa))
double heat_target(double u, double t, const ModelParams& p);

enum class TargetKind { heat, fractional };

struct KernelComparison {
    long n = 0;
    std::size_t L = 0;
    std::vector<double> u, kernel, target, target_unreflected;  // kernel is n S(nu)
    double distance = 0;              // relative l2 distance of n S to the target
    double distance_sqrt = 0;         // same with sqrt(n) S
    double distance_unreflected = 0;  // fractional target without the u -> -u reflection
    double skew_kernel = 0, skew_target = 0;
    std::size_t sectors = 0, window = 0;
    double mass = 0;
    double outer_mass = 0;
    bool finite_size_warning = false;
    double seconds = 0;
};

KernelComparison compare_energy_kernel(const ModelParams& p, double t, std::size_t L, TargetKind kind,
                                       const SectorOptions& opt = {});

struct VolumeCase {
    double a = 0, b = 0;
    RegimeLabel label;
    double eta_1000 = 0, eta_10000 = 0, limit = 0;
    double error_1000 = 0, error_10000 = 0;
    bool pass = false;
};

// One point per case of the volume classification, both C(iv) variants included.
std::vector<std::pair<double, double>> volume_case_points();
VolumeCase volume_case(double a, double b, double t = 0.5, const TestFunction& f = gaussian());
struct VolumeSuite {
    std::vector<VolumeCase> cases;
    bool pass = false;
    nlohmann::json to_json() const;
};
VolumeSuite volume_suite(double t = 0.5);

struct SuiteReport {
    std::string which;
    std::vector<KernelComparison> ladder;
    VolumeSuite volume;  // Tvol only
    bool complete = true;
    bool monotone = false;
    double threshold = 0;
    bool pass = false;
    std::string note;
    nlohmann::json to_json() const;
};

ModelParams theorem1_params(long n);
ModelParams theorem2_params(long n);

// which in {"T1", "T2", "Tvol"}; budget_seconds <= 0 means no budget. Tvol runs the volume case points at
// n = 1e3 and 1e4 and ignores ns.
SuiteReport theorem_suite(const std::string& which, const std::vector<long>& ns, double budget_seconds = 0);


// A named measurement against a pinned threshold.
struct Check {
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};
nlohmann::json to_json(const std::vector<Check>& checks);

// Fast deterministic checks: exact identities, lemma bounds and the decay ladders.
std::vector<Check> lemma_checks();

}  // namespace evanescent
