#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "evanescent/params.hpp"

namespace evanescent {

struct ChainState {
    std::vector<double> omega;
    double time = 0;
    double energy0 = 0;

    std::size_t L() const { return omega.size(); }
    double energy() const;
    double volume() const;
};

ChainState make_state(std::vector<double> omega);

enum class NoiseKind { flip, exchange };

struct NoiseEvent {
    double time;
    NoiseKind kind;
    std::size_t site;
};

using NoiseEventLog = std::vector<NoiseEvent>;

ChainState sample_gibbs(const ModelParams& p, std::size_t L, std::uint64_t seed);

// Exact propagator of d omega_x = (omega_{x+1} - omega_{x-1}) dt on a ring of fixed size.
// Owns its transform buffers; not shareable across threads, one per worker.
class FreeEvolver {
public:
    explicit FreeEvolver(std::size_t L);
    ~FreeEvolver();
    FreeEvolver(const FreeEvolver&) = delete;
    FreeEvolver& operator=(const FreeEvolver&) = delete;

    void advance(std::vector<double>& omega, double dt);
    std::size_t size() const { return L_; }

private:
    std::size_t L_;
    double* real_ = nullptr;
    void* spec_ = nullptr;
    std::vector<double> sines_;
};

ChainState evolve_free(ChainState s, double dt);
void apply_flip(ChainState& s, std::size_t x);
void apply_exchange(ChainState& s, std::size_t x);

struct SimOptions {
    // 0 means unlimited; EVANESCENT_MAX_EVENTS is read by event_budget()
    std::uint64_t max_events = 0;
    bool record_log = true;
    double merge_dt = 1e-14;
};

std::uint64_t event_budget(std::uint64_t fallback = 0);

struct SimulationResult {
    ChainState state;
    NoiseEventLog log;
    std::uint64_t events = 0;
    bool complete = true;
};

SimulationResult simulate(ChainState s, const ModelParams& p, double horizon, std::uint64_t seed,
                          const SimOptions& opt = {});
// Variant reusing a caller-owned propagator and RNG stream index.
SimulationResult simulate(ChainState s, const ModelParams& p, double horizon, std::uint64_t seed,
                          std::uint64_t stream, FreeEvolver& ev, const SimOptions& opt);

struct EstimatorOptions {
    unsigned threads = 1;
    std::uint64_t max_events = 0;
    double boundary_fraction = 0.1;
    double boundary_threshold = 1e-6;
};

struct KernelEstimate {
    std::vector<double> mean;
    std::vector<double> stderr_;
    std::uint64_t events = 0;
    double boundary_mass = 0;
    bool finite_size_warning = false;
    // per-replica Fourier coefficients sum_z v_z e^{2i pi k z / L}, kept for theta-resolved checks
    std::vector<double> theta_re, theta_im, theta_re_se, theta_im_se;
};

KernelEstimate estimate_energy_correlation(const ModelParams& p, double t, std::size_t replicas,
                                           std::size_t L, std::uint64_t seed,
                                           const EstimatorOptions& opt = {});
KernelEstimate estimate_volume_correlation(const ModelParams& p, double t, std::size_t replicas,
                                           std::size_t L, std::uint64_t seed,
                                           const EstimatorOptions& opt = {});

// E[v_x v_y] over replicas, row-major L x L, with standard errors.
struct PairEstimate {
    std::size_t L = 0;
    std::vector<double> mean, stderr_;
};
PairEstimate estimate_pair_moments(const ModelParams& p, double horizon, std::size_t replicas,
                                   std::size_t L, std::uint64_t seed, const EstimatorOptions& opt = {});

// Direct estimate of <omega_z(T)^2 (omega_0(0)^2 - 1/beta)> from Gibbs initial data.
KernelEstimate estimate_energy_correlation_gibbs(const ModelParams& p, double horizon, std::size_t replicas,
                                                 std::size_t L, std::uint64_t seed,
                                                 const EstimatorOptions& opt = {});

// Fraction of |kernel| carried by the outer `fraction` of the ring (both sides of the seam).
double outer_mass_fraction(const std::vector<double>& kernel, double fraction = 0.1);

}  // namespace evanescent
