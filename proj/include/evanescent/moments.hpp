#pragma once

#include <cstddef>
#include <vector>

#include "evanescent/fourier.hpp"
#include "evanescent/params.hpp"

namespace evanescent {

// Symmetric L x L matrix stored as its packed upper triangle.
class PairCorrelation {
public:
    explicit PairCorrelation(std::size_t L = 4);
    static PairCorrelation unit_at_origin(std::size_t L);

    std::size_t L() const { return L_; }
    std::size_t index(std::size_t x, std::size_t y) const;
    double operator()(std::size_t x, std::size_t y) const { return data_[index(x, y)]; }
    double& at(std::size_t x, std::size_t y) { return data_[index(x, y)]; }
    double trace() const;

    std::vector<double>& packed() { return data_; }
    const std::vector<double>& packed() const { return data_; }

    double time = 0;

private:
    std::size_t L_;
    std::vector<double> data_;
};

// d/dt C = G C on packed storage, in compressed rows.
struct PairGenerator {
    std::size_t L = 0;
    std::vector<std::size_t> row_start;
    std::vector<std::size_t> column;
    std::vector<double> value;

    std::size_t dimension() const { return row_start.empty() ? 0 : row_start.size() - 1; }
    double entry(std::size_t row, std::size_t col) const;
    void apply(const std::vector<double>& in, std::vector<double>& out) const;
};

PairGenerator build_pair_generator(const ModelParams& p, std::size_t L);

double stable_step(const ModelParams& p);

struct EvolveReport {
    std::size_t steps = 0;
    double trace_drift = 0;
};

PairCorrelation evolve_pair(const PairCorrelation& c0, const ModelParams& p, double T, double dt,
                            EvolveReport* report = nullptr);

struct FirstMoment {
    std::size_t L = 0;
    std::vector<double> m;
    double time = 0;
};

// m_x = E[v_x] from m(0) = e_0 / beta, to physical time t n^a.
FirstMoment volume_kernel(const ModelParams& p, double t, std::size_t L, double dt);

struct SectorOptions {
    double sector_tol = 1e-10;
    std::size_t quiet_sectors = 3;
    double edge_tol = 1e-12;
    std::size_t initial_window = 128;
    std::size_t batch = 8;
};

struct EnergyKernel {
    std::vector<double> S;  // indexed by z in [0, L), z > L/2 standing for z - L
    std::size_t sectors = 0;
    std::size_t window = 0;
    double edge = 0;
    double mass = 0;  // sum_z S(z) beta^2 / 2
    double outer_mass = 0;
    bool finite_size_warning = false;
    std::size_t steps = 0;
};

// Evolves the pair system from the unit mass at the origin to time t n^a and returns 2 C(z,z)/beta^2.
// Works sector by sector in the Fourier variable of the centre of mass.
EnergyKernel energy_kernel(const ModelParams& p, double t, std::size_t L, double dt,
                           const SectorOptions& opt = {});
// Same object through the packed L x L evolution; small rings only.
EnergyKernel energy_kernel_dense(const ModelParams& p, double t, std::size_t L, double dt);

// (1/n) sum_y h(y/n) sum_z f((y+z)/n) kernel(z)
double pair_field(const std::vector<double>& kernel, const TestFunction& f, const TestFunction& h, long n);

long signed_site(std::size_t z, std::size_t L);

}  // namespace evanescent
