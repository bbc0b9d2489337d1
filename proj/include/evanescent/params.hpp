#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evanescent {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical gate failures (quadrature not converged, window too small, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double lambda = 1.0;
    double c = 1.0;
    double b = 0.5;
    long n = 64;
    double beta = 1.0;
    double a = 1.75;

    // flip rate per site
    double gamma() const;
    // physical time for macroscopic time t
    double horizon(double t) const;
    void validate() const;
};

// Site count such that transport over the horizon stays away from the seam.
std::size_t ring_size(const ModelParams& p, double t);

}  // namespace evanescent
