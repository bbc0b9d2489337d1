#pragma once

#include <complex>
#include <vector>

#include "evanescent/params.hpp"
#include "evanescent/quadrature.hpp"

namespace evanescent {

cplx X_of_theta(double theta, const ModelParams& p);
// Real and negative; throws when gamma = 0 at theta = 0.
double rho1_hat(double theta, const ModelParams& p);

struct FDCoefficients {
    ModelParams params;
    std::size_t K = 0;
    long window = 0;
    std::size_t grid = 0;
    double tail_mass = 0;
    double total_mass = 0;        // sum_k integral |rho_k hat|^2
    double rho1_scale = 1.0;      // multiplies rho_1 hat; 1 except for sensitivity probes
    std::vector<std::vector<double>> rho;  // rho[k-1][x + window]

    double at(std::size_t k, long x) const;
    double norm2(std::size_t k) const;
};

long default_window(const ModelParams& p);

FDCoefficients rho_coefficients(const ModelParams& p, std::size_t K, long window, double rho1_scale = 1.0);

// l2 norm of F_k(x) - 2 1{k=1,x=0} over k <= K, with coefficients beyond level K and outside the window set to 0.
double fd_residual(const FDCoefficients& c);

// Largest modulus of the level recursion on an odd grid of theta, levels 1..K.
double recursion_residual(const ModelParams& p, std::size_t K, std::size_t grid);

struct EstimateBounds {
    double worst_X = 0;    // max |X| / (cos(pi theta)/(1+sqrt(gamma/lambda)))
    double worst_rho = 0;  // max |rho1| lambda sqrt(gamma/lambda + sin^2)
    bool holds() const { return worst_X <= 1.0 + 1e-12 && worst_rho <= 1.0 + 1e-12; }
};
EstimateBounds check_estimates(const ModelParams& p, std::size_t grid);

struct LocalizationFit {
    double rate = 0;
    double rate_over_sqrt_gamma = 0;
    double rate_over_gamma = 0;
    std::size_t k_first = 0, k_last = 0;
};
LocalizationFit localization(const ModelParams& p, std::size_t grid = 200000);

enum class ResolventBound { certified, simplified };

// Integral over the unit square of B(k1+k2) / ((z + gamma) + sin^2(pi k1) + sin^2(pi k2)), z = 1/(t n^a).
double resolvent_integral(const ModelParams& p, double t, ResolventBound kind = ResolventBound::certified);
// Same integral after the inner k1 integration done in closed form.
double resolvent_integral_reduced(const ModelParams& p, double t, ResolventBound kind = ResolventBound::certified);

// Exact geometric-series bracket of the degree-two function transform (without the f-dependent prefactor).
cplx phi_bracket(double k1, double k2, const ModelParams& p);
// max over a k-grid of |bracket|^2 / (|rho1|^2 / (1-|X|)^2)
double phi_bound_ratio(const ModelParams& p, std::size_t grid);

}  // namespace evanescent
