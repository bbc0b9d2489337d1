#pragma once

#include <complex>
#include <string>

#include "evanescent/fourier.hpp"
#include "evanescent/params.hpp"

namespace evanescent {

// beta^{-1} exp(T [-2i sin(2 pi theta) - 2 gamma - 4 lambda sin^2(pi theta)])
cplx volume_hat(double theta, double t_phys, const ModelParams& p);

struct EtaResult {
    double value = 0;
    double imag = 0;
    double refinement_delta = 0;
    std::size_t panels = 0;
    double lo = 0, hi = 0;
};

struct EtaOptions {
    double tol = 1e-8;
    // integrand magnitudes below this fraction of the peak are outside the integration range
    double cutoff = 1e-17;
};

// Static frame: integral of Vhat(xi/n, t n^a) conj(F_n f)(xi) F_n h(xi) over [-n/2, n/2].
EtaResult eta(const TestFunction& f, const TestFunction& h, double t, const ModelParams& p,
              const EtaOptions& opt = {});
// Frame moving with the sound mode: extra factor e^{4 i pi t n^a xi / n}.
EtaResult eta_tilde(const TestFunction& f, const TestFunction& h, double t, const ModelParams& p,
                    const EtaOptions& opt = {});

enum class Regime { no_evolution, vanish, relaxation, transport, heat, relaxation_transport, relaxation_heat };

struct RegimeLabel {
    Regime label = Regime::no_evolution;
    double transport = 0;   // coefficient v of v * d/dx
    double diffusion = 0;   // coefficient of the Laplacian
    double relaxation = 0;  // coefficient r of -r Id
    bool translated = false;
    std::string case_id;

    std::string name() const;
};

RegimeLabel classify_regime(double a, double b, double lambda = 1, double c = 1);

// Limit of eta (or eta_tilde when label.translated) as n grows.
double limit_correlation(const RegimeLabel& label, const TestFunction& f, const TestFunction& h, double t,
                         const ModelParams& p);

std::string regime_name(Regime r);

}  // namespace evanescent
