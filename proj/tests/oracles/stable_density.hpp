#pragma once

// Maximally skewed stable density through Nolan's integral representation (S0 parameterization),
// evaluated with double-exponential quadrature. Independent of the Fourier inversion in the library.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

// Standard S0 density with index alpha in (1, 2) and skewness beta_s in [-1, 1].
inline double stable_s0_density(double x, double alpha, double beta_s) {
    using std::numbers::pi;
    const double zeta = -beta_s * std::tan(pi * alpha / 2);
    const double theta0 = std::atan(beta_s * std::tan(pi * alpha / 2)) / alpha;
    if (std::abs(x - zeta) < 1e-12)
        return boost::math::tgamma(1 + 1 / alpha) * std::cos(theta0) /
               (pi * std::pow(1 + zeta * zeta, 1 / (2 * alpha)));
    if (x < zeta) return stable_s0_density(-x, alpha, -beta_s);

    const double r = alpha / (alpha - 1);
    const double lead = std::pow(std::cos(alpha * theta0), 1 / (alpha - 1));
    const double c = std::pow(x - zeta, r);
    auto V = [&](double th) {
        return lead * std::pow(std::cos(th) / std::sin(alpha * (theta0 + th)), r) *
               std::cos(alpha * theta0 + (alpha - 1) * th) / std::cos(th);
    };
    auto g = [&](double th) {
        const double v = V(th);
        if (!std::isfinite(v)) return 0.0;
        const double e = c * v;
        return e > 700 ? 0.0 : v * std::exp(-e);
    };
    boost::math::quadrature::tanh_sinh<double> ts(15);
    const double integral = ts.integrate(g, -theta0, pi / 2, 1e-14);
    return alpha * std::pow(x - zeta, 1 / (alpha - 1)) / (pi * std::abs(alpha - 1)) * integral;
}

// Density of the semigroup with multiplier exp(-4t G0): alpha = 3/2, beta = 1, scale (t/sqrt2)^{2/3}.
inline double skew_kernel(double t, double u) {
    const double s = std::pow(t / std::numbers::sqrt2, 2.0 / 3.0);
    return stable_s0_density((u + s) / s, 1.5, 1.0) / s;
}

}  // namespace oracle
