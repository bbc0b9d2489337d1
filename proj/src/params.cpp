#include "evanescent/params.hpp"

#include <cmath>

namespace evanescent {

double ModelParams::gamma() const { return c * std::pow(static_cast<double>(n), -b); }

double ModelParams::horizon(double t) const { return t * std::pow(static_cast<double>(n), a); }

void ModelParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(lambda) || lambda < 0) throw ConfigError("lambda must be finite and >= 0");
    if (!finite(c) || c < 0) throw ConfigError("c must be finite and >= 0");
    if (!finite(b) || b < 0) throw ConfigError("b must be finite and >= 0");
    if (n < 1) throw ConfigError("n must be >= 1");
    if (!finite(beta) || beta <= 0) throw ConfigError("beta must be finite and > 0");
    if (!finite(a) || a <= 0) throw ConfigError("a must be finite and > 0");
}

std::size_t ring_size(const ModelParams& p, double t) {
    const double speed = 2.0;
    auto by_n = static_cast<std::size_t>(16 * p.n);
    auto by_transport = static_cast<std::size_t>(4 * std::ceil(speed * p.horizon(t)));
    return std::max<std::size_t>({by_n, by_transport, 4});
}

}  // namespace evanescent
