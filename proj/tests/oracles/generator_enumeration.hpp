#pragma once

// Generator of the chain applied to every quadratic monomial w_x w_y on a small ring,
// expanded term by term over all sites and bonds.

#include <map>
#include <utility>

namespace oracle {

using Monomial = std::pair<std::size_t, std::size_t>;  // ordered x <= y
using Polynomial = std::map<Monomial, double>;

inline Monomial mono(std::size_t x, std::size_t y) { return x <= y ? Monomial{x, y} : Monomial{y, x}; }

inline Polynomial apply_generator(Monomial m, std::size_t L, double gamma, double lambda) {
    Polynomial out;
    const auto [x, y] = m;
    auto right = [L](std::size_t s) { return (s + 1) % L; };
    auto left = [L](std::size_t s) { return (s + L - 1) % L; };
    // drift, product rule on each factor
    out[mono(right(x), y)] += 1;
    out[mono(left(x), y)] -= 1;
    out[mono(x, right(y))] += 1;
    out[mono(x, left(y))] -= 1;
    for (std::size_t z = 0; z < L; ++z) {
        // flip at z multiplies the monomial by (-1)^{multiplicity of z}
        const int k = (x == z) + (y == z);
        const double sign = (k % 2) ? -1.0 : 1.0;
        out[m] += gamma * (sign - 1);
        // exchange on bond (z, z+1)
        auto sw = [&](std::size_t s) { return s == z ? right(z) : (s == right(z) ? z : s); };
        out[mono(sw(x), sw(y))] += lambda;
        out[m] -= lambda;
    }
    return out;
}

}  // namespace oracle
