#pragma once

// Adaptive Dormand-Prince integration of the free chain d w_x/dt = w_{x+1} - w_{x-1}.

#include <vector>

#include <boost/numeric/odeint.hpp>

namespace oracle {

inline std::vector<double> free_chain_ode(std::vector<double> w, double T, double tol = 1e-13) {
    namespace ode = boost::numeric::odeint;
    const std::size_t L = w.size();
    auto rhs = [L](const std::vector<double>& x, std::vector<double>& dx, double) {
        for (std::size_t i = 0; i < L; ++i) dx[i] = x[(i + 1) % L] - x[(i + L - 1) % L];
    };
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<std::vector<double>>());
    ode::integrate_adaptive(stepper, rhs, w, 0.0, T, 1e-3);
    return w;
}

}  // namespace oracle
