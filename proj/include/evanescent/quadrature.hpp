#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace evanescent {

using cplx = std::complex<double>;
using RealFn = std::function<double(double)>;
using CplxFn = std::function<cplx(double)>;

struct QuadResult {
    cplx value;
    double error = 0;
    std::size_t panels = 0;
};

// Adaptive Gauss-Kronrod on [lo, hi]; throws NumericalError when the error estimate stays above tol.
double integrate(const RealFn& f, double lo, double hi, double tol = 1e-12);
cplx integrate_complex(const CplxFn& f, double lo, double hi, double tol = 1e-12);

// Same, over consecutive sub-intervals split at the given break points.
cplx integrate_pieces(const CplxFn& f, const std::vector<double>& breaks, double tol = 1e-12);

// Fixed composite 16-point Gauss-Legendre with equal panels.
cplx composite_gauss(const CplxFn& f, double lo, double hi, std::size_t panels);

// Composite Gauss-Legendre, doubling the panel count until two passes differ by < tol (absolute).
QuadResult doubling_gauss(const CplxFn& f, double lo, double hi, std::size_t panels, double tol,
                          std::size_t max_panels = std::size_t(1) << 24);

// Fixed-order pairwise sum of a sequence, independent of how it was produced.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace evanescent
