#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "evanescent/quadrature.hpp"

namespace evanescent {

// A * ((x-center)/width)^degree * exp(-pi ((x-center)/width)^2), degree 0 or 1.
struct GaussSpec {
    double amplitude = 1;
    double width = 1;
    double center = 0;
    int degree = 0;
};

struct TestFunction {
    std::function<double(double)> eval;
    std::function<cplx(double)> ft;  // continuous transform, integral of f(x) e^{2i pi x xi}
    int decay_order = 8;
    std::optional<GaussSpec> gauss;

    double operator()(double x) const { return eval(x); }
};

TestFunction gaussian(double amplitude = 1, double width = 1, double center = 0);
TestFunction gaussian_odd(double amplitude = 1, double width = 1, double center = 0);
TestFunction from_spec(const GaussSpec& s);
TestFunction zero_function();
// x -> f(x + s)
TestFunction shifted(const TestFunction& f, double s);

// Uniform periodic grid on [lo, hi) with M nodes.
struct SpectralFunction {
    double lo = 0;
    double hi = 1;
    std::vector<cplx> values;

    std::size_t size() const { return values.size(); }
    double weight() const { return (hi - lo) / static_cast<double>(values.size()); }
    double node(std::size_t j) const { return lo + weight() * static_cast<double>(j); }
};

struct LatticeOptions {
    double floor = 1e-14;
    // largest |x|/n scanned before giving up
    double max_range = 1e4;
};

struct LatticeSamples {
    long first = 0;
    std::vector<double> values;  // f((first + i)/n)
};

LatticeSamples sample_lattice(const TestFunction& f, long n, const LatticeOptions& opt = {});

// (1/n) sum_x f(x/n) e^{2i pi x xi / n}
cplx discrete_ft_at(const TestFunction& f, long n, double xi, const LatticeOptions& opt = {});
cplx discrete_ft_at(const LatticeSamples& s, long n, double xi);
// Same object through Poisson summation over the continuous transform.
cplx discrete_ft_poisson(const TestFunction& f, long n, double xi);

SpectralFunction discrete_ft(const TestFunction& f, long n, double lo, double hi, std::size_t M,
                             const LatticeOptions& opt = {});
// Default grid: 8n points on [-n/2, n/2).
SpectralFunction discrete_ft(const TestFunction& f, long n);

struct InverseResult {
    double value = 0;
    double imag = 0;
    bool aliasing = false;
    std::string note;
};

// integral of s(xi) e^{-2i pi x xi / n} over the grid
InverseResult inverse_discrete_ft(const SpectralFunction& s, long n, long x);

// sup over |y| <= 1/2 of |F_n f(ny)| (1 + (n|y|)^p) on the default grid
double decay_constant(const TestFunction& f, long n, int p);

double lattice_norm2(const TestFunction& f, long n);
double spectral_norm2(const SpectralFunction& s);

// integral of |xi|^p |F_n f - F f|^2 over the grid
double transform_defect(const TestFunction& f, long n, int p);

}  // namespace evanescent
