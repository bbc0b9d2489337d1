#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "evanescent/fourier.hpp"
#include "evanescent/params.hpp"
#include "evanescent/quadrature.hpp"

namespace evanescent {

// Symbols of the pair generator on the torus. The formulas below take lambda = 1.
struct SymbolPair {
    static double Lambda(double x, double y);
    static double Omega(double x, double y);
};

using LatticeFn = std::function<double(double)>;
using LatticeFn2 = std::function<double(double, double)>;

// Stencils evaluated at lattice site x (or (x, y)); f and h take macroscopic arguments x/n.
struct DiscreteOperators {
    long n = 64;

    double laplacian(const LatticeFn& f, long x) const;
    double laplacian(const LatticeFn2& h, long x, long y) const;
    double grad_delta(const LatticeFn& f, long x, long y) const;
    double transport(const LatticeFn2& h, long x, long y) const;
    double diagonal(const LatticeFn2& h, long x) const;
    double diagonal_tilde(const LatticeFn2& h, long x, long y) const;
    // sqrt(n) A + Delta / sqrt(n) - 4 n^{3/2} gamma
    double generator(const LatticeFn2& h, long x, long y, double gamma) const;
};

cplx G0(double y);

// Fourier multiplier of the skew fractional generator, written directly from its definition.
cplx skew_generator_symbol(double xi);

struct TwoRoutes {
    cplx quadrature;
    cplx residue;
};

struct Roots {
    cplx minus, plus;
};
// Roots of z^2 - 2(1+gamma) z + w through the alpha/theta representation.
Roots residue_roots(double y, double gamma);
// Same roots from the principal square root of (1+gamma)^2 - w.
Roots residue_roots_principal(double y, double gamma);

TwoRoutes Gn(double y, const ModelParams& p, double tol = 1e-12);
cplx Gn_residue(double y, double gamma);

double W_of_y(double y, double tol = 1e-12);

struct IJKRoutes {
    TwoRoutes I, J, K;
};
IJKRoutes IJK(double y, const ModelParams& p, double tol = 1e-12);
cplx In_residue(double y, double gamma);
cplx Jn_residue(double y, double gamma);
cplx Kn_residue(double y, double gamma);

// Transform of the solution of L_n h = grad_n f (x) delta at (k, l).
cplx hn_hat(double k, double l, long n, const TestFunction& f, double gamma);
// Multiplier of L_n at (k, l).
cplx generator_symbol(double k, double l, long n, double gamma);
// Direct lattice sum (1/n^2) sum g(x,y) e^{2i pi (kx+ly)/n} of g = grad_n f (x) delta.
cplx grad_delta_hat(double k, double l, long n, const TestFunction& f);

struct Grid2D {
    double lo = 0, hi = 1;
    std::size_t M = 0;
    std::vector<cplx> values;  // row-major, k index first

    double node(std::size_t j) const { return lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(M); }
    cplx& at(std::size_t i, std::size_t j) { return values[i * M + j]; }
    cplx at(std::size_t i, std::size_t j) const { return values[i * M + j]; }
};

struct PoissonSolutions {
    Grid2D h, v;
    SpectralFunction w;
};
PoissonSolutions solve_hn_vn(long n, const TestFunction& f, const ModelParams& p, std::size_t M = 64);

// max |generator_symbol * h hat - grad_delta_hat| / max |grad_delta_hat| over an M x M grid
double plug_back_residual(long n, const TestFunction& f, const ModelParams& p, std::size_t M = 16);

struct LemmaNorms {
    long n = 0;
    double h2 = 0;            // ||h_n||^2
    double diag_error = 0;    // ||D_n h_n + L f / 4||
    double generator_norm = 0;  // ||L f||
    double diag_tilde_h = 0;  // n^{-3} sum (tilde D h_n)^2 on the off-diagonal
    double v2 = 0;            // ||v_n||^2
    double diag_v2 = 0;       // ||D_n v_n||^2
    double diag_tilde_v = 0;  // n^{-3} sum (tilde D v_n)^2 on the off-diagonal
};
LemmaNorms lemma_norms(const ModelParams& p, const TestFunction& f, double tol = 1e-9);

struct BoundConstants {
    double G = 0;  // sup |Gn - G0| / [sin^2 + gamma^2 |sin|^{-1/2} + gamma |sin|^{1/2}]
    double I = 0, J = 0, K = 0;
    double W = 0;  // sup W(y) |y|^{3/2}
    bool roots_ok = true;
};
// Log-spaced grid of |y| in [ymin, 1/2], both signs.
std::vector<double> bound_grid(std::size_t points, double ymin = 1e-4);
BoundConstants fit_bounds(const ModelParams& p, const std::vector<double>& ys, bool with_W = false);

struct KernelOptions {
    double xi_cap = 1e4;
    double tol = 1e-13;
};
struct KernelValue {
    double value = 0;
    double imag = 0;
};
KernelValue fractional_kernel(double t, double u, const KernelOptions& opt = {});
std::vector<KernelValue> fractional_kernel(double t, const std::vector<double>& u, const KernelOptions& opt = {});

// Leading heavy-tail coefficient: P_t(u) ~ c u^{-5/2} as u -> +infinity.
double kernel_tail_coefficient(double t);

struct KernelMass {
    double mass = 0;
    double tail = 0;  // analytic heavy tail beyond the integration range
    double lo = 0, hi = 0;
};
KernelMass kernel_mass(double t, double upper = 100);

// (2/beta^2) double integral of f(u) h(v) P_t(u - v); reflect uses P_t(v - u).
double theorem2_target(const TestFunction& f, const TestFunction& h, double t, double beta,
                       bool reflect = false, double tol = 1e-10);
// Same value through the Fourier side, (2/beta^2) integral of e^{-4t G0} conj(F f) F h.
double theorem2_target_fourier(const TestFunction& f, const TestFunction& h, double t, double beta,
                               bool reflect = false);

}  // namespace evanescent
