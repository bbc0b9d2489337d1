#include "evanescent/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evanescent {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0, 1};

double wrap(double y) { return y - std::floor(y + 0.5); }

cplx unit(double phase) { return std::polar(1.0, 2 * pi * phase); }

// Lambda + 4 gamma - i Omega at (y - x, x)
cplx denominator(double y, double x, double gamma) {
    return {SymbolPair::Lambda(y - x, x) + 4 * gamma, -SymbolPair::Omega(y - x, x)};
}

// Integral over x in [-1/2, 1/2] with breaks around the near-singular points x = 0, y/2, y.
cplx torus_integral(const CplxFn& g, double y, double gamma, double tol) {
    std::vector<double> breaks{-0.5, 0.5};
    std::vector<double> scales{std::abs(y), std::sqrt(std::abs(y))};
    if (gamma > 0) {
        scales.push_back(gamma);
        scales.push_back(std::sqrt(gamma));
    }
    for (double c : {0.0, 0.5 * y, y}) {
        breaks.push_back(c);
        for (double s : scales) {
            if (s <= 0) continue;
            for (double d : {0.25 * s, s, 4 * s}) {
                breaks.push_back(c - d);
                breaks.push_back(c + d);
            }
        }
    }
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> kept;
    for (double b : breaks) {
        if (b < -0.5 || b > 0.5) continue;
        if (!kept.empty() && b - kept.back() < 1e-15) continue;
        kept.push_back(b);
    }
    return integrate_pieces(g, kept, tol);
}

double support_reach(const TestFunction& f) {
    if (f.gauss) return 4.5 * (1 + f.gauss->degree) / f.gauss->width;
    return 20.0;
}

double space_reach(const TestFunction& f, double& center) {
    if (f.gauss) {
        center = f.gauss->center;
        return 4.5 * (1 + f.gauss->degree) * f.gauss->width;
    }
    center = 0;
    return 12.0;
}

// Integral over xi in [-R, R], split at 0, of a nonnegative integrand.
double spectral_integral(const RealFn& g, double R, double tol) {
    return integrate(g, -R, 0, tol) + integrate(g, 0, R, tol);
}

}  // namespace

double SymbolPair::Lambda(double x, double y) {
    const double sx = std::sin(pi * x), sy = std::sin(pi * y);
    return 4 * (sx * sx + sy * sy);
}

double SymbolPair::Omega(double x, double y) { return 2 * (std::sin(2 * pi * x) + std::sin(2 * pi * y)); }

double DiscreteOperators::laplacian(const LatticeFn& f, long x) const {
    const double m = static_cast<double>(n);
    auto at = [&](long i) { return f(static_cast<double>(i) / m); };
    return m * m * (at(x + 1) + at(x - 1) - 2 * at(x));
}

double DiscreteOperators::laplacian(const LatticeFn2& h, long x, long y) const {
    const double m = static_cast<double>(n);
    auto at = [&](long i, long j) { return h(static_cast<double>(i) / m, static_cast<double>(j) / m); };
    return m * m * (at(x + 1, y) + at(x - 1, y) + at(x, y + 1) + at(x, y - 1) - 4 * at(x, y));
}

double DiscreteOperators::grad_delta(const LatticeFn& f, long x, long y) const {
    const double m = static_cast<double>(n);
    auto at = [&](long i) { return f(static_cast<double>(i) / m); };
    if (y == x + 1) return 0.5 * m * m * (at(x + 1) - at(x));
    if (y == x - 1) return 0.5 * m * m * (at(x) - at(x - 1));
    return 0.0;
}

double DiscreteOperators::transport(const LatticeFn2& h, long x, long y) const {
    const double m = static_cast<double>(n);
    auto at = [&](long i, long j) { return h(static_cast<double>(i) / m, static_cast<double>(j) / m); };
    return m * (at(x, y - 1) + at(x - 1, y) - at(x, y + 1) - at(x + 1, y));
}

double DiscreteOperators::diagonal(const LatticeFn2& h, long x) const {
    const double m = static_cast<double>(n);
    auto at = [&](long i, long j) { return h(static_cast<double>(i) / m, static_cast<double>(j) / m); };
    return m * (at(x, x + 1) - at(x - 1, x));
}

double DiscreteOperators::diagonal_tilde(const LatticeFn2& h, long x, long y) const {
    const double m = static_cast<double>(n);
    auto at = [&](long i, long j) { return h(static_cast<double>(i) / m, static_cast<double>(j) / m); };
    if (y == x + 1) return m * m * (at(x, x + 1) - at(x, x));
    if (y == x - 1) return m * m * (at(x - 1, x) - at(x - 1, x - 1));
    return 0.0;
}

double DiscreteOperators::generator(const LatticeFn2& h, long x, long y, double gamma) const {
    const double m = static_cast<double>(n);
    const double hv = h(static_cast<double>(x) / m, static_cast<double>(y) / m);
    return std::sqrt(m) * transport(h, x, y) + laplacian(h, x, y) / std::sqrt(m) - 4 * std::pow(m, 1.5) * gamma * hv;
}

cplx G0(double y) {
    if (y == 0) return 0;
    const double s = y > 0 ? 1.0 : -1.0;
    return 0.5 * std::pow(pi * std::abs(y), 1.5) * cplx(1, s);
}

cplx skew_generator_symbol(double xi) {
    // d/dx has symbol -2i pi xi in the e^{+2i pi x xi} convention, (-Delta)^s has |2 pi xi|^{2s}
    const double r = std::abs(2 * pi * xi);
    const cplx grad = -2.0 * pi * xi * I;
    return -(std::pow(r, 1.5) - grad * std::sqrt(r)) / std::sqrt(2.0);
}

Roots residue_roots(double y, double gamma) {
    const double g1 = 1 + gamma;
    const double sy = std::sin(pi * y);
    const double alpha2 = 4 * g1 * g1 * sy * sy + (g1 * g1 - 1) * (g1 * g1 - 1);
    const double alpha = std::sqrt(std::max(0.0, alpha2));
    double theta = 0;
    const double s2 = std::sin(2 * pi * y);
    if (s2 != 0) {
        const double sgn = y > 0 ? 1.0 : (y < 0 ? -1.0 : 0.0);
        theta = std::atan((g1 * g1 - std::cos(2 * pi * y)) / s2) - 0.5 * pi * sgn;
    }
    const cplx r = std::sqrt(alpha) * std::polar(1.0, 0.5 * theta);
    return {g1 - r, g1 + r};
}

Roots residue_roots_principal(double y, double gamma) {
    const double g1 = 1 + gamma;
    const cplx r = std::sqrt(cplx(g1 * g1) - unit(y));
    return {g1 - r, g1 + r};
}

cplx Gn_residue(double y, double gamma) {
    y = wrap(y);
    const cplx w = unit(y);
    const double g1 = 1 + gamma;
    const Roots z = residue_roots(y, gamma);
    return (w - 1.0) * (w - 1.0) / (4.0 * w * w) * (g1 + 2 * g1 * g1 / (z.minus - z.plus));
}

TwoRoutes Gn(double y, const ModelParams& p, double tol) {
    const double gamma = p.gamma();
    auto g = [&](double x) {
        const double om = SymbolPair::Omega(y - x, x);
        return 0.25 * om * om / denominator(y, x, gamma);
    };
    return {torus_integral(g, y, gamma, tol), Gn_residue(y, gamma)};
}

double W_of_y(double y, double tol) {
    if (y == 0) throw NumericalError("W diverges at y = 0");
    auto g = [&](double x) {
        const double l = SymbolPair::Lambda(y - x, x), o = SymbolPair::Omega(y - x, x);
        return cplx(1.0 / (l * l + o * o), 0);
    };
    return torus_integral(g, y, 0, tol).real();
}

cplx In_residue(double y, double gamma) {
    y = wrap(y);
    const cplx w = unit(y);
    const double g1 = 1 + gamma;
    const Roots z = residue_roots(y, gamma);
    const cplx bracket = 1.0 - 2 * g1 / w + (z.minus - 1.0) * (z.minus + z.plus) / (z.minus * (z.minus - z.plus));
    return -(w - 1.0) / (2.0 * w) * bracket;
}

cplx Jn_residue(double y, double gamma) {
    y = wrap(y);
    const cplx w = unit(y);
    const Roots z = residue_roots(y, gamma);
    return -(1 + gamma) * (1.0 / w + 1.0 / (z.minus * (z.minus - z.plus)));
}

cplx Kn_residue(double y, double gamma) {
    // -w/(w-1) times In, with the (w-1) factor cancelled so that y = 0 is regular
    y = wrap(y);
    const cplx w = unit(y);
    const double g1 = 1 + gamma;
    const Roots z = residue_roots(y, gamma);
    return 0.5 * (1.0 - 2 * g1 / w + (z.minus - 1.0) * (z.minus + z.plus) / (z.minus * (z.minus - z.plus)));
}

IJKRoutes IJK(double y, const ModelParams& p, double tol) {
    const double gamma = p.gamma();
    auto gi = [&](double x) {
        return I * SymbolPair::Omega(y - x, x) * (1.0 - unit(-x)) / denominator(y, x, gamma);
    };
    auto gj = [&](double x) { return (1.0 + unit(y - 2 * x)) / denominator(y, x, gamma); };
    auto gk = [&](double x) { return (unit(y - x) + unit(x)) * (unit(-x) - 1.0) / denominator(y, x, gamma); };
    IJKRoutes r;
    r.I = {torus_integral(gi, y, gamma, tol), In_residue(y, gamma)};
    r.J = {torus_integral(gj, y, gamma, tol), Jn_residue(y, gamma)};
    r.K = {torus_integral(gk, y, gamma, tol), Kn_residue(y, gamma)};
    return r;
}

cplx generator_symbol(double k, double l, long n, double gamma) {
    const double m = static_cast<double>(n);
    const double x = k / m, y = l / m;
    return -std::pow(m, 1.5) * cplx(SymbolPair::Lambda(x, y) + 4 * gamma, -SymbolPair::Omega(x, y));
}

cplx hn_hat(double k, double l, long n, const TestFunction& f, double gamma) {
    const double m = static_cast<double>(n);
    const double x = k / m, y = l / m;
    const double om = SymbolPair::Omega(x, y);
    if (om == 0) return 0;
    const cplx den(SymbolPair::Lambda(x, y) + 4 * gamma, -om);
    if (std::abs(den) == 0) throw NumericalError("singular Poisson denominator");
    return I * om * discrete_ft_poisson(f, n, k + l) / (2 * std::sqrt(m) * den);
}

cplx grad_delta_hat(double k, double l, long n, const TestFunction& f) {
    const LatticeSamples s = sample_lattice(f, n);
    const double m = static_cast<double>(n);
    const long last = s.first + static_cast<long>(s.values.size()) - 1;
    auto at = [&](long i) { return (i < s.first || i > last) ? 0.0 : s.values[static_cast<std::size_t>(i - s.first)]; };
    cplx sum = 0;
    for (long x = s.first - 1; x <= last + 1; ++x) {
        const double up = 0.5 * m * m * (at(x + 1) - at(x));
        const double down = 0.5 * m * m * (at(x) - at(x - 1));
        const double xd = static_cast<double>(x);
        sum += up * unit((k * xd + l * (xd + 1)) / m) + down * unit((k * xd + l * (xd - 1)) / m);
    }
    return sum / (m * m);
}

PoissonSolutions solve_hn_vn(long n, const TestFunction& f, const ModelParams& p, std::size_t M) {
    if (p.gamma() <= 0) throw ConfigError("the Poisson equations need gamma > 0");
    const double m = static_cast<double>(n);
    const double gamma = p.gamma();
    PoissonSolutions s;
    s.h = {-0.5 * m, 0.5 * m, M, std::vector<cplx>(M * M)};
    s.v = s.h;
    s.w = {-0.5 * m, 0.5 * m, std::vector<cplx>(M)};
    auto w_hat = [&](double xi) { return -0.5 * std::sqrt(m) * In_residue(xi / m, gamma) * discrete_ft_poisson(f, n, xi); };
    for (std::size_t j = 0; j < M; ++j) s.w.values[j] = w_hat(s.w.node(j));
    for (std::size_t i = 0; i < M; ++i) {
        const double k = s.h.node(i);
        for (std::size_t j = 0; j < M; ++j) {
            const double l = s.h.node(j);
            s.h.at(i, j) = hn_hat(k, l, n, f, gamma);
            const cplx den(SymbolPair::Lambda(k / m, l / m) + 4 * gamma, -SymbolPair::Omega(k / m, l / m));
            s.v.at(i, j) = -(unit(k / m) + unit(l / m)) / (m * den) * w_hat(k + l);
        }
    }
    return s;
}

double plug_back_residual(long n, const TestFunction& f, const ModelParams& p, std::size_t M) {
    const double m = static_cast<double>(n);
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < M; ++i) {
        const double k = -0.5 * m + m * (static_cast<double>(i) + 0.37) / static_cast<double>(M);
        for (std::size_t j = 0; j < M; ++j) {
            const double l = -0.5 * m + m * (static_cast<double>(j) + 0.61) / static_cast<double>(M);
            const cplx lhs = generator_symbol(k, l, n, p.gamma()) * hn_hat(k, l, n, f, p.gamma());
            const cplx rhs = grad_delta_hat(k, l, n, f);
            worst = std::max(worst, std::abs(lhs - rhs));
            scale = std::max(scale, std::abs(rhs));
        }
    }
    return scale > 0 ? worst / scale : worst;
}

LemmaNorms lemma_norms(const ModelParams& p, const TestFunction& f, double tol) {
    const long n = p.n;
    const double m = static_cast<double>(n);
    const double gamma = p.gamma();
    const double R = std::min(support_reach(f), 0.5 * m);
    auto F2 = [&](double xi) { return std::norm(discrete_ft_poisson(f, n, xi)); };
    const double inner_tol = 1e-11;

    LemmaNorms r;
    r.n = n;
    r.h2 = 0.25 * spectral_integral(
                      [&](double xi) {
                          const double y = xi / m;
                          auto g = [&](double x) {
                              const cplx d = denominator(y, x, gamma);
                              const double o = SymbolPair::Omega(y - x, x);
                              return cplx(o * o / std::norm(d), 0);
                          };
                          return F2(xi) * torus_integral(g, y, gamma, inner_tol).real();
                      },
                      R, tol);
    const double err2 = spectral_integral(
        [&](double xi) {
            const cplx Fn = discrete_ft_poisson(f, n, xi);
            return std::norm(std::pow(m, 1.5) * Gn_residue(xi / m, gamma) * Fn - G0(xi) * f.ft(xi));
        },
        R, tol);
    r.diag_error = std::sqrt(err2);
    r.generator_norm = std::sqrt(spectral_integral([&](double xi) { return std::norm(4.0 * G0(xi) * f.ft(xi)); }, R, tol));
    const double c3 = 0.25 * m * m * m;
    r.diag_tilde_h = c3 * spectral_integral([&](double xi) { return std::norm(In_residue(xi / m, gamma)) * F2(xi); }, R, tol);
    r.v2 = 0.25 * spectral_integral(
                      [&](double xi) {
                          const double y = xi / m;
                          auto g = [&](double x) { return cplx(std::norm(unit(y - x) + unit(x)) / std::norm(denominator(y, x, gamma)), 0); };
                          return std::norm(In_residue(y, gamma)) * torus_integral(g, y, gamma, inner_tol).real() * F2(xi);
                      },
                      R, tol);
    r.diag_v2 = c3 * spectral_integral(
                         [&](double xi) {
                             const double y = xi / m;
                             return std::norm(1.0 - unit(y)) * std::norm(In_residue(y, gamma) * Jn_residue(y, gamma)) * F2(xi);
                         },
                         R, tol);
    r.diag_tilde_v = c3 * spectral_integral(
                              [&](double xi) {
                                  const double y = xi / m;
                                  return std::norm(In_residue(y, gamma) * Kn_residue(y, gamma)) * F2(xi);
                              },
                              R, tol);
    return r;
}

std::vector<double> bound_grid(std::size_t points, double ymin) {
    std::vector<double> ys;
    const double lo = std::log(ymin), hi = std::log(0.5);
    for (std::size_t j = 0; j < points; ++j) {
        const double t = points == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(points - 1);
        const double y = std::exp(lo + (hi - lo) * t);
        ys.push_back(y);
        ys.push_back(-y);
    }
    return ys;
}

BoundConstants fit_bounds(const ModelParams& p, const std::vector<double>& ys, bool with_W) {
    const double gamma = p.gamma();
    BoundConstants c;
    for (double y : ys) {
        if (y == 0) continue;
        const double s = std::abs(std::sin(pi * y));
        const double gb = s * s + gamma * gamma / std::sqrt(s) + gamma * std::sqrt(s);
        c.G = std::max(c.G, std::abs(Gn_residue(y, gamma) - G0(y)) / gb);
        c.I = std::max(c.I, std::abs(In_residue(y, gamma)) / std::pow(s, 1.5));
        c.J = std::max(c.J, std::abs(Jn_residue(y, gamma)) * std::sqrt(s));
        c.K = std::max(c.K, std::abs(Kn_residue(y, gamma)) / std::sqrt(s));
        const Roots z = residue_roots(y, gamma);
        if (!(std::abs(z.minus) < 1 && std::abs(z.plus) > 1 && std::abs(std::abs(z.minus * z.plus) - 1) < 1e-12))
            c.roots_ok = false;
        if (with_W) c.W = std::max(c.W, W_of_y(y) * std::pow(std::abs(y), 1.5));
    }
    return c;
}

namespace {

// e^{-4 t G0(xi)}
cplx semigroup_multiplier(double t, double xi) { return std::exp(-4 * t * G0(xi)); }

double xi_reach(double t) {
    // e^{-2 t (pi xi)^{3/2}} = 1e-18
    return std::pow(-std::log(1e-18) / (2 * t), 2.0 / 3.0) / pi;
}

}  // namespace

KernelValue fractional_kernel(double t, double u, const KernelOptions& opt) {
    if (!(t > 0)) throw ConfigError("kernel time must be positive");
    const double X = xi_reach(t);
    if (X > opt.xi_cap) throw ConfigError("kernel time too small for the frequency cap");
    // xi = +-s^2 removes the |xi|^{3/2} kink at the origin
    const double S = std::sqrt(X);
    auto side = [&](double sign) {
        return [=](double s) {
            const double xi = sign * s * s;
            return 2 * s * std::polar(1.0, -2 * pi * u * xi) * semigroup_multiplier(t, xi);
        };
    };
    const auto panels = static_cast<std::size_t>(std::ceil(4 * X * (std::abs(u) + 1))) + 8;
    const cplx pos = doubling_gauss(side(1.0), 0, S, panels, opt.tol).value;
    const cplx neg = doubling_gauss(side(-1.0), 0, S, panels, opt.tol).value;
    const cplx v = pos + neg;
    return {v.real(), v.imag()};
}

std::vector<KernelValue> fractional_kernel(double t, const std::vector<double>& u, const KernelOptions& opt) {
    std::vector<KernelValue> out;
    out.reserve(u.size());
    for (double x : u) out.push_back(fractional_kernel(t, x, opt));
    return out;
}

double kernel_tail_coefficient(double t) { return 3 * t / (4 * std::sqrt(pi)); }

KernelMass kernel_mass(double t, double upper) {
    KernelMass r;
    const double scale = std::pow(t, 2.0 / 3.0);
    r.lo = -12 * scale;
    r.hi = upper;
    auto P = [&](double u) { return fractional_kernel(t, u).value; };
    std::vector<double> breaks{r.lo, -4 * scale, 0, 4 * scale};
    for (double b = 8 * scale; b < upper; b *= 2) breaks.push_back(b);
    breaks.push_back(upper);
    std::sort(breaks.begin(), breaks.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) s += integrate(P, breaks[i], breaks[i + 1], 1e-11);
    r.tail = kernel_tail_coefficient(t) * (2.0 / 3.0) * std::pow(upper, -1.5);
    r.mass = s + r.tail;
    return r;
}

double theorem2_target(const TestFunction& f, const TestFunction& h, double t, double beta, bool reflect, double tol) {
    double cf = 0, ch = 0;
    const double rf = space_reach(f, cf), rh = space_reach(h, ch);
    // overlap(w) = integral of f(v + w) h(v) dv
    auto overlap = [&](double w) {
        const double lo = std::max(ch - rh, cf - rf - w), hi = std::min(ch + rh, cf + rf - w);
        if (hi <= lo) return 0.0;
        return integrate([&](double v) { return f(v + w) * h(v); }, lo, hi, 1e-13);
    };
    const double wlo = cf - ch - rf - rh, whi = cf - ch + rf + rh;
    const double sign = reflect ? -1.0 : 1.0;
    auto g = [&](double w) { return cplx(fractional_kernel(t, sign * w).value * overlap(w), 0); };
    // the kernel peak has width t^{2/3} around the origin
    const double scale = std::pow(t, 2.0 / 3.0);
    std::vector<double> breaks{wlo, whi};
    for (double d : {0.0, 1.0, 4.0, 16.0, 64.0})
        for (double b : {-d * scale, d * scale})
            if (b > wlo && b < whi) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return 2 / (beta * beta) * integrate_pieces(g, breaks, tol).real();
}

double theorem2_target_fourier(const TestFunction& f, const TestFunction& h, double t, double beta, bool reflect) {
    const double R = std::min(support_reach(f), support_reach(h));
    const double sign = reflect ? -1.0 : 1.0;
    auto g = [&](double xi) {
        return (semigroup_multiplier(t, sign * xi) * std::conj(f.ft(xi)) * h.ft(xi)).real();
    };
    return 2 / (beta * beta) * spectral_integral(g, R, 1e-13);
}

}  // namespace evanescent
