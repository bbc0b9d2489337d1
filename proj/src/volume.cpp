#include "evanescent/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evanescent/quadrature.hpp"

namespace evanescent {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0, 1};

EtaResult eta_impl(const TestFunction& f, const TestFunction& h, double t, const ModelParams& p, bool translated,
                   const EtaOptions& opt) {
    p.validate();
    if (t < 0) throw ConfigError("t must be >= 0");
    const double n = static_cast<double>(p.n);
    const double T = p.horizon(t);
    const double shift_rate = translated ? 4.0 * pi * T / n : 0.0;
    auto integrand = [&](double xi) {
        cplx v = volume_hat(xi / n, T, p) * std::conj(discrete_ft_poisson(f, p.n, xi)) *
                 discrete_ft_poisson(h, p.n, xi);
        if (translated) v *= std::exp(I * (shift_rate * xi));
        return v;
    };
    EtaResult r;
    const double half = 0.5 * n;
    // support of the test-function product on a coarse scan
    const double spacing = std::min(0.05, n / 64.0);
    const std::size_t scan = static_cast<std::size_t>(std::ceil(n / spacing));
    const double step = n / static_cast<double>(scan);
    std::vector<double> mags(scan + 1);
    double peak = 0;
    for (std::size_t i = 0; i <= scan; ++i) {
        const double xi = -half + step * static_cast<double>(i);
        mags[i] = std::abs(discrete_ft_poisson(f, p.n, xi)) * std::abs(discrete_ft_poisson(h, p.n, xi));
        peak = std::max(peak, mags[i]);
    }
    if (peak == 0) return r;
    std::size_t first = scan, last = 0;
    for (std::size_t i = 0; i <= scan; ++i)
        if (mags[i] > opt.cutoff * peak) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    r.lo = std::max(-half, -half + step * (static_cast<double>(first) - 1.0));
    r.hi = std::min(half, -half + step * (static_cast<double>(last) + 1.0));
    // exchange damping e^{-4 lambda T sin^2(pi xi/n)} confines the integrand further
    if (p.lambda * T > 0) {
        const double s2 = -std::log(opt.cutoff) / (4.0 * p.lambda * T);
        if (s2 < 1) {
            const double reach = n / pi * std::asin(std::sqrt(s2));
            r.lo = std::max(r.lo, -reach);
            r.hi = std::min(r.hi, reach);
        }
    }
    if (r.hi <= r.lo) return r;
    // transport phase oscillates at up to 2T/n cycles per unit xi
    const double cycles = (r.hi - r.lo) * std::max(1.0, 2.0 * T / n);
    const std::size_t panels = static_cast<std::size_t>(std::ceil(cycles)) + 16;
    auto q = doubling_gauss(integrand, r.lo, r.hi, panels, opt.tol);
    r.value = q.value.real();
    r.imag = q.value.imag();
    r.refinement_delta = q.error;
    r.panels = q.panels;
    return r;
}

}  // namespace

cplx volume_hat(double theta, double t_phys, const ModelParams& p) {
    if (t_phys < 0) throw ConfigError("time must be >= 0");
    const double s = std::sin(pi * theta);
    const double decay = t_phys * (2.0 * p.gamma() + 4.0 * p.lambda * s * s);
    return std::exp(-decay) * std::polar(1.0, -2.0 * t_phys * std::sin(2.0 * pi * theta)) / p.beta;
}

EtaResult eta(const TestFunction& f, const TestFunction& h, double t, const ModelParams& p, const EtaOptions& opt) {
    return eta_impl(f, h, t, p, false, opt);
}

EtaResult eta_tilde(const TestFunction& f, const TestFunction& h, double t, const ModelParams& p,
                    const EtaOptions& opt) {
    if (!(p.a > 1)) throw ConfigError("translated frame needs a > 1");
    return eta_impl(f, h, t, p, true, opt);
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::no_evolution: return "no-evolution";
        case Regime::vanish: return "vanish";
        case Regime::relaxation: return "relaxation";
        case Regime::transport: return "transport";
        case Regime::heat: return "heat";
        case Regime::relaxation_transport: return "relaxation+transport";
        case Regime::relaxation_heat: return "relaxation+heat";
    }
    return "unknown";
}

std::string RegimeLabel::name() const { return regime_name(label); }

RegimeLabel classify_regime(double a, double b, double lambda, double c) {
    if (!(a > 0) || !(b >= 0)) throw ConfigError("classification needs a > 0 and b >= 0");
    const double eps = 1e-12;
    auto same = [eps](double x, double y) { return std::abs(x - y) < eps; };
    RegimeLabel r;
    if (b <= 1 + eps) {
        if (same(a, b)) {
            r.relaxation = 2 * c;
            r.case_id = "A(ii)";
            if (same(b, 1)) {
                r.label = Regime::relaxation_transport;
                r.transport = 2;
            } else {
                r.label = Regime::relaxation;
            }
        } else if (a < b) {
            r.label = Regime::no_evolution;
            r.case_id = "A(i)";
        } else {
            r.label = Regime::vanish;
            r.case_id = "A(iii)";
        }
        return r;
    }
    const bool mid = b < 2 - eps;
    const char* tag = mid ? "B" : "C";
    auto id = [tag](const char* roman) { return std::string(tag) + "(" + roman + ")"; };
    if (same(a, 1)) {
        r.label = Regime::transport;
        r.transport = 2;
        r.case_id = id("iii");
    } else if (a < 1) {
        r.label = Regime::no_evolution;
        r.case_id = id("i");
    } else if (mid) {
        if (same(a, b)) {
            r.label = Regime::relaxation;
            r.relaxation = 2 * c;
            r.translated = true;
            r.case_id = id("iv");
        } else if (a < b) {
            r.label = Regime::no_evolution;
            r.translated = true;
            r.case_id = id("ii");
        } else {
            r.label = Regime::vanish;
            r.case_id = id("v");
        }
    } else {
        if (same(a, 2)) {
            r.diffusion = lambda;
            r.translated = true;
            r.case_id = id("iv");
            if (same(b, 2)) {
                r.label = Regime::relaxation_heat;
                r.relaxation = 2 * c;
            } else {
                r.label = Regime::heat;
            }
        } else if (a < 2) {
            r.label = Regime::no_evolution;
            r.translated = true;
            r.case_id = id("ii");
        } else {
            r.label = Regime::vanish;
            r.case_id = id("v");
        }
    }
    return r;
}

double limit_correlation(const RegimeLabel& label, const TestFunction& f, const TestFunction& h, double t,
                         const ModelParams& p) {
    if (label.label == Regime::vanish) return 0.0;
    const double damping = std::exp(-label.relaxation * t) / p.beta;
    const double D = label.diffusion * t;
    const double shift = label.transport * t;
    if (f.gauss && h.gauss && f.gauss->degree == 0 && h.gauss->degree == 0) {
        const auto& F = *f.gauss;
        const auto& H = *h.gauss;
        const double S = F.width * F.width + H.width * H.width + 4.0 * pi * D;
        const double k = H.center - F.center - shift;
        return damping * F.amplitude * F.width * H.amplitude * H.width * std::exp(-pi * k * k / S) / std::sqrt(S);
    }
    auto g = [&](double xi) {
        return std::conj(f.ft(xi)) * h.ft(xi) * std::exp(-4.0 * pi * pi * D * xi * xi) *
               std::exp(-2.0 * pi * I * shift * xi);
    };
    double reach = 40.0;
    std::vector<double> breaks;
    for (int i = -8; i <= 8; ++i) breaks.push_back(reach * i / 8.0);
    return damping * integrate_pieces(g, breaks, 1e-13).real();
}

}  // namespace evanescent
