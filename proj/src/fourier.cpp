#include "evanescent/fourier.hpp"

#include <cmath>
#include <numbers>

#include "evanescent/params.hpp"

namespace evanescent {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0, 1};
}  // namespace

TestFunction from_spec(const GaussSpec& s) {
    TestFunction f;
    f.gauss = s;
    if (s.degree == 0) {
        f.eval = [s](double x) {
            double u = (x - s.center) / s.width;
            return s.amplitude * std::exp(-pi * u * u);
        };
        f.ft = [s](double xi) {
            double v = s.width * xi;
            return s.amplitude * s.width * std::exp(-pi * v * v) * std::exp(2.0 * pi * I * s.center * xi);
        };
    } else if (s.degree == 1) {
        f.eval = [s](double x) {
            double u = (x - s.center) / s.width;
            return s.amplitude * u * std::exp(-pi * u * u);
        };
        f.ft = [s](double xi) {
            double v = s.width * xi;
            return s.amplitude * s.width * I * v * std::exp(-pi * v * v) *
                   std::exp(2.0 * pi * I * s.center * xi);
        };
    } else {
        throw ConfigError("test function degree must be 0 or 1");
    }
    return f;
}

TestFunction gaussian(double amplitude, double width, double center) {
    return from_spec({amplitude, width, center, 0});
}

TestFunction gaussian_odd(double amplitude, double width, double center) {
    return from_spec({amplitude, width, center, 1});
}

TestFunction zero_function() {
    TestFunction f;
    f.eval = [](double) { return 0.0; };
    f.ft = [](double) { return cplx(0); };
    f.gauss = GaussSpec{0, 1, 0, 0};
    return f;
}

TestFunction shifted(const TestFunction& f, double s) {
    TestFunction g;
    g.eval = [e = f.eval, s](double x) { return e(x + s); };
    g.ft = [t = f.ft, s](double xi) { return t(xi) * std::exp(-2.0 * pi * I * s * xi); };
    g.decay_order = f.decay_order;
    if (f.gauss) {
        GaussSpec sp = *f.gauss;
        sp.center -= s;
        g.gauss = sp;
    }
    return g;
}

LatticeSamples sample_lattice(const TestFunction& f, long n, const LatticeOptions& opt) {
    const long limit = static_cast<long>(opt.max_range * static_cast<double>(n));
    auto edge = [&](long dir) {
        long quiet = 0, x = 0;
        long last = 0;
        while (quiet < n + 1) {
            if (std::abs(x) > limit)
                throw NumericalError("lattice sum truncation floor never reached; function does not decay");
            if (std::abs(f.eval(static_cast<double>(x) / n)) < opt.floor) {
                ++quiet;
            } else {
                quiet = 0;
                last = x;
            }
            x += dir;
        }
        return last;
    };
    long lo = edge(-1), hi = edge(1);
    LatticeSamples s;
    s.first = lo;
    s.values.resize(static_cast<std::size_t>(hi - lo + 1));
    for (long x = lo; x <= hi; ++x) s.values[static_cast<std::size_t>(x - lo)] = f.eval(static_cast<double>(x) / n);
    return s;
}

cplx discrete_ft_at(const LatticeSamples& s, long n, double xi) {
    // e^{2i pi x xi/n} by rotation, re-anchored every 64 steps
    const double w = 2.0 * pi * xi / static_cast<double>(n);
    const cplx step = std::exp(I * w);
    cplx acc = 0, ph;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (i % 64 == 0) ph = std::exp(I * (w * static_cast<double>(s.first + static_cast<long>(i))));
        acc += s.values[i] * ph;
        ph *= step;
    }
    return acc / static_cast<double>(n);
}

cplx discrete_ft_at(const TestFunction& f, long n, double xi, const LatticeOptions& opt) {
    return discrete_ft_at(sample_lattice(f, n, opt), n, xi);
}

cplx discrete_ft_poisson(const TestFunction& f, long n, double xi) {
    if (!f.ft) throw ConfigError("test function has no closed-form transform");
    const double period = static_cast<double>(n);
    // fold xi into [-n/2, n/2) first so the central term dominates
    double base = xi - period * std::floor(xi / period + 0.5);
    cplx s = f.ft(base);
    for (long m = 1; m < 100000; ++m) {
        cplx t = f.ft(base + m * period) + f.ft(base - m * period);
        s += t;
        if (std::abs(t) < 1e-300 || (std::abs(t) < 1e-18 * std::abs(s) && m > 2)) break;
    }
    return s;
}

SpectralFunction discrete_ft(const TestFunction& f, long n, double lo, double hi, std::size_t M,
                             const LatticeOptions& opt) {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (M < 2) throw ConfigError("spectral grid needs at least 2 points");
    SpectralFunction out;
    out.lo = lo;
    out.hi = hi;
    out.values.resize(M);
    auto samples = sample_lattice(f, n, opt);
    for (std::size_t j = 0; j < M; ++j) out.values[j] = discrete_ft_at(samples, n, out.node(j));
    return out;
}

SpectralFunction discrete_ft(const TestFunction& f, long n) {
    return discrete_ft(f, n, -0.5 * n, 0.5 * n, static_cast<std::size_t>(8 * n));
}

InverseResult inverse_discrete_ft(const SpectralFunction& s, long n, long x) {
    InverseResult r;
    const double w = s.weight();
    cplx acc = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
        acc += s.values[j] * std::exp(-2.0 * pi * I * (static_cast<double>(x) * s.node(j) / static_cast<double>(n)));
    acc *= w;
    r.value = acc.real();
    r.imag = acc.imag();
    // nodes spaced by w resolve lattice offsets |x| < n / (2w) without folding
    const double nyquist = static_cast<double>(n) / (2.0 * w);
    if (static_cast<double>(std::abs(x)) >= nyquist) {
        r.aliasing = true;
        r.note = "grid spacing aliases lattice offset " + std::to_string(x);
    }
    return r;
}

double decay_constant(const TestFunction& f, long n, int p) {
    if (p < 1) throw ConfigError("decay order p must be >= 1");
    auto s = discrete_ft(f, n);
    double best = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        double xi = std::abs(s.node(j));
        best = std::max(best, std::abs(s.values[j]) * (1.0 + std::pow(xi, p)));
    }
    return best;
}

double lattice_norm2(const TestFunction& f, long n) {
    auto s = sample_lattice(f, n);
    std::vector<double> sq(s.values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.values[i] * s.values[i];
    return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(n);
}

double spectral_norm2(const SpectralFunction& s) {
    std::vector<double> sq(s.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(s.values[i]);
    return pairwise_sum(sq.data(), sq.size()) * s.weight();
}

double transform_defect(const TestFunction& f, long n, int p) {
    auto s = discrete_ft(f, n);
    std::vector<double> d(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        double xi = s.node(j);
        d[j] = std::pow(std::abs(xi), p) * std::norm(s.values[j] - f.ft(xi));
    }
    return pairwise_sum(d.data(), d.size()) * s.weight();
}

}  // namespace evanescent
