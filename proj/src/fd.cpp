#include "evanescent/fd.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace evanescent {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0, 1};
std::mutex planner_mutex;

double radicand(double theta, const ModelParams& p) {
    const double c = std::cos(pi * theta);
    const double s = p.lambda + p.gamma();
    return s * s - p.lambda * p.lambda * c * c;
}

std::vector<double> odd_grid(std::size_t M) {
    if (M % 2 == 0) ++M;
    std::vector<double> g(M);
    for (std::size_t j = 0; j < M; ++j) g[j] = -0.5 + static_cast<double>(j) / static_cast<double>(M - 1);
    g[(M - 1) / 2] = 0.0;
    return g;
}

std::size_t fft_size(long window) {
    std::size_t N = 8192;
    while (N < 16 * static_cast<std::size_t>(2 * window + 1)) N *= 2;
    return N;
}

}  // namespace

cplx X_of_theta(double theta, const ModelParams& p) {
    // 2/(1+e^{2i pi theta}) {1 + g/l - sqrt((1+g/l)^2 - cos^2)} with the numerator rationalised:
    // equals l cos(pi theta) e^{-i pi theta} / (l + g + sqrt((l+g)^2 - l^2 cos^2))
    const double c = std::cos(pi * theta);
    const double denom = p.lambda + p.gamma() + std::sqrt(std::max(0.0, radicand(theta, p)));
    if (denom == 0) return 0;
    return p.lambda * c * std::polar(1.0, -pi * theta) / denom;
}

double rho1_hat(double theta, const ModelParams& p) {
    const double d = p.gamma() + std::sqrt(std::max(0.0, radicand(theta, p)));
    if (d == 0) throw NumericalError("rho1 diverges at theta = 0 without flips");
    return -1.0 / d;
}

double FDCoefficients::at(std::size_t k, long x) const {
    if (k < 1 || k > K || x < -window || x > window) return 0.0;
    return rho[k - 1][static_cast<std::size_t>(x + window)];
}

double FDCoefficients::norm2(std::size_t k) const {
    double s = 0;
    for (double v : rho.at(k - 1)) s += v * v;
    return s;
}

long default_window(const ModelParams& p) { return static_cast<long>(std::ceil(40.0 / std::sqrt(p.gamma()))); }

FDCoefficients rho_coefficients(const ModelParams& p, std::size_t K, long window, double rho1_scale) {
    p.validate();
    if (K < 2) throw ConfigError("K must be >= 2");
    if (window < 1) throw ConfigError("window must be >= 1");
    FDCoefficients c;
    c.params = p;
    c.K = K;
    c.window = window;
    c.rho1_scale = rho1_scale;
    const std::size_t N = fft_size(window);
    c.grid = N;
    fftw_complex* in = fftw_alloc_complex(N);
    fftw_complex* out = fftw_alloc_complex(N);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(N), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    std::vector<cplx> base(N), xs(N);
    for (std::size_t j = 0; j < N; ++j) {
        double th = static_cast<double>(j) / static_cast<double>(N);
        if (th >= 0.5) th -= 1.0;
        base[j] = rho1_scale * rho1_hat(th, p);
        xs[j] = X_of_theta(th, p);
    }
    double inside = 0;
    std::vector<cplx> level = base;
    for (std::size_t k = 1; k <= K; ++k) {
        double m2 = 0;
        for (std::size_t j = 0; j < N; ++j) {
            in[j][0] = level[j].real();
            in[j][1] = level[j].imag();
            m2 += std::norm(level[j]);
        }
        c.total_mass += m2 / static_cast<double>(N);
        fftw_execute(plan);
        std::vector<double> row(static_cast<std::size_t>(2 * window + 1));
        for (long x = -window; x <= window; ++x) {
            std::size_t m = static_cast<std::size_t>((x + static_cast<long>(N)) % static_cast<long>(N));
            row[static_cast<std::size_t>(x + window)] = out[m][0] / static_cast<double>(N);
        }
        for (double v : row) inside += v * v;
        c.rho.push_back(std::move(row));
        for (std::size_t j = 0; j < N; ++j) level[j] *= xs[j];
    }
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    c.tail_mass = std::max(0.0, c.total_mass - inside);
    if (c.tail_mass > 1e-10)
        throw NumericalError("coefficient window too small: tail mass " + std::to_string(c.tail_mass) +
                             " outside |x| <= " + std::to_string(window));
    return c;
}

double fd_residual(const FDCoefficients& c) {
    const double g = c.params.gamma(), l = c.params.lambda;
    double s = 0;
    for (std::size_t k = 1; k <= c.K; ++k) {
        for (long x = -c.window - 1; x <= c.window + 1; ++x) {
            double F;
            if (k == 1)
                F = -2.0 * (2.0 * g + l) * c.at(1, x) + l * (c.at(2, x) + c.at(2, x - 1));
            else
                F = -4.0 * (g + l) * c.at(k, x) +
                    l * (c.at(k - 1, x) + c.at(k - 1, x + 1) + c.at(k + 1, x) + c.at(k + 1, x - 1));
            if (k == 1 && x == 0) F -= 2.0;
            s += F * F;
        }
    }
    return std::sqrt(s);
}

double recursion_residual(const ModelParams& p, std::size_t K, std::size_t grid) {
    const double g = p.gamma(), l = p.lambda;
    double worst = 0;
    for (double th : odd_grid(grid)) {
        const cplx X = X_of_theta(th, p);
        const cplx e = std::exp(2.0 * pi * I * th);
        std::vector<cplx> r(K + 2);
        r[1] = rho1_hat(th, p);
        for (std::size_t k = 2; k <= K + 1; ++k) r[k] = r[k - 1] * X;
        worst = std::max(worst, std::abs(-2.0 * (2.0 * g + l) * r[1] + l * (1.0 + e) * r[2] - 2.0));
        for (std::size_t k = 2; k <= K; ++k)
            worst = std::max(worst, std::abs(-4.0 * (g + l) * r[k] + l * (1.0 + std::conj(e)) * r[k - 1] +
                                             l * (1.0 + e) * r[k + 1]));
    }
    return worst;
}

EstimateBounds check_estimates(const ModelParams& p, std::size_t grid) {
    EstimateBounds b;
    const double ratio = p.gamma() / p.lambda;
    for (double th : odd_grid(grid)) {
        const double xb = std::cos(pi * th) / (1.0 + std::sqrt(ratio));
        const double ax = std::abs(X_of_theta(th, p));
        if (xb > 1e-300)
            b.worst_X = std::max(b.worst_X, ax / xb);
        else if (ax > 1e-15)
            b.worst_X = std::max(b.worst_X, 2.0);
        const double s = std::sin(pi * th);
        b.worst_rho = std::max(b.worst_rho, std::abs(rho1_hat(th, p)) * p.lambda * std::sqrt(ratio + s * s));
    }
    return b;
}

LocalizationFit localization(const ModelParams& p, std::size_t grid) {
    const double g = p.gamma();
    LocalizationFit f;
    f.k_first = static_cast<std::size_t>(std::ceil(1.0 / std::sqrt(g)));
    f.k_last = 4 * f.k_first;
    std::vector<double> r2(grid), x2(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        const double th = -0.5 + static_cast<double>(j) / static_cast<double>(grid);
        r2[j] = std::pow(rho1_hat(th, p), 2);
        x2[j] = std::norm(X_of_theta(th, p));
    }
    // least-squares slope of log ||rho_k||^2 against k
    double sk = 0, sy = 0, skk = 0, sky = 0;
    std::size_t cnt = 0;
    std::vector<double> pw(grid);
    for (std::size_t j = 0; j < grid; ++j) pw[j] = r2[j] * std::pow(x2[j], static_cast<double>(f.k_first - 1));
    for (std::size_t k = f.k_first; k <= f.k_last; ++k) {
        const double m = pairwise_sum(pw.data(), grid) / static_cast<double>(grid);
        const double y = std::log(m);
        sk += k;
        sy += y;
        skk += static_cast<double>(k) * k;
        sky += k * y;
        ++cnt;
        for (std::size_t j = 0; j < grid; ++j) pw[j] *= x2[j];
    }
    const double N = static_cast<double>(cnt);
    f.rate = -(N * sky - sk * sy) / (N * skk - sk * sk);
    f.rate_over_sqrt_gamma = f.rate / std::sqrt(g);
    f.rate_over_gamma = f.rate / g;
    return f;
}

namespace {

double bound_factor(double s, const ModelParams& p, ResolventBound kind) {
    const double g = p.gamma();
    if (kind == ResolventBound::simplified) {
        const double sn = std::sin(pi * s);
        return 1.0 / (g * (g + sn * sn));
    }
    const double r = rho1_hat(s, p);
    const double x = std::abs(X_of_theta(s, p));
    return r * r / ((1.0 - x) * (1.0 - x));
}

std::vector<double> breaks_around(std::vector<double> centers, double width) {
    std::vector<double> b{-0.5, 0.5};
    for (double c : centers)
        for (double m : {-8.0, -1.0, 0.0, 1.0, 8.0}) {
            double v = c + m * width;
            if (v > -0.5 && v < 0.5) b.push_back(v);
        }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), b.end());
    return b;
}

double integrate_breaks(const RealFn& f, const std::vector<double>& br, double tol) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) s += integrate(f, br[i], br[i + 1], tol);
    return s;
}

}  // namespace

double resolvent_integral(const ModelParams& p, double t, ResolventBound kind) {
    p.validate();
    if (!(t > 0)) throw ConfigError("t must be > 0");
    const double z = 1.0 / p.horizon(t);
    const double m = z + p.gamma();
    const double w = std::sqrt(p.gamma());
    auto outer = [&](double k1) {
        const double s1 = std::sin(pi * k1);
        auto inner = [&](double k2) {
            const double s2 = std::sin(pi * k2);
            return bound_factor(k1 + k2, p, kind) / (m + s1 * s1 + s2 * s2);
        };
        double wrapped = -k1;
        return integrate_breaks(inner, breaks_around({0.0, wrapped}, w), 1e-10);
    };
    return integrate_breaks(outer, breaks_around({0.0}, w), 1e-9);
}

double resolvent_integral_reduced(const ModelParams& p, double t, ResolventBound kind) {
    p.validate();
    if (!(t > 0)) throw ConfigError("t must be > 0");
    const double M = 1.0 + 1.0 / p.horizon(t) + p.gamma();
    auto f = [&](double s) {
        const double c = std::cos(pi * s);
        return bound_factor(s, p, kind) / std::sqrt(M * M - c * c);
    };
    return integrate_breaks(f, breaks_around({0.0}, std::sqrt(p.gamma())), 1e-12);
}

cplx phi_bracket(double k1, double k2, const ModelParams& p) {
    const double s = k1 + k2;
    const cplx X = X_of_theta(s, p);
    const double r1 = rho1_hat(s, p);
    const cplx q1 = std::exp(2.0 * pi * I * k1), q2 = std::exp(2.0 * pi * I * k2);
    // sum_{j>=2} q^j X^{j-1} = q^2 X/(1-qX), sum_{j>=2} (qX)^{j-1} = qX/(1-qX)
    const cplx g1 = X / (1.0 - q1 * X), g2 = X / (1.0 - q2 * X);
    cplx b = std::conj(q2) * q1 * q1 * g1 + std::conj(q1) * q2 * q2 * g2 + q1 * g1 + q2 * g2 + q1 * std::conj(q2) +
             q2 * std::conj(q1);
    return r1 * b;
}

double phi_bound_ratio(const ModelParams& p, std::size_t grid) {
    double worst = 0;
    auto g = odd_grid(grid);
    for (double k1 : g)
        for (double k2 : g) {
            const double s = k1 + k2;
            const double x = std::abs(X_of_theta(s, p));
            const double bound = std::pow(rho1_hat(s, p), 2) / ((1 - x) * (1 - x));
            worst = std::max(worst, std::norm(phi_bracket(k1, k2, p)) / bound);
        }
    return worst;
}

}  // namespace evanescent
