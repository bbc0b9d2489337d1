#include "evanescent/chain.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "evanescent/quadrature.hpp"

namespace evanescent {

namespace {

constexpr double pi = std::numbers::pi;

enum class Stream : std::uint32_t { gibbs = 1, noise = 2, initial = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index, Stream purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(purpose)};
    return std::mt19937_64(seq);
}

struct Plans {
    fftw_plan forward;
    fftw_plan backward;
};

std::mutex plan_mutex;

Plans plans_for(std::size_t L) {
    static std::map<std::size_t, Plans> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(L);
    if (it != cache.end()) return it->second;
    double* r = fftw_alloc_real(L);
    fftw_complex* c = fftw_alloc_complex(L / 2 + 1);
    int len = static_cast<int>(L);
    Plans p{fftw_plan_dft_r2c_1d(len, r, c, FFTW_ESTIMATE), fftw_plan_dft_c2r_1d(len, c, r, FFTW_ESTIMATE)};
    fftw_free(r);
    fftw_free(c);
    cache.emplace(L, p);
    return p;
}

void check_site(const ChainState& s, std::size_t x) {
    if (x >= s.L()) throw ConfigError("site index " + std::to_string(x) + " outside ring of size " +
                                      std::to_string(s.L()));
}

}  // namespace

double ChainState::energy() const {
    std::vector<double> sq(omega.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = omega[i] * omega[i];
    return pairwise_sum(sq.data(), sq.size());
}

double ChainState::volume() const { return pairwise_sum(omega.data(), omega.size()); }

ChainState make_state(std::vector<double> omega) {
    if (omega.size() < 4) throw ConfigError("ring size must be >= 4");
    ChainState s;
    s.omega = std::move(omega);
    s.energy0 = s.energy();
    return s;
}

ChainState sample_gibbs(const ModelParams& p, std::size_t L, std::uint64_t seed) {
    if (L < 4) throw ConfigError("ring size must be >= 4");
    p.validate();
    auto rng = make_rng(seed, 0, Stream::gibbs);
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(p.beta));
    std::vector<double> w(L);
    for (auto& v : w) v = g(rng);
    return make_state(std::move(w));
}

FreeEvolver::FreeEvolver(std::size_t L) : L_(L) {
    if (L < 4) throw ConfigError("ring size must be >= 4");
    real_ = fftw_alloc_real(L);
    spec_ = fftw_alloc_complex(L / 2 + 1);
    sines_.resize(L / 2 + 1);
    for (std::size_t k = 0; k <= L / 2; ++k) sines_[k] = 2.0 * std::sin(2.0 * pi * k / static_cast<double>(L));
    plans_for(L);
}

FreeEvolver::~FreeEvolver() {
    fftw_free(real_);
    fftw_free(spec_);
}

void FreeEvolver::advance(std::vector<double>& omega, double dt) {
    if (dt == 0) return;
    if (dt < 0) throw ConfigError("negative time step");
    auto plans = plans_for(L_);
    auto* spec = static_cast<fftw_complex*>(spec_);
    std::copy(omega.begin(), omega.end(), real_);
    fftw_execute_dft_r2c(plans.forward, real_, spec);
    // with hat w_k = sum_x w_x e^{-2i pi k x/L}, each mode obeys d/dt hat w_k = 2i sin(2 pi k/L) hat w_k
    for (std::size_t k = 0; k <= L_ / 2; ++k) {
        std::complex<double> z(spec[k][0], spec[k][1]);
        z *= std::polar(1.0, sines_[k] * dt);
        spec[k][0] = z.real();
        spec[k][1] = z.imag();
    }
    fftw_execute_dft_c2r(plans.backward, spec, real_);
    const double inv = 1.0 / static_cast<double>(L_);
    for (std::size_t i = 0; i < L_; ++i) omega[i] = real_[i] * inv;
}

ChainState evolve_free(ChainState s, double dt) {
    FreeEvolver ev(s.L());
    ev.advance(s.omega, dt);
    s.time += dt;
    return s;
}

void apply_flip(ChainState& s, std::size_t x) {
    check_site(s, x);
    s.omega[x] = -s.omega[x];
}

void apply_exchange(ChainState& s, std::size_t x) {
    check_site(s, x);
    std::swap(s.omega[x], s.omega[(x + 1) % s.L()]);
}

std::uint64_t event_budget(std::uint64_t fallback) {
    if (const char* env = std::getenv("EVANESCENT_MAX_EVENTS")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) return v;
        throw ConfigError("EVANESCENT_MAX_EVENTS is not a non-negative integer");
    }
    return fallback;
}

SimulationResult simulate(ChainState s, const ModelParams& p, double horizon, std::uint64_t seed,
                          std::uint64_t stream, FreeEvolver& ev, const SimOptions& opt) {
    if (horizon < 0) throw ConfigError("horizon must be >= 0");
    SimulationResult out;
    const double gamma = p.gamma();
    const double per_site = gamma + p.lambda;
    const double rate = per_site * static_cast<double>(s.L());
    const double t0 = s.time;
    const double t_end = t0 + horizon;
    double pending = 0;
    if (rate > 0) {
        auto rng = make_rng(seed, stream, Stream::noise);
        std::exponential_distribution<double> wait(rate);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> site(0, s.L() - 1);
        const double p_flip = gamma / per_site;
        double clock = t0;
        for (;;) {
            double next = clock + wait(rng);
            if (next >= t_end) break;
            if (opt.max_events && out.events >= opt.max_events) {
                out.complete = false;
                break;
            }
            pending += next - clock;
            clock = next;
            if (pending >= opt.merge_dt) {
                ev.advance(s.omega, pending);
                pending = 0;
            }
            bool flip = unit(rng) < p_flip;
            std::size_t x = site(rng);
            if (flip)
                apply_flip(s, x);
            else
                apply_exchange(s, x);
            ++out.events;
            if (opt.record_log) out.log.push_back({next, flip ? NoiseKind::flip : NoiseKind::exchange, x});
        }
        if (!out.complete) {
            ev.advance(s.omega, pending);
            s.time = clock;
            out.state = std::move(s);
            return out;
        }
        pending += t_end - clock;
    } else {
        pending = horizon;
    }
    ev.advance(s.omega, pending);
    s.time = t_end;
    out.state = std::move(s);
    return out;
}

SimulationResult simulate(ChainState s, const ModelParams& p, double horizon, std::uint64_t seed,
                          const SimOptions& opt) {
    p.validate();
    FreeEvolver ev(s.L());
    SimOptions o = opt;
    if (!o.max_events) o.max_events = event_budget();
    return simulate(std::move(s), p, horizon, seed, 0, ev, o);
}

namespace {

// Replica fan-out with a reduction order fixed by block index, not by worker.
// Each replica writes `width` observations; sums and squared sums are reduced.
struct Moments {
    std::vector<double> sum, sumsq;
    std::uint64_t events = 0;
};

constexpr std::size_t block_size = 32;

template <class Replica>
Moments run_replicas(std::size_t replicas, std::size_t width, unsigned threads, Replica&& replica) {
    const std::size_t blocks = (replicas + block_size - 1) / block_size;
    std::vector<std::vector<double>> bsum(blocks, std::vector<double>(width)), bsq(blocks, std::vector<double>(width));
    std::vector<std::uint64_t> bev(blocks, 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        std::vector<double> obs(width);
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                for (std::size_t r = b * block_size; r < std::min(replicas, (b + 1) * block_size); ++r) {
                    bev[b] += replica(r, obs);
                    for (std::size_t i = 0; i < width; ++i) {
                        bsum[b][i] += obs[i];
                        bsq[b][i] += obs[i] * obs[i];
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = blocks;
                return;
            }
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    Moments m;
    m.sum.resize(width);
    m.sumsq.resize(width);
    std::vector<double> col(blocks);
    for (std::size_t i = 0; i < width; ++i) {
        for (std::size_t b = 0; b < blocks; ++b) col[b] = bsum[b][i];
        m.sum[i] = pairwise_sum(col.data(), blocks);
        for (std::size_t b = 0; b < blocks; ++b) col[b] = bsq[b][i];
        m.sumsq[i] = pairwise_sum(col.data(), blocks);
    }
    for (auto e : bev) m.events += e;
    return m;
}

void finish(const Moments& m, std::size_t replicas, std::size_t offset, std::size_t count, double scale,
            std::vector<double>& mean, std::vector<double>& se) {
    const double N = static_cast<double>(replicas);
    mean.resize(count);
    se.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        double mu = m.sum[offset + i] / N;
        double var = std::max(0.0, (m.sumsq[offset + i] / N - mu * mu) * N / (N - 1));
        mean[i] = scale * mu;
        se[i] = std::abs(scale) * std::sqrt(var / N);
    }
}

std::uint64_t trajectory_budget(const EstimatorOptions& opt) {
    return opt.max_events ? opt.max_events : event_budget();
}

SimulationResult flow_column(const ModelParams& p, double horizon, std::size_t L, std::uint64_t seed,
                             std::size_t r, FreeEvolver& ev, std::uint64_t budget) {
    std::vector<double> e0(L, 0.0);
    e0[0] = 1.0;
    SimOptions so;
    so.record_log = false;
    so.max_events = budget;
    auto res = simulate(make_state(std::move(e0)), p, horizon, seed, r, ev, so);
    if (!res.complete)
        throw BudgetExceeded("event budget of " + std::to_string(budget) + " exhausted in replica " +
                             std::to_string(r));
    return res;
}

void precheck(const ModelParams& p, std::size_t replicas, std::size_t L) {
    p.validate();
    if (replicas < 2) throw ConfigError("replicas must be >= 2");
    if (L < 4) throw ConfigError("ring size must be >= 4");
}

void gate(KernelEstimate& k, const EstimatorOptions& opt) {
    k.boundary_mass = outer_mass_fraction(k.mean, opt.boundary_fraction);
    k.finite_size_warning = k.boundary_mass > opt.boundary_threshold;
}

}  // namespace

KernelEstimate estimate_energy_correlation(const ModelParams& p, double t, std::size_t replicas,
                                           std::size_t L, std::uint64_t seed, const EstimatorOptions& opt) {
    precheck(p, replicas, L);
    const double horizon = p.horizon(t);
    const auto budget = trajectory_budget(opt);
    auto m = run_replicas(replicas, L, opt.threads, [&](std::size_t r, std::vector<double>& obs) {
        thread_local std::unique_ptr<FreeEvolver> ev;
        if (!ev || ev->size() != L) ev = std::make_unique<FreeEvolver>(L);
        auto res = flow_column(p, horizon, L, seed, r, *ev, budget);
        for (std::size_t z = 0; z < L; ++z) obs[z] = res.state.omega[z] * res.state.omega[z];
        return res.events;
    });
    KernelEstimate k;
    finish(m, replicas, 0, L, 2.0 / (p.beta * p.beta), k.mean, k.stderr_);
    k.events = m.events;
    gate(k, opt);
    return k;
}

KernelEstimate estimate_volume_correlation(const ModelParams& p, double t, std::size_t replicas,
                                           std::size_t L, std::uint64_t seed, const EstimatorOptions& opt) {
    precheck(p, replicas, L);
    const double horizon = p.horizon(t);
    const auto budget = trajectory_budget(opt);
    const std::size_t modes = L / 2 + 1;
    auto m = run_replicas(replicas, L + 2 * modes, opt.threads, [&](std::size_t r, std::vector<double>& obs) {
        thread_local std::unique_ptr<FreeEvolver> ev;
        if (!ev || ev->size() != L) ev = std::make_unique<FreeEvolver>(L);
        auto res = flow_column(p, horizon, L, seed, r, *ev, budget);
        const auto& v = res.state.omega;
        std::copy(v.begin(), v.end(), obs.begin());
        for (std::size_t k = 0; k < modes; ++k) {
            std::complex<double> s = 0;
            for (std::size_t z = 0; z < L; ++z)
                s += v[z] * std::polar(1.0, 2.0 * pi * static_cast<double>(k * z % L) / static_cast<double>(L));
            obs[L + k] = s.real();
            obs[L + modes + k] = s.imag();
        }
        return res.events;
    });
    KernelEstimate k;
    const double inv_beta = 1.0 / p.beta;
    finish(m, replicas, 0, L, inv_beta, k.mean, k.stderr_);
    finish(m, replicas, L, modes, inv_beta, k.theta_re, k.theta_re_se);
    finish(m, replicas, L + modes, modes, inv_beta, k.theta_im, k.theta_im_se);
    k.events = m.events;
    gate(k, opt);
    return k;
}

PairEstimate estimate_pair_moments(const ModelParams& p, double horizon, std::size_t replicas, std::size_t L,
                                   std::uint64_t seed, const EstimatorOptions& opt) {
    precheck(p, replicas, L);
    const auto budget = trajectory_budget(opt);
    auto m = run_replicas(replicas, L * L, opt.threads, [&](std::size_t r, std::vector<double>& obs) {
        thread_local std::unique_ptr<FreeEvolver> ev;
        if (!ev || ev->size() != L) ev = std::make_unique<FreeEvolver>(L);
        auto res = flow_column(p, horizon, L, seed, r, *ev, budget);
        const auto& v = res.state.omega;
        for (std::size_t x = 0; x < L; ++x)
            for (std::size_t y = 0; y < L; ++y) obs[x * L + y] = v[x] * v[y];
        return res.events;
    });
    PairEstimate e;
    e.L = L;
    finish(m, replicas, 0, L * L, 1.0, e.mean, e.stderr_);
    return e;
}

KernelEstimate estimate_energy_correlation_gibbs(const ModelParams& p, double horizon, std::size_t replicas,
                                                 std::size_t L, std::uint64_t seed,
                                                 const EstimatorOptions& opt) {
    precheck(p, replicas, L);
    const auto budget = trajectory_budget(opt);
    auto m = run_replicas(replicas, L, opt.threads, [&](std::size_t r, std::vector<double>& obs) {
        thread_local std::unique_ptr<FreeEvolver> ev;
        if (!ev || ev->size() != L) ev = std::make_unique<FreeEvolver>(L);
        auto rng = make_rng(seed, r, Stream::initial);
        std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(p.beta));
        std::vector<double> w(L);
        for (auto& v : w) v = g(rng);
        const double centred = w[0] * w[0] - 1.0 / p.beta;
        SimOptions so;
        so.record_log = false;
        so.max_events = budget;
        auto res = simulate(make_state(std::move(w)), p, horizon, seed, r, *ev, so);
        if (!res.complete) throw BudgetExceeded("event budget exhausted in replica " + std::to_string(r));
        for (std::size_t z = 0; z < L; ++z) obs[z] = res.state.omega[z] * res.state.omega[z] * centred;
        return res.events;
    });
    KernelEstimate k;
    finish(m, replicas, 0, L, 1.0, k.mean, k.stderr_);
    k.events = m.events;
    return k;
}

double outer_mass_fraction(const std::vector<double>& kernel, double fraction) {
    const std::size_t L = kernel.size();
    if (L == 0) return 0;
    double total = 0, outer = 0;
    const double cut = 0.5 * (1.0 - fraction) * static_cast<double>(L);
    for (std::size_t z = 0; z < L; ++z) {
        double d = static_cast<double>(std::min(z, L - z));
        total += std::abs(kernel[z]);
        if (d > cut) outer += std::abs(kernel[z]);
    }
    return total > 0 ? outer / total : 0;
}

}  // namespace evanescent
