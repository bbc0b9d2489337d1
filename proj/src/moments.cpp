#include "evanescent/moments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "evanescent/chain.hpp"
#include "evanescent/quadrature.hpp"

namespace evanescent {

namespace {
constexpr double pi = std::numbers::pi;
}

long signed_site(std::size_t z, std::size_t L) {
    return z <= L / 2 ? static_cast<long>(z) : static_cast<long>(z) - static_cast<long>(L);
}

PairCorrelation::PairCorrelation(std::size_t L) : L_(L), data_(L * (L + 1) / 2, 0.0) {
    if (L < 4) throw ConfigError("ring size must be >= 4");
}

PairCorrelation PairCorrelation::unit_at_origin(std::size_t L) {
    PairCorrelation c(L);
    c.at(0, 0) = 1.0;
    return c;
}

std::size_t PairCorrelation::index(std::size_t x, std::size_t y) const {
    if (x > y) std::swap(x, y);
    return x * L_ - x * (x - 1) / 2 + (y - x);
}

double PairCorrelation::trace() const {
    std::vector<double> d(L_);
    for (std::size_t x = 0; x < L_; ++x) d[x] = (*this)(x, x);
    return pairwise_sum(d.data(), L_);
}

double PairGenerator::entry(std::size_t row, std::size_t col) const {
    for (std::size_t k = row_start[row]; k < row_start[row + 1]; ++k)
        if (column[k] == col) return value[k];
    return 0.0;
}

void PairGenerator::apply(const std::vector<double>& in, std::vector<double>& out) const {
    const std::size_t n = dimension();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) s += value[k] * in[column[k]];
        out[i] = s;
    }
}

PairGenerator build_pair_generator(const ModelParams& p, std::size_t L) {
    if (L < 4) throw ConfigError("ring size must be >= 4");
    const double gamma = p.gamma();
    PairCorrelation shape(L);
    PairGenerator g;
    g.L = L;
    g.row_start.push_back(0);
    auto wrap = [L](long v) { return static_cast<std::size_t>(((v % static_cast<long>(L)) + static_cast<long>(L)) % static_cast<long>(L)); };
    for (std::size_t x = 0; x < L; ++x) {
        for (std::size_t y = x; y < L; ++y) {
            std::map<std::size_t, double> row;
            const long X = static_cast<long>(x), Y = static_cast<long>(y);
            // drift: d/dt (w_x w_y) = (w_{x+1} - w_{x-1}) w_y + w_x (w_{y+1} - w_{y-1})
            row[shape.index(wrap(X + 1), y)] += 1.0;
            row[shape.index(wrap(X - 1), y)] -= 1.0;
            row[shape.index(x, wrap(Y + 1))] += 1.0;
            row[shape.index(x, wrap(Y - 1))] -= 1.0;
            if (x != y) row[shape.index(x, y)] -= 4.0 * gamma;
            // exchanges across every bond touching x or y
            std::vector<std::size_t> bonds{wrap(X - 1), x, wrap(Y - 1), y};
            std::sort(bonds.begin(), bonds.end());
            bonds.erase(std::unique(bonds.begin(), bonds.end()), bonds.end());
            for (std::size_t z : bonds) {
                const std::size_t z1 = (z + 1) % L;
                auto swap = [&](std::size_t s) { return s == z ? z1 : (s == z1 ? z : s); };
                row[shape.index(swap(x), swap(y))] += p.lambda;
                row[shape.index(x, y)] -= p.lambda;
            }
            for (auto [col, v] : row) {
                if (v == 0.0) continue;
                g.column.push_back(col);
                g.value.push_back(v);
            }
            g.row_start.push_back(g.column.size());
        }
    }
    return g;
}

double stable_step(const ModelParams& p) { return 0.5 / (1.0 + 4.0 * p.lambda + 4.0 * p.gamma()); }

namespace {

std::size_t step_count(double T, double dt) {
    if (dt <= 0) throw ConfigError("time step must be > 0");
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
}

template <class Apply>
void rk4(std::vector<double>& y, double h, std::size_t steps, Apply&& apply) {
    const std::size_t n = y.size();
    std::vector<double> k(n), tmp(n), acc(n);
    for (std::size_t s = 0; s < steps; ++s) {
        apply(y, k);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] = y[i] + h / 6 * k[i];
            tmp[i] = y[i] + h / 2 * k[i];
        }
        apply(tmp, k);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] += h / 3 * k[i];
            tmp[i] = y[i] + h / 2 * k[i];
        }
        apply(tmp, k);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] += h / 3 * k[i];
            tmp[i] = y[i] + h * k[i];
        }
        apply(tmp, k);
        for (std::size_t i = 0; i < n; ++i) y[i] = acc[i] + h / 6 * k[i];
    }
}

}  // namespace

PairCorrelation evolve_pair(const PairCorrelation& c0, const ModelParams& p, double T, double dt,
                            EvolveReport* report) {
    if (T < 0) throw ConfigError("evolution time must be >= 0");
    if (dt > stable_step(p) * (1 + 1e-12)) throw ConfigError("time step above the stability bound");
    PairCorrelation c = c0;
    EvolveReport rep;
    if (T > 0) {
        auto g = build_pair_generator(p, c0.L());
        rep.steps = step_count(T, dt);
        const double h = T / static_cast<double>(rep.steps);
        const double tr0 = c0.trace();
        const std::size_t chunk = 1000;
        for (std::size_t done = 0; done < rep.steps; done += chunk) {
            std::size_t m = std::min(chunk, rep.steps - done);
            rk4(c.packed(), h, m, [&](const std::vector<double>& in, std::vector<double>& out) { g.apply(in, out); });
            rep.trace_drift = std::abs(c.trace() - tr0);
            if (!(rep.trace_drift <= 1e-6))
                throw NumericalError("pair evolution unstable: trace drift " + std::to_string(rep.trace_drift) +
                                     " after " + std::to_string(done + m) + " steps");
        }
    }
    c.time = c0.time + T;
    if (report) *report = rep;
    return c;
}

FirstMoment volume_kernel(const ModelParams& p, double t, std::size_t L, double dt) {
    p.validate();
    if (L < 4) throw ConfigError("ring size must be >= 4");
    if (t < 0) throw ConfigError("t must be >= 0");
    if (dt > stable_step(p) * (1 + 1e-12)) throw ConfigError("time step above the stability bound");
    const double T = p.horizon(t);
    const double gamma = p.gamma();
    FirstMoment fm;
    fm.L = L;
    fm.m.assign(L, 0.0);
    fm.m[0] = 1.0 / p.beta;
    fm.time = T;
    if (T == 0) return fm;
    const std::size_t steps = step_count(T, dt);
    rk4(fm.m, T / static_cast<double>(steps), steps, [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t x = 0; x < L; ++x) {
            const double up = in[(x + 1) % L], dn = in[(x + L - 1) % L];
            out[x] = up - dn - 2.0 * gamma * in[x] + p.lambda * (up + dn - 2.0 * in[x]);
        }
    });
    return fm;
}

namespace {

// A batch of centre-of-mass sectors p, each a tridiagonal complex system in the separation r.
// Storage is [row][sector] with one zero pad row at each end.
class SectorBatch {
public:
    SectorBatch(const ModelParams& p, std::size_t L, std::vector<std::size_t> sectors, long window)
        : L_(L), B_(sectors.size()), sectors_(std::move(sectors)) {
        periodic_ = 2 * window + 1 >= static_cast<long>(L);
        rows_ = periodic_ ? L : static_cast<std::size_t>(2 * window + 1);
        R_ = periodic_ ? 0 : window;
        const double gamma = p.gamma(), lam = p.lambda;
        // coefficient tables for four row kinds: r = 0, r = 1, r = -1, bulk
        for (auto* v : {&up_re_, &up_im_, &dn_re_, &dn_im_, &dg_re_, &dg_im_}) v->assign(4 * B_, 0.0);
        for (std::size_t b = 0; b < B_; ++b) {
            const std::complex<double> u = std::polar(1.0, 2.0 * pi * static_cast<double>(sectors_[b]) / static_cast<double>(L));
            const std::complex<double> ub = std::conj(u);
            const std::complex<double> tup = 1.0 - u, tdn = -(1.0 - ub);
            const std::complex<double> eup = lam * (1.0 + u), edn = lam * (1.0 + ub);
            std::complex<double> up[4] = {tup, tup + eup, tup, tup + eup};
            std::complex<double> dn[4] = {tdn, tdn, tdn + edn, tdn + edn};
            std::complex<double> dg[4] = {lam * (u + ub - 2.0), -2.0 * lam - 4.0 * gamma, -2.0 * lam - 4.0 * gamma,
                                          -4.0 * lam - 4.0 * gamma};
            for (int k = 0; k < 4; ++k) {
                up_re_[k * B_ + b] = up[k].real();
                up_im_[k * B_ + b] = up[k].imag();
                dn_re_[k * B_ + b] = dn[k].real();
                dn_im_[k * B_ + b] = dn[k].imag();
                dg_re_[k * B_ + b] = dg[k].real();
                dg_im_[k * B_ + b] = dg[k].imag();
            }
        }
        kind_.resize(rows_);
        up_.resize(rows_);
        dn_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            long r = separation(i);
            kind_[i] = r == 0 ? 0 : (r == 1 ? 1 : (r == -1 ? 2 : 3));
            // storage row = i + 1; rows 0 and rows_+1 are the zero pads
            if (periodic_) {
                up_[i] = (i + 1) % rows_ + 1;
                dn_[i] = (i + rows_ - 1) % rows_ + 1;
            } else {
                up_[i] = i + 2;
                dn_[i] = i;
            }
        }
        const std::size_t n = (rows_ + 2) * B_;
        re_.assign(n, 0.0);
        im_.assign(n, 0.0);
        for (std::size_t b = 0; b < B_; ++b) re_[(origin_row() + 1) * B_ + b] = 1.0;
    }

    long separation(std::size_t i) const {
        if (periodic_) return static_cast<long>(i) <= static_cast<long>(L_) / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(L_);
        return static_cast<long>(i) - R_;
    }
    std::size_t origin_row() const { return periodic_ ? 0 : static_cast<std::size_t>(R_); }
    bool periodic() const { return periodic_; }

    void apply(const std::vector<double>& xr, const std::vector<double>& xi, std::vector<double>& yr,
               std::vector<double>& yi) const {
        const std::size_t B = B_;
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t k = kind_[i] * B;
            const double* ur = &xr[up_[i] * B];
            const double* ui = &xi[up_[i] * B];
            const double* dr = &xr[dn_[i] * B];
            const double* di = &xi[dn_[i] * B];
            const double* cr = &xr[(i + 1) * B];
            const double* ci = &xi[(i + 1) * B];
            double* outr = &yr[(i + 1) * B];
            double* outi = &yi[(i + 1) * B];
            const double* aur = &up_re_[k];
            const double* aui = &up_im_[k];
            const double* adr = &dn_re_[k];
            const double* adi = &dn_im_[k];
            const double* agr = &dg_re_[k];
            const double* agi = &dg_im_[k];
            for (std::size_t b = 0; b < B; ++b) {
                outr[b] = aur[b] * ur[b] - aui[b] * ui[b] + adr[b] * dr[b] - adi[b] * di[b] + agr[b] * cr[b] -
                          agi[b] * ci[b];
                outi[b] = aur[b] * ui[b] + aui[b] * ur[b] + adr[b] * di[b] + adi[b] * dr[b] + agr[b] * ci[b] +
                          agi[b] * cr[b];
            }
        }
    }

    // Advances by `steps` RK4 steps of size h.
    void advance(double h, std::size_t steps) {
        const std::size_t n = re_.size();
        if (kr_.size() != n)
            for (auto* v : {&kr_, &ki_, &tr_, &ti_, &ar_, &ai_}) v->assign(n, 0.0);
        for (std::size_t s = 0; s < steps; ++s) {
            apply(re_, im_, kr_, ki_);
            for (std::size_t j = B_; j < n - B_; ++j) {
                ar_[j] = re_[j] + h / 6 * kr_[j];
                ai_[j] = im_[j] + h / 6 * ki_[j];
                tr_[j] = re_[j] + h / 2 * kr_[j];
                ti_[j] = im_[j] + h / 2 * ki_[j];
            }
            apply(tr_, ti_, kr_, ki_);
            for (std::size_t j = B_; j < n - B_; ++j) {
                ar_[j] += h / 3 * kr_[j];
                ai_[j] += h / 3 * ki_[j];
                tr_[j] = re_[j] + h / 2 * kr_[j];
                ti_[j] = im_[j] + h / 2 * ki_[j];
            }
            apply(tr_, ti_, kr_, ki_);
            for (std::size_t j = B_; j < n - B_; ++j) {
                ar_[j] += h / 3 * kr_[j];
                ai_[j] += h / 3 * ki_[j];
                tr_[j] = re_[j] + h * kr_[j];
                ti_[j] = im_[j] + h * ki_[j];
            }
            apply(tr_, ti_, kr_, ki_);
            for (std::size_t j = B_; j < n - B_; ++j) {
                re_[j] = ar_[j] + h / 6 * kr_[j];
                im_[j] = ai_[j] + h / 6 * ki_[j];
            }
        }
    }

    std::complex<double> at_origin(std::size_t b) const {
        const std::size_t j = (origin_row() + 1) * B_ + b;
        return {re_[j], im_[j]};
    }

    // largest modulus on the two outermost rows at each end of the window
    double edge() const {
        if (periodic_) return 0;
        double e = 0;
        for (std::size_t i : {std::size_t(0), std::size_t(1), rows_ - 2, rows_ - 1})
            for (std::size_t b = 0; b < B_; ++b) {
                const std::size_t j = (i + 1) * B_ + b;
                e = std::max(e, std::hypot(re_[j], im_[j]));
            }
        return e;
    }

private:
    std::size_t L_, B_;
    std::vector<std::size_t> sectors_;
    bool periodic_ = false;
    std::size_t rows_ = 0;
    long R_ = 0;
    std::vector<double> up_re_, up_im_, dn_re_, dn_im_, dg_re_, dg_im_;
    std::vector<unsigned char> kind_;
    std::vector<std::size_t> up_, dn_;
    std::vector<double> re_, im_;
    std::vector<double> kr_, ki_, tr_, ti_, ar_, ai_;
};

}  // namespace

EnergyKernel energy_kernel(const ModelParams& p, double t, std::size_t L, double dt, const SectorOptions& opt) {
    p.validate();
    if (L < 4) throw ConfigError("ring size must be >= 4");
    if (t < 0) throw ConfigError("t must be >= 0");
    if (dt > stable_step(p) * (1 + 1e-12)) throw ConfigError("time step above the stability bound");
    const double T = p.horizon(t);
    const double scale = 2.0 / (p.beta * p.beta);
    EnergyKernel k;
    if (T == 0) {
        k.S.assign(L, 0.0);
        k.S[0] = scale;
        k.sectors = 1;
        k.mass = 1;
        return k;
    }
    const std::size_t steps = step_count(T, dt);
    const double h = T / static_cast<double>(steps);
    const std::size_t last = L / 2;
    long window = static_cast<long>(std::max<std::size_t>(opt.initial_window, 4));
    std::vector<std::complex<double>> phi;  // phi_p(0) for p = 0, 1, ...
    std::size_t quiet = 0;
    std::size_t next = 0;
    const std::size_t check_every = 512;
    while (next <= last && quiet < opt.quiet_sectors) {
        std::vector<std::size_t> batch;
        for (std::size_t q = next; q <= last && batch.size() < opt.batch; ++q) batch.push_back(q);
        for (;;) {
            SectorBatch sb(p, L, batch, window);
            bool widened = false;
            for (std::size_t done = 0; done < steps; done += check_every) {
                sb.advance(h, std::min(check_every, steps - done));
                if (sb.edge() > opt.edge_tol) {
                    window *= 2;
                    widened = true;
                    break;
                }
            }
            if (widened) continue;
            k.edge = std::max(k.edge, sb.edge());
            k.window = sb.periodic() ? L / 2 : static_cast<std::size_t>(window);
            for (std::size_t b = 0; b < batch.size(); ++b) phi.push_back(sb.at_origin(b));
            k.steps += steps;
            break;
        }
        next += batch.size();
        const double ref = std::abs(phi[0]);
        quiet = 0;
        for (std::size_t q = phi.size(); q-- > 1;) {
            if (std::abs(phi[q]) < opt.sector_tol * ref)
                ++quiet;
            else
                break;
        }
    }
    k.sectors = phi.size();
    k.S.assign(L, 0.0);
    for (std::size_t z = 0; z < L; ++z) {
        double s = phi[0].real();
        for (std::size_t q = 1; q < phi.size(); ++q) {
            const std::complex<double> e = std::polar(1.0, -2.0 * pi * static_cast<double>((q * z) % L) / static_cast<double>(L));
            const double term = (e * phi[q]).real();
            s += (2 * q == L) ? term : 2.0 * term;
        }
        k.S[z] = scale * s / static_cast<double>(L);
    }
    k.mass = pairwise_sum(k.S.data(), L) / scale;
    k.outer_mass = outer_mass_fraction(k.S);
    k.finite_size_warning = k.outer_mass > 1e-6;
    return k;
}

EnergyKernel energy_kernel_dense(const ModelParams& p, double t, std::size_t L, double dt) {
    p.validate();
    EvolveReport rep;
    auto c = evolve_pair(PairCorrelation::unit_at_origin(L), p, p.horizon(t), dt, &rep);
    const double scale = 2.0 / (p.beta * p.beta);
    EnergyKernel k;
    k.S.resize(L);
    for (std::size_t z = 0; z < L; ++z) k.S[z] = scale * c(z, z);
    k.mass = c.trace();
    k.steps = rep.steps;
    k.window = L / 2;
    k.sectors = L;
    k.outer_mass = outer_mass_fraction(k.S);
    k.finite_size_warning = k.outer_mass > 1e-6;
    return k;
}

double pair_field(const std::vector<double>& kernel, const TestFunction& f, const TestFunction& h, long n) {
    const std::size_t L = kernel.size();
    if (L == 0) return 0.0;
    auto hs = sample_lattice(h, n);
    std::vector<long> offsets;
    std::vector<double> weights;
    for (std::size_t z = 0; z < L; ++z)
        if (kernel[z] != 0.0) {
            offsets.push_back(signed_site(z, L));
            weights.push_back(kernel[z]);
        }
    std::vector<double> rows(hs.values.size());
    std::vector<double> terms(offsets.size());
    for (std::size_t i = 0; i < hs.values.size(); ++i) {
        const long y = hs.first + static_cast<long>(i);
        for (std::size_t j = 0; j < offsets.size(); ++j)
            terms[j] = f.eval(static_cast<double>(y + offsets[j]) / static_cast<double>(n)) * weights[j];
        rows[i] = hs.values[i] * pairwise_sum(terms.data(), terms.size());
    }
    return pairwise_sum(rows.data(), rows.size()) / static_cast<double>(n);
}

}  // namespace evanescent
