#include "evanescent/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "evanescent/params.hpp"

namespace evanescent {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

struct GaussRule {
    std::vector<double> x, w;
    GaussRule() {
        const auto& ab = gauss<double, 16>::abscissa();
        const auto& wt = gauss<double, 16>::weights();
        for (std::size_t i = 0; i < ab.size(); ++i) {
            x.push_back(ab[i]);
            w.push_back(wt[i]);
            x.push_back(-ab[i]);
            w.push_back(wt[i]);
        }
    }
};

const GaussRule& rule16() {
    static const GaussRule r;
    return r;
}

struct Panel {
    double lo, hi;
    cplx value;
    double error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod15(const CplxFn& f, double lo, double hi) {
    using K = gauss_kronrod<double, 15>;
    using G = gauss<double, 7>;
    const auto& x = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const cplx f0 = f(c);
    cplx k = wk[0] * f0, g = wg[0] * f0;
    double l1 = wk[0] * std::abs(f0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const cplx a = f(c - h * x[i]), b = f(c + h * x[i]);
        k += wk[i] * (a + b);
        l1 += wk[i] * (std::abs(a) + std::abs(b));
        if (i % 2 == 0) g += wg[i / 2] * (a + b);
    }
    return {lo, hi, k * h, std::abs(k - g) * h, l1 * std::abs(h)};
}

}  // namespace

double integrate(const RealFn& f, double lo, double hi, double tol) {
    return integrate_complex([&](double x) { return cplx(f(x), 0); }, lo, hi, tol).real();
}

cplx integrate_complex(const CplxFn& f, double lo, double hi, double tol) {
    return integrate_pieces(f, {lo, hi}, tol);
}

cplx integrate_pieces(const CplxFn& f, const std::vector<double>& breaks, double tol) {
    // globally adaptive: always split the panel with the largest error estimate
    std::priority_queue<Panel> heap;
    cplx total = 0;
    double err = 0, l1 = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] == breaks[i]) continue;
        Panel p = kronrod15(f, breaks[i], breaks[i + 1]);
        total += p.value;
        err += p.error;
        l1 += p.l1;
        heap.push(p);
    }
    const std::size_t max_panels = 200000;
    while (!heap.empty() && err > tol * l1 && heap.size() < max_panels) {
        Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) {
            p.error = 0;
            heap.push(p);
            continue;
        }
        Panel a = kronrod15(f, p.lo, mid), b = kronrod15(f, mid, p.hi);
        total += a.value + b.value - p.value;
        err += a.error + b.error - p.error;
        l1 += a.l1 + b.l1 - p.l1;
        heap.push(a);
        heap.push(b);
    }
    // re-add from the panels so the running sums carry no cancellation drift
    total = 0;
    err = 0;
    l1 = 0;
    std::vector<Panel> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    for (const Panel& p : all) {
        total += p.value;
        err += p.error;
        l1 += p.l1;
    }
    if (!std::isfinite(total.real()) || !std::isfinite(total.imag()))
        throw NumericalError("quadrature produced a non-finite value");
    if (err > 1e3 * tol * std::max(l1, 1e-300))
        throw NumericalError("adaptive quadrature did not converge (error " + std::to_string(err) + ")");
    return total;
}

cplx composite_gauss(const CplxFn& f, double lo, double hi, std::size_t panels) {
    const auto& r = rule16();
    const double h = (hi - lo) / static_cast<double>(panels);
    std::vector<double> re(panels), im(panels);
    for (std::size_t k = 0; k < panels; ++k) {
        const double mid = lo + (k + 0.5) * h;
        cplx s = 0;
        for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + 0.5 * h * r.x[i]);
        re[k] = s.real();
        im[k] = s.imag();
    }
    return cplx(pairwise_sum(re.data(), panels), pairwise_sum(im.data(), panels)) * (0.5 * h);
}

QuadResult doubling_gauss(const CplxFn& f, double lo, double hi, std::size_t panels, double tol,
                          std::size_t max_panels) {
    panels = std::max<std::size_t>(panels, 1);
    cplx prev = composite_gauss(f, lo, hi, panels);
    while (panels < max_panels) {
        panels *= 2;
        cplx cur = composite_gauss(f, lo, hi, panels);
        double d = std::abs(cur - prev);
        if (d < tol) return {cur, d, panels};
        prev = cur;
    }
    throw NumericalError("composite quadrature refinement did not settle below tolerance");
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace evanescent
