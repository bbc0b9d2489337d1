#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evanescent/chain.hpp"
#include "evanescent/fd.hpp"
#include "evanescent/fractional.hpp"
#include "evanescent/harness.hpp"
#include "evanescent/moments.hpp"
#include "evanescent/theorems.hpp"
#include "evanescent/volume.hpp"

namespace py = pybind11;
using namespace evanescent;

namespace {

/**
 * Gaussian test function from keyword-style arguments.
 */
TestFunction make_gaussian(double amplitude, double width, double center, bool odd) {
    return odd ? gaussian_odd(amplitude, width, center) : gaussian(amplitude, width, center);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Evanescent flip noise: chain simulation, correlation solvers and kernels.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double lambda, double c, double b, long n, double beta, double a) {
                 ModelParams p{lambda, c, b, n, beta, a};
                 p.validate();
                 return p;
             }),
             py::arg("lam") = 1.0, py::arg("c") = 1.0, py::arg("b") = 0.5, py::arg("n") = 64,
             py::arg("beta") = 1.0, py::arg("a") = 1.75)
        .def_readwrite("lam", &ModelParams::lambda)
        .def_readwrite("c", &ModelParams::c)
        .def_readwrite("b", &ModelParams::b)
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("a", &ModelParams::a)
        .def_property_readonly("gamma", &ModelParams::gamma)
        .def("horizon", &ModelParams::horizon, py::arg("t"))
        .def("__repr__", [](const ModelParams& p) {
            std::ostringstream s;
            s << "ModelParams(lam=" << p.lambda << ", c=" << p.c << ", b=" << p.b << ", n=" << p.n
              << ", beta=" << p.beta << ", a=" << p.a << ")";
            return s.str();
        });

    py::class_<TestFunction>(m, "TestFunction")
        .def("__call__", [](const TestFunction& f, double x) { return f(x); })
        .def("ft", [](const TestFunction& f, double xi) { return f.ft(xi); }, py::arg("xi"));
    m.def("gaussian", &make_gaussian, py::arg("amplitude") = 1.0, py::arg("width") = 1.0,
          py::arg("center") = 0.0, py::arg("odd") = false);

    // chain
    m.def("sample_gibbs", [](const ModelParams& p, std::size_t L, std::uint64_t seed) {
        return sample_gibbs(p, L, seed).omega;
    }, py::arg("params"), py::arg("L"), py::arg("seed"));
    m.def("simulate", [](std::vector<double> omega, const ModelParams& p, double horizon, std::uint64_t seed,
                         std::uint64_t max_events) {
        SimOptions opt;
        opt.max_events = max_events;
        opt.record_log = false;
        SimulationResult r;
        {
            py::gil_scoped_release release;
            r = simulate(make_state(std::move(omega)), p, horizon, seed, opt);
        }
        py::dict out;
        out["omega"] = r.state.omega;
        out["time"] = r.state.time;
        out["events"] = r.events;
        out["complete"] = r.complete;
        return out;
    }, py::arg("omega"), py::arg("params"), py::arg("horizon"), py::arg("seed"), py::arg("max_events") = 0);

    // moments
    m.def("energy_kernel", [](const ModelParams& p, double t, std::size_t L) {
        EnergyKernel k;
        {
            py::gil_scoped_release release;
            k = energy_kernel(p, t, L, stable_step(p));
        }
        py::dict out;
        out["S"] = k.S;
        out["mass"] = k.mass;
        out["sectors"] = k.sectors;
        out["outer_mass"] = k.outer_mass;
        return out;
    }, py::arg("params"), py::arg("t"), py::arg("L"));
    m.def("volume_kernel", [](const ModelParams& p, double t, std::size_t L) {
        return volume_kernel(p, t, L, stable_step(p)).m;
    }, py::arg("params"), py::arg("t"), py::arg("L"));

    // spectral volume
    m.def("eta", [](const TestFunction& f, const TestFunction& h, double t, const ModelParams& p, bool translated) {
        return translated ? eta_tilde(f, h, t, p).value : eta(f, h, t, p).value;
    }, py::arg("f"), py::arg("h"), py::arg("t"), py::arg("params"), py::arg("translated") = false);
    m.def("classify_regime", [](double a, double b, double lambda, double c) {
        RegimeLabel r = classify_regime(a, b, lambda, c);
        py::dict out;
        out["label"] = r.name();
        out["case"] = r.case_id;
        out["transport"] = r.transport;
        out["diffusion"] = r.diffusion;
        out["relaxation"] = r.relaxation;
        out["translated"] = r.translated;
        return out;
    }, py::arg("a"), py::arg("b"), py::arg("lam") = 1.0, py::arg("c") = 1.0);
    m.def("limit_correlation", [](double a, double b, const TestFunction& f, const TestFunction& h, double t,
                                  const ModelParams& p) {
        return limit_correlation(classify_regime(a, b, p.lambda, p.c), f, h, t, p);
    }, py::arg("a"), py::arg("b"), py::arg("f"), py::arg("h"), py::arg("t"), py::arg("params"));
    m.def("classify_energy", [](double a, double b) { return energy_regime_name(classify_energy(a, b)); },
          py::arg("a"), py::arg("b"));

    // fd
    m.def("fd_residual", [](const ModelParams& p, std::size_t K, long window) {
        return fd_residual(rho_coefficients(p, K, window));
    }, py::arg("params"), py::arg("K"), py::arg("window"));
    m.def("resolvent_integral", [](const ModelParams& p, double t) { return resolvent_integral(p, t); },
          py::arg("params"), py::arg("t"));

    // fractional
    m.def("G0", &G0, py::arg("y"));
    m.def("Gn_residue", &Gn_residue, py::arg("y"), py::arg("gamma"));
    m.def("Gn_quadrature", [](double y, const ModelParams& p) { return Gn(y, p).quadrature; },
          py::arg("y"), py::arg("params"));
    m.def("kernel", [](double t, std::vector<double> u) {
        std::vector<KernelValue> v;
        {
            py::gil_scoped_release release;
            v = fractional_kernel(t, u);
        }
        std::vector<double> out;
        out.reserve(v.size());
        for (const auto& k : v) out.push_back(k.value);
        return out;
    }, py::arg("t"), py::arg("u"));
    m.def("kernel_mass", [](double t) { return kernel_mass(t).mass; }, py::arg("t"));

    m.def("lemma_checks", [] {
        std::vector<Check> checks;
        {
            py::gil_scoped_release release;
            checks = lemma_checks();
        }
        py::list out;
        for (const auto& c : checks) {
            py::dict d;
            d["name"] = c.name;
            d["value"] = c.value;
            d["threshold"] = c.threshold;
            d["pass"] = c.pass;
            out.append(d);
        }
        return out;
    });

    // Runs one experiment from a JSON config string; returns (exit code, log text).
    m.def("run", [](const std::string& config_json) {
        std::ostringstream log;
        int code = exit_ok;
        ExperimentConfig c;
        try {
            c = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
            c.validate();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        {
            py::gil_scoped_release release;
            code = run(c, log);
        }
        return py::make_tuple(code, log.str());
    }, py::arg("config_json"));

    m.attr("__version__") = "0.1.0";
}
