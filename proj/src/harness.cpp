#include "evanescent/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evanescent/chain.hpp"
#include "evanescent/fractional.hpp"
#include "evanescent/moments.hpp"
#include "evanescent/theorems.hpp"
#include "evanescent/volume.hpp"

namespace evanescent {

namespace {

using nlohmann::json;

const char* const version = "0.1.0";

const std::vector<std::string> kinds{"simulate", "energy-corr", "volume-corr", "phase-diagram", "verify-lemmas", "kernel"};

// Typed field access with the path in the error message.
template <class T>
T field(const json& j, const std::string& key, const std::string& path) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key + ": wrong type or missing");
    }
}

void reject_unknown(const json& j, const std::vector<std::string>& known, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError(path + "." + it.key() + ": unknown field");
}

json spec_json(const GaussSpec& s) {
    return {{"amplitude", s.amplitude}, {"width", s.width}, {"center", s.center}, {"degree", s.degree}};
}

GaussSpec spec_from(const json& j, const std::string& path) {
    reject_unknown(j, {"amplitude", "width", "center", "degree"}, path);
    GaussSpec s;
    if (j.contains("amplitude")) s.amplitude = field<double>(j, "amplitude", path);
    if (j.contains("width")) s.width = field<double>(j, "width", path);
    if (j.contains("center")) s.center = field<double>(j, "center", path);
    if (j.contains("degree")) s.degree = field<int>(j, "degree", path);
    if (!(s.width > 0)) throw ConfigError(path + ".width: must be > 0");
    if (s.degree != 0 && s.degree != 1) throw ConfigError(path + ".degree: must be 0 or 1");
    return s;
}

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(path, std::ios::binary) {
        if (!os_) throw ConfigError("cannot open " + path.string() + " for writing");
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << csv_field(cells[i]);
        }
        os_ << "\r\n";
    }

private:
    std::ofstream os_;
};

std::string num(double v) { return csv_number(v); }
std::string num(long v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

std::vector<long> ladder(const ExperimentConfig& c) { return c.n.empty() ? std::vector<long>{c.params.n} : c.n; }

ModelParams at_n(ModelParams p, long n) {
    p.n = n;
    return p;
}

json record(const ExperimentConfig& c) {
    json r;
    r["experiment"] = c.kind;
    r["config"] = c.to_json();
    r["version"] = version;
    r["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    return r;
}

std::vector<double> u_grid(const ExperimentConfig& c) {
    std::vector<double> u(c.u_points);
    for (std::size_t i = 0; i < c.u_points; ++i)
        u[i] = c.u_points == 1 ? c.u_min
                               : c.u_min + (c.u_max - c.u_min) * static_cast<double>(i) / static_cast<double>(c.u_points - 1);
    return u;
}

int run_simulate(const ExperimentConfig& c, json& rep, const std::filesystem::path& dir) {
    const ModelParams p = at_n(c.params, ladder(c).front());
    const double t = c.t.front();
    const std::size_t L = c.L ? *c.L : ring_size(p, t);
    const ChainState s0 = sample_gibbs(p, L, *c.seed);
    SimOptions opt;
    opt.record_log = false;
    const SimulationResult r = simulate(s0, p, p.horizon(t), *c.seed, opt);
    Csv csv(dir / "simulate.csv", {"site", "omega_initial", "omega_final"});
    for (std::size_t x = 0; x < L; ++x) csv.row({num(x), num(s0.omega[x]), num(r.state.omega[x])});
    rep["outputs"] = {{"L", L},
                      {"horizon", p.horizon(t)},
                      {"reached_time", r.state.time},
                      {"events", r.events},
                      {"complete", r.complete},
                      {"energy_initial", s0.energy()},
                      {"energy_final", r.state.energy()},
                      {"relative_energy_drift", std::abs(r.state.energy() - s0.energy()) / s0.energy()},
                      {"volume_initial", s0.volume()},
                      {"volume_final", r.state.volume()}};
    return r.complete ? exit_ok : exit_budget;
}

std::optional<TargetKind> energy_target(const ModelParams& p) {
    switch (classify_energy(p.a, p.b)) {
        case EnergyRegime::heat: return TargetKind::heat;
        case EnergyRegime::fractional_heat: return TargetKind::fractional;
        default: return std::nullopt;
    }
}

// Wall-clock budget from budget_seconds; 0 means unlimited. Checked between (n, t) items.
struct Deadline {
    double seconds;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    void check(long n, double t) const {
        if (seconds <= 0) return;
        const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (used > seconds)
            throw BudgetExceeded("budget_seconds " + num(seconds) + " exceeded after n=" + num(n) + ", t=" + num(t));
    }
};

int run_energy(const ExperimentConfig& c, json& rep, const std::filesystem::path& dir) {
    const Deadline deadline{c.budget_seconds};
    const auto target = energy_target(c.params);
    if (c.method == "monte-carlo") {
        Csv csv(dir / "energy_corr.csv", {"n", "t", "z", "u", "S", "S_stderr"});
        EstimatorOptions opt;
        opt.threads = c.threads;
        for (long n : ladder(c)) {
            const ModelParams p = at_n(c.params, n);
            for (double t : c.t) {
                const std::size_t L = c.L ? *c.L : ring_size(p, t);
                const KernelEstimate k = estimate_energy_correlation(p, t, c.replicas, L, *c.seed, opt);
                for (std::size_t z = 0; z < L; ++z) {
                    const long sz = signed_site(z, L);
                    csv.row({num(n), num(t), num(sz), num(static_cast<double>(sz) / static_cast<double>(n)), num(k.mean[z]),
                             num(k.stderr_[z])});
                }
                rep["outputs"].push_back({{"n", n}, {"t", t}, {"L", L}, {"events", k.events},
                                          {"boundary_mass", k.boundary_mass},
                                          {"finite_size_warning", k.finite_size_warning}});
                deadline.check(n, t);
            }
        }
        return exit_ok;
    }
    Csv csv(dir / "energy_corr.csv", {"n", "t", "u", "n_S", "target", "target_unreflected"});
    for (long n : ladder(c)) {
        const ModelParams p = at_n(c.params, n);
        for (double t : c.t) {
            const std::size_t L = c.L ? *c.L : static_cast<std::size_t>(16 * n);
            if (target) {
                const KernelComparison k = compare_energy_kernel(p, t, L, *target);
                for (std::size_t i = 0; i < k.u.size(); ++i)
                    csv.row({num(n), num(t), num(k.u[i]), num(k.kernel[i]), num(k.target[i]), num(k.target_unreflected[i])});
                rep["outputs"].push_back({{"n", n},
                                          {"t", t},
                                          {"L", L},
                                          {"target", *target == TargetKind::heat ? "heat" : "fractional"},
                                          {"distance", k.distance},
                                          {"distance_sqrt_n", k.distance_sqrt},
                                          {"distance_unreflected", k.distance_unreflected},
                                          {"skew_kernel", k.skew_kernel},
                                          {"skew_target", k.skew_target},
                                          {"sectors", k.sectors},
                                          {"mass", k.mass},
                                          {"finite_size_warning", k.finite_size_warning}});
                deadline.check(n, t);
            } else {
                const EnergyKernel k = energy_kernel(p, t, L, stable_step(p));
                for (std::size_t z = 0; z < L; ++z) {
                    const long sz = signed_site(z, L);
                    csv.row({num(n), num(t), num(static_cast<double>(sz) / static_cast<double>(n)),
                             num(static_cast<double>(n) * k.S[z]), "", ""});
                }
                rep["outputs"].push_back({{"n", n}, {"t", t}, {"L", L}, {"target", nullptr}, {"mass", k.mass},
                                          {"sectors", k.sectors}, {"finite_size_warning", k.finite_size_warning}});
                deadline.check(n, t);
            }
        }
    }
    return exit_ok;
}

int run_volume(const ExperimentConfig& c, json& rep, const std::filesystem::path& dir) {
    const TestFunction f = from_spec(c.f), h = from_spec(c.h);
    const RegimeLabel label = classify_regime(c.params.a, c.params.b, c.params.lambda, c.params.c);
    const Deadline deadline{c.budget_seconds};
    if (c.method == "monte-carlo") {
        Csv csv(dir / "volume_corr.csv", {"n", "t", "z", "V", "V_stderr", "V_moments"});
        EstimatorOptions opt;
        opt.threads = c.threads;
        for (long n : ladder(c)) {
            const ModelParams p = at_n(c.params, n);
            for (double t : c.t) {
                const std::size_t L = c.L ? *c.L : ring_size(p, t);
                const KernelEstimate k = estimate_volume_correlation(p, t, c.replicas, L, *c.seed, opt);
                const FirstMoment m = volume_kernel(p, t, L, stable_step(p));
                for (std::size_t z = 0; z < L; ++z)
                    csv.row({num(n), num(t), num(signed_site(z, L)), num(k.mean[z]), num(k.stderr_[z]), num(m.m[z])});
                rep["outputs"].push_back({{"n", n}, {"t", t}, {"L", L}, {"events", k.events}});
                deadline.check(n, t);
            }
        }
        return exit_ok;
    }
    Csv csv(dir / "volume_corr.csv", {"n", "t", "eta", "eta_tilde", "eta_limit", "label"});
    for (long n : ladder(c)) {
        const ModelParams p = at_n(c.params, n);
        for (double t : c.t) {
            const EtaResult e = eta(f, h, t, p);
            std::string tilde;
            if (p.a > 1) tilde = num(eta_tilde(f, h, t, p).value);
            const double lim = limit_correlation(label, f, h, t, p);
            csv.row({num(n), num(t), num(e.value), tilde, num(lim), label.name()});
            rep["outputs"].push_back({{"n", n}, {"t", t}, {"eta", e.value}, {"refinement_delta", e.refinement_delta},
                                      {"limit", lim}, {"label", label.name()}, {"case", label.case_id}});
            deadline.check(n, t);
        }
    }
    return exit_ok;
}

int run_phase(const ExperimentConfig& c, json& rep, const std::filesystem::path& dir) {
    const auto pts = c.points.empty() ? volume_case_points() : c.points;
    const TestFunction f = from_spec(c.f);
    const double t = c.t.front();
    Csv csv(dir / "phase_diagram.csv",
            {"a", "b", "case", "label", "transport", "diffusion", "relaxation", "eta_n1000", "eta_n10000", "eta_limit"});
    for (auto [a, b] : pts) {
        const VolumeCase v = volume_case(a, b, t, f);
        csv.row({num(a), num(b), v.label.case_id, v.label.name(), num(v.label.transport), num(v.label.diffusion), num(v.label.relaxation),
                 num(v.eta_1000), num(v.eta_10000), num(v.limit)});
        rep["outputs"]["volume"].push_back({{"a", a}, {"b", b}, {"case", v.label.case_id}, {"label", v.label.name()},
                                            {"error_n10000", v.error_10000}});
    }
    // energy diagram on a regular grid, with the two theorem lines marked
    Csv energy(dir / "energy_phase.csv", {"a", "b", "label"});
    for (int i = 0; i <= 40; ++i) {
        const double b = 0.05 * i;
        std::vector<double> as;
        for (int j = 1; j <= 44; ++j) as.push_back(0.05 * j);
        if (b < 2.0 / 3.0) as.push_back(2 - b / 2);
        if (b > 1) as.push_back(1.5);
        std::sort(as.begin(), as.end());
        as.erase(std::unique(as.begin(), as.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), as.end());
        for (double a : as) energy.row({num(a), num(b), energy_regime_name(classify_energy(a, b))});
    }
    return exit_ok;
}

int run_lemmas(const ExperimentConfig&, json& rep, const std::filesystem::path&) {
    const std::vector<Check> checks = lemma_checks();
    bool ok = true;
    for (const auto& k : checks) ok = ok && k.pass;
    rep["outputs"] = {{"checks", to_json(checks)}, {"pass", ok}};
    return ok ? exit_ok : exit_numerical;
}

int run_kernel(const ExperimentConfig& c, json& rep, const std::filesystem::path& dir) {
    const auto u = u_grid(c);
    Csv csv(dir / "kernel.csv", {"t", "u", "P_t(u)"});
    bool ok = true;
    for (double t : c.t) {
        const auto vals = fractional_kernel(t, u);
        double worst_imag = 0, worst_negative = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            csv.row({num(t), num(u[i]), num(vals[i].value)});
            worst_imag = std::max(worst_imag, std::abs(vals[i].imag));
            worst_negative = std::min(worst_negative, vals[i].value);
        }
        const KernelMass m = kernel_mass(t);
        csv.row({num(t), "mass", num(m.mass)});
        const bool pass = std::abs(m.mass - 1) < 1e-6 && worst_imag < 1e-10 && worst_negative > -1e-8;
        ok = ok && pass;
        rep["outputs"].push_back({{"t", t}, {"mass", m.mass}, {"tail_correction", m.tail}, {"imaginary_residue", worst_imag},
                                  {"most_negative", worst_negative}, {"pass", pass}});
    }
    return ok ? exit_ok : exit_numerical;
}

}  // namespace

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json ExperimentConfig::to_json() const {
    json j;
    j["kind"] = kind;
    j["params"] = {{"lambda", params.lambda}, {"c", params.c}, {"b", params.b},
                   {"n", params.n},           {"beta", params.beta}, {"a", params.a}};
    j["t"] = t;
    j["n"] = n;
    if (L) j["L"] = *L;
    j["replicas"] = replicas;
    if (seed) j["seed"] = *seed;
    j["threads"] = threads;
    j["out"] = out;
    j["method"] = method;
    j["f"] = spec_json(f);
    j["h"] = spec_json(h);
    j["u_grid"] = {{"min", u_min}, {"max", u_max}, {"points", u_points}};
    j["points"] = json::array();
    for (auto [a, b] : points) j["points"].push_back({a, b});
    j["budget_seconds"] = budget_seconds;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    const std::string root = "config";
    reject_unknown(j, {"kind", "params", "t", "n", "L", "replicas", "seed", "threads", "out", "method", "f", "h", "u_grid",
                       "points", "budget_seconds"},
                   root);
    ExperimentConfig c;
    if (j.contains("kind")) c.kind = field<std::string>(j, "kind", root);
    if (j.contains("params")) {
        const json& p = j.at("params");
        const std::string path = root + ".params";
        reject_unknown(p, {"lambda", "c", "b", "n", "beta", "a"}, path);
        if (p.contains("lambda")) c.params.lambda = field<double>(p, "lambda", path);
        if (p.contains("c")) c.params.c = field<double>(p, "c", path);
        if (p.contains("b")) c.params.b = field<double>(p, "b", path);
        if (p.contains("n")) c.params.n = field<long>(p, "n", path);
        if (p.contains("beta")) c.params.beta = field<double>(p, "beta", path);
        if (p.contains("a")) c.params.a = field<double>(p, "a", path);
    }
    if (j.contains("t")) {
        if (j.at("t").is_number()) c.t = {field<double>(j, "t", root)};
        else c.t = field<std::vector<double>>(j, "t", root);
    }
    if (j.contains("n")) {
        if (j.at("n").is_number_integer()) c.n = {field<long>(j, "n", root)};
        else c.n = field<std::vector<long>>(j, "n", root);
    }
    if (j.contains("L")) c.L = field<std::size_t>(j, "L", root);
    if (j.contains("replicas")) c.replicas = field<std::size_t>(j, "replicas", root);
    if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed", root);
    if (j.contains("threads")) c.threads = field<unsigned>(j, "threads", root);
    if (j.contains("out")) c.out = field<std::string>(j, "out", root);
    if (j.contains("method")) c.method = field<std::string>(j, "method", root);
    if (j.contains("f")) c.f = spec_from(j.at("f"), root + ".f");
    if (j.contains("h")) c.h = spec_from(j.at("h"), root + ".h");
    if (j.contains("u_grid")) {
        const json& g = j.at("u_grid");
        const std::string path = root + ".u_grid";
        reject_unknown(g, {"min", "max", "points"}, path);
        if (g.contains("min")) c.u_min = field<double>(g, "min", path);
        if (g.contains("max")) c.u_max = field<double>(g, "max", path);
        if (g.contains("points")) c.u_points = field<std::size_t>(g, "points", path);
    }
    if (j.contains("points")) {
        for (const auto& pt : j.at("points")) {
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                throw ConfigError(root + ".points: each entry must be [a, b]");
            c.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
    }
    if (j.contains("budget_seconds")) c.budget_seconds = field<double>(j, "budget_seconds", root);
    return c;
}

bool is_stochastic(const ExperimentConfig& c) {
    return c.kind == "simulate" || ((c.kind == "energy-corr" || c.kind == "volume-corr") && c.method == "monte-carlo");
}

void ExperimentConfig::validate() const {
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) throw ConfigError("config.kind: unknown kind '" + kind + "'");
    params.validate();
    for (long v : n)
        if (v < 1) throw ConfigError("config.n: entries must be >= 1");
    if (t.empty()) throw ConfigError("config.t: at least one time is needed");
    for (double v : t)
        if (!(v > 0) || !std::isfinite(v)) throw ConfigError("config.t: times must be finite and > 0");
    if (method != "moments" && method != "monte-carlo") throw ConfigError("config.method: moments or monte-carlo");
    if (is_stochastic(*this) && !seed) throw ConfigError("--seed is required for stochastic runs");
    if (is_stochastic(*this) && kind != "simulate" && replicas == 0) throw ConfigError("config.replicas: must be > 0");
    if (L && *L < 4) throw ConfigError("config.L: must be >= 4");
    if (threads == 0) throw ConfigError("config.threads: must be >= 1");
    if (u_points == 0 || !(u_max >= u_min)) throw ConfigError("config.u_grid: need points > 0 and max >= min");
}

int run(const ExperimentConfig& c, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir(c.out);
    json rep = record(c);
    int code = exit_ok;
    try {
        c.validate();
        std::filesystem::create_directories(dir);
        if (c.kind == "simulate") code = run_simulate(c, rep, dir);
        else if (c.kind == "energy-corr") code = run_energy(c, rep, dir);
        else if (c.kind == "volume-corr") code = run_volume(c, rep, dir);
        else if (c.kind == "phase-diagram") code = run_phase(c, rep, dir);
        else if (c.kind == "verify-lemmas") code = run_lemmas(c, rep, dir);
        else code = run_kernel(c, rep, dir);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const BudgetExceeded& e) {
        log << "budget exceeded: " << e.what() << '\n';
        rep["complete"] = false;
        rep["error"] = e.what();
        code = exit_budget;
    } catch (const NumericalError& e) {
        log << "numerical gate failed: " << e.what() << '\n';
        rep["error"] = e.what();
        code = exit_numerical;
    }
    if (!rep.contains("complete")) rep["complete"] = code != exit_budget;
    rep["exit_code"] = code;
    rep["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        std::string name = c.kind;
        std::replace(name.begin(), name.end(), '-', '_');
        write_json(dir / (name + ".json"), rep);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    }
    log << c.kind << ": exit " << code << '\n';
    return code;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Evanescent-noise harmonic chain laboratory"};
    std::string kind, config_path, out, n_list;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<unsigned> threads;
    app.add_option("kind", kind, "experiment kind")->required()->check(CLI::IsMember(kinds));
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--seed", seed, "random seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--n", n_list, "comma-separated n ladder");
    app.add_option("--replicas", replicas, "Monte Carlo replicas");
    app.add_option("--threads", threads, "worker threads");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    try {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("cannot read config file " + config_path);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        ExperimentConfig c = ExperimentConfig::from_json(j);
        if (!c.kind.empty() && c.kind != kind) std::cerr << "note: command-line kind overrides config.kind\n";
        c.kind = kind;
        if (seed) c.seed = *seed;
        if (!out.empty()) c.out = out;
        if (replicas) c.replicas = *replicas;
        if (threads) c.threads = *threads;
        if (!n_list.empty()) {
            c.n.clear();
            std::stringstream ss(n_list);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    std::size_t used = 0;
                    c.n.push_back(std::stol(item, &used));
                    if (used != item.size()) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    throw ConfigError("--n: '" + item + "' is not an integer");
                }
            }
        }
        return run(c, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
}

}  // namespace evanescent
