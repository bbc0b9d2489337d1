#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "evanescent/harness.hpp"

using namespace evanescent;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("evanescent_unit_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}
}  // namespace

TEST_CASE("CSV quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(-2) == "-2");
}

TEST_CASE("config round trip") {
    ExperimentConfig c;
    c.kind = "energy-corr";
    c.params.b = 2;
    c.params.a = 1.5;
    c.t = {0.5, 1.0};
    c.n = {64, 128};
    c.L = 1024;
    c.seed = 42;
    c.method = "monte-carlo";
    c.replicas = 10;
    c.f.width = 0.3;
    c.points = {{1, 1.5}};
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.L == c.L);
    CHECK(back.seed == c.seed);
}

TEST_CASE("config errors name the field") {
    auto message = [](const nlohmann::json& j) {
        try {
            ExperimentConfig::from_json(j).validate();
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message({{"kind", "kernel"}, {"params", {{"lamda", 1}}}}).find("config.params.lamda") != std::string::npos);
    CHECK(message({{"kind", "kernel"}, {"t", "soon"}}).find("config.t") != std::string::npos);
    CHECK(message({{"kind", "nothing"}}).find("config.kind") != std::string::npos);
    CHECK(message({{"kind", "simulate"}}).find("seed") != std::string::npos);
    CHECK(message({{"kind", "kernel"}, {"f", {{"width", -1}}}}).find("config.f.width") != std::string::npos);
}

TEST_CASE("kernel run writes CSV with a mass row and a JSON report") {
    const fs::path d = scratch("kernel");
    ExperimentConfig c;
    c.kind = "kernel";
    c.out = d.string();
    c.u_points = 21;
    std::ostringstream log;
    CHECK(run(c, log) == exit_ok);
    const std::string csv = slurp(d / "kernel.csv");
    CHECK(csv.rfind("t,u,P_t(u)\r\n", 0) == 0);
    CHECK(csv.find("mass") != std::string::npos);
    const auto report = nlohmann::json::parse(slurp(d / "kernel.json"));
    CHECK(report["exit_code"] == 0);
    CHECK(report.contains("seed"));
}

TEST_CASE("same config and seed give byte-identical CSV") {
    ExperimentConfig c;
    c.kind = "simulate";
    c.seed = 5;
    c.params.n = 8;
    c.t = {0.5};
    std::ostringstream log;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    c.out = a.string();
    REQUIRE(run(c, log) == exit_ok);
    c.out = b.string();
    c.threads = 3;
    REQUIRE(run(c, log) == exit_ok);
    CHECK(slurp(a / "simulate.csv") == slurp(b / "simulate.csv"));
    CHECK(!slurp(a / "simulate.csv").empty());
}

TEST_CASE("phase diagram labels the case points") {
    const fs::path d = scratch("phase");
    ExperimentConfig c;
    c.kind = "phase-diagram";
    c.t = {0.5};
    c.out = d.string();
    std::ostringstream log;
    CHECK(run(c, log) == exit_ok);
    const std::string csv = slurp(d / "phase_diagram.csv");
    CHECK(csv.find("transport") != std::string::npos);
    CHECK(csv.find("B(iii)") != std::string::npos);
    CHECK(fs::exists(d / "energy_phase.csv"));
}

TEST_CASE("budget_seconds stops a ladder with exit code 4 and keeps finished rows") {
    const fs::path d = scratch("budget");
    ExperimentConfig c;
    c.kind = "volume-corr";
    c.params.a = 1;
    c.params.b = 1.5;
    c.t = {0.5};
    c.n = {8, 16, 32};
    c.budget_seconds = 1e-9;
    c.out = d.string();
    std::ostringstream log;
    CHECK(run(c, log) == exit_budget);
    const std::string report = slurp(d / "volume_corr.json");
    CHECK(report.find("\"complete\": false") != std::string::npos);
    const std::string csv = slurp(d / "volume_corr.csv");
    CHECK(csv.find("\r\n8,") != std::string::npos);
    CHECK(csv.find("\r\n16,") == std::string::npos);
}
