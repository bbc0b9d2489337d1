#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evanescent/fourier.hpp"
#include "evanescent/params.hpp"

namespace evanescent {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_budget = 4 };

struct ExperimentConfig {
    std::string kind;
    ModelParams params;
    std::vector<double> t{1.0};
    std::vector<long> n;  // empty: params.n alone
    std::optional<std::size_t> L;
    std::size_t replicas = 0;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out = ".";
    std::string method = "moments";  // energy-corr / volume-corr: moments or monte-carlo
    GaussSpec f, h;
    double u_min = -6, u_max = 10;
    std::size_t u_points = 161;
    std::vector<std::pair<double, double>> points;  // phase-diagram (a, b); empty: case points
    double budget_seconds = 0;

    nlohmann::json to_json() const;
    // Throws ConfigError naming the offending field.
    static ExperimentConfig from_json(const nlohmann::json& j);
    void validate() const;
};

bool is_stochastic(const ExperimentConfig& c);

// Runs one experiment, writing CSV/JSON under c.out; returns an exit code.
int run(const ExperimentConfig& c, std::ostream& log);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_number(double v);

int cli_main(int argc, char** argv);

}  // namespace evanescent
