#pragma once

#include "merlang/analytic.hpp"
#include "merlang/coeffs.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace merlang {

/// Run configuration. Precedence, lowest first: built-in defaults, the JSON
/// config file, command-line flags.
struct ExperimentConfig {
    QueueParams params;
    analytic::TimeGrid grid;
    analytic::TruncationPolicy truncation;
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 20261016;
    std::filesystem::path out = "out";
    std::vector<std::string> quantities = {"p0", "mean"};
    std::vector<std::string> checks;     // empty: every check
    std::vector<double> pmf_times = {0.5, 1.0, 2.0};
    std::uint64_t export_paths = 100;    // paths written to the trajectory files

    void validate() const;
};

/// Fields absent from j keep their current values. Throws ConfigError on
/// unknown keys or mistyped values.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Parsed quantity names: p0, mean, busy, service, pns:<n>:<s>, pmf:<n>,
/// survival:<theta>, interarrival, interphase, sojourn.
struct Quantity {
    enum class Kind { P0, Mean, Busy, Service, Pns, Pmf, Survival } kind;
    int n = 0;
    int s = 0;
    double theta = 0.0;
    std::string name;
};

Quantity parse_quantity(const std::string& name, const QueueParams& q);

}  // namespace merlang
