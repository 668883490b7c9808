#pragma once

#include "merlang/config.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace merlang::validate {

struct CheckRecord {
    std::string quantity;
    std::string routes;  // "A vs B"
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct CheckResult {
    std::string name;
    int criterion = 0;
    std::vector<CheckRecord> records;
    double seconds = 0.0;  // wall time, reported on the console only

    bool pass() const;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    nlohmann::json environment;

    bool pass() const;
    /// Deterministic given (config, seed, version): wall times are left out.
    nlohmann::json to_json() const;
};

struct CheckInfo {
    const char* name;
    int criterion;
    const char* summary;
};

/// Every check, in criterion order.
const std::vector<CheckInfo>& checks();

/// Runs one named check. The per-quantity round-trip names
/// (lt-roundtrip-p0, ...) select a part of lt-roundtrip.
/// Throws ConfigError for unknown names, OracleError if an oracle fails.
CheckResult run_check(const std::string& name, const ExperimentConfig& cfg);

/// Runs cfg.checks, or every check when the list is empty.
ValidationReport run_validate(const ExperimentConfig& cfg);

/// Two-sample Kolmogorov-Smirnov statistic; sorts copies of its inputs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace merlang::validate
