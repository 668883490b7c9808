#include "merlang/analytic.hpp"
#include "merlang/config.hpp"
#include "merlang/errors.hpp"
#include "merlang/io.hpp"
#include "merlang/sim.hpp"
#include "merlang/validate.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace merlang;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kOracle = 3 };

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<double> t_max;
    std::optional<int> grid_points;
    std::vector<std::string> quantities;
    std::vector<std::string> checks;
};

void add_flags(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON config file");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--paths", f.paths, "number of simulated paths");
    app->add_option("--t-max", f.t_max, "time horizon");
    app->add_option("--grid-points", f.grid_points, "number of grid points on [0, t_max]");
    app->add_option("--quantity", f.quantities, "curve to compute (repeatable)");
    app->add_option("--check", f.checks, "validation check to run (repeatable)");
}

ExperimentConfig resolve(const Flags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (f.out) cfg.out = *f.out;
    if (f.seed) cfg.seed = *f.seed;
    if (f.paths) cfg.n_paths = *f.paths;
    if (f.t_max) cfg.grid.t_max = *f.t_max;
    if (f.grid_points) cfg.grid.n_points = *f.grid_points;
    if (!f.quantities.empty()) cfg.quantities = f.quantities;
    if (!f.checks.empty()) cfg.checks = f.checks;
    cfg.validate();
    return cfg;
}

void apply_thread_cap() {
    const char* env = std::getenv("MERLANG_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError("MERLANG_THREADS must be a positive integer");
    omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_max_threads())));
}

std::string file_stem(const std::string& quantity) {
    std::string s = quantity;
    for (char& c : s)
        if (c == ':') c = '_';
    return s;
}

int run_compute(const ExperimentConfig& cfg) {
    if (cfg.quantities.empty()) return kPass;
    analytic::Engine e(cfg.params, cfg.grid, cfg.truncation);
    std::vector<analytic::Curve> curves;
    for (const auto& name : cfg.quantities) {
        const Quantity q = parse_quantity(name, cfg.params);
        analytic::Curve c;
        using K = Quantity::Kind;
        switch (q.kind) {
            case K::P0: c = e.p0(); break;
            case K::Mean: c = e.mean_length(); break;
            case K::Busy: c = e.busy_period_cdf(); break;
            case K::Service: c = e.service_density(); break;
            case K::Pns: c = e.pns(q.n, q.s); break;
            case K::Pmf: c = e.queue_length_pmf(q.n); break;
            case K::Survival: c = e.survival_event_time(q.theta); break;
        }
        c.label = name;
        const auto file = cfg.out / (file_stem(name) + ".csv");
        io::write_curve_csv(file, c);
        std::printf("%-16s %s  max trunc %.3g%s\n", name.c_str(), file.c_str(), c.max_trunc_error(),
                    c.flagged ? "  [flagged]" : "");
        curves.push_back(std::move(c));
    }
    io::write_curves_json(cfg.out / "curves.json", curves);
    return kPass;
}

int run_simulate(const ExperimentConfig& cfg) {
    for (double t : cfg.pmf_times)
        if (t > cfg.grid.t_max) throw ConfigError("pmf times must lie in [0, t_max]");
    const std::uint64_t n_export = std::min(cfg.export_paths, cfg.n_paths);
    const auto paths = sim::simulate_paths(cfg.params, cfg.grid.t_max, cfg.seed, n_export);
    io::write_trajectories_csv(cfg.out / "trajectories.csv", paths, cfg.params.k);
    io::write_journal(cfg.out / "journal.bin", paths);

    const auto mc = sim::monte_carlo(cfg.params, cfg.pmf_times, cfg.seed, cfg.n_paths);
    nlohmann::json summary{{"n_paths", mc.n_paths}, {"events", mc.events}, {"seed", cfg.seed}};
    summary["mean_length"] = nlohmann::json::array();
    for (std::size_t j = 0; j < mc.times.size(); ++j) {
        char name[64];
        std::snprintf(name, sizeof name, "pmf_t%g.csv", mc.times[j]);
        io::write_pmf_csv(cfg.out / name, mc.pmfs[j], cfg.params.k);
        summary["mean_length"].push_back(
            {{"t", mc.times[j]}, {"mean", mc.means[j].mean}, {"std_error", mc.means[j].std_error}});
    }
    std::ofstream(cfg.out / "simulation.json") << summary.dump(1) << '\n';
    std::printf("%llu paths, %llu events, %llu exported to %s\n", static_cast<unsigned long long>(mc.n_paths),
                static_cast<unsigned long long>(mc.events), static_cast<unsigned long long>(n_export),
                cfg.out.c_str());
    return kPass;
}

int run_validate(const ExperimentConfig& cfg) {
    const validate::ValidationReport rep = validate::run_validate(cfg);
    for (const auto& c : rep.checks) {
        std::printf("%s  %-22s (%.1f s)\n", c.pass() ? "PASS" : "FAIL", c.name.c_str(), c.seconds);
        for (const auto& r : c.records) {
            std::printf("      %-4s %-34s dev %-11.4g tol %-8.3g %s%s%s\n", r.pass ? "ok" : "FAIL",
                        r.quantity.c_str(), r.max_deviation, r.tolerance, r.routes.c_str(),
                        r.detail.empty() ? "" : "; ", r.detail.c_str());
        }
    }
    std::filesystem::create_directories(cfg.out);
    std::ofstream(cfg.out / "report.json") << rep.to_json().dump(1) << '\n';
    std::printf("overall: %s\n", rep.pass() ? "PASS" : "FAIL");
    return rep.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transient curves, simulation and validation for the mixed time-changed Erlang queue"};
    app.require_subcommand(1);
    Flags flags;
    auto* compute = app.add_subcommand("compute", "write analytic curves");
    auto* simulate = app.add_subcommand("simulate", "simulate sample paths and empirical pmfs");
    auto* validate = app.add_subcommand("validate", "run validation checks");
    for (auto* s : {compute, simulate, validate}) add_flags(s, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfig;
    }

    try {
        apply_thread_cap();
        const ExperimentConfig cfg = resolve(flags);
        if (compute->parsed()) return run_compute(cfg);
        if (simulate->parsed()) return run_simulate(cfg);
        return run_validate(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const PolicyError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kOracle;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    }
}
