#include "merlang/config.hpp"

#include "merlang/errors.hpp"

#include <fstream>
#include <set>

namespace merlang {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    try {
        params.validate();
        grid.validate();
        truncation.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
    for (double t : pmf_times) {
        if (!(t >= 0.0)) throw ConfigError("pmf times must be nonnegative");
    }
    for (const auto& q : quantities) parse_quantity(q, params);
}

void apply_json(ExperimentConfig& cfg, const json& j) {
    check_keys(j,
               {"params", "grid", "truncation", "n_paths", "seed", "out", "quantities", "checks", "pmf_times",
                "export_paths"},
               "config");
    if (j.contains("params")) {
        const json& p = j["params"];
        check_keys(p, {"lambda", "mu", "k", "c1", "c2", "alpha1", "alpha2"}, "params");
        read(p, "lambda", cfg.params.lambda);
        read(p, "mu", cfg.params.mu);
        read(p, "k", cfg.params.k);
        read(p, "c1", cfg.params.c1);
        read(p, "c2", cfg.params.c2);
        read(p, "alpha1", cfg.params.alpha1);
        read(p, "alpha2", cfg.params.alpha2);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, {"t_max", "n_points"}, "grid");
        read(g, "t_max", cfg.grid.t_max);
        read(g, "n_points", cfg.grid.n_points);
    }
    if (j.contains("truncation")) {
        const json& t = j["truncation"];
        check_keys(t, {"eps_rel", "max_m", "max_r", "max_i", "max_conv_N"}, "truncation");
        read(t, "eps_rel", cfg.truncation.eps_rel);
        read(t, "max_m", cfg.truncation.max_m);
        read(t, "max_r", cfg.truncation.max_r);
        read(t, "max_i", cfg.truncation.max_i);
        read(t, "max_conv_N", cfg.truncation.max_conv_N);
    }
    read(j, "n_paths", cfg.n_paths);
    read(j, "seed", cfg.seed);
    if (j.contains("out")) {
        std::string s;
        read(j, "out", s);
        cfg.out = s;
    }
    read(j, "quantities", cfg.quantities);
    read(j, "checks", cfg.checks);
    read(j, "pmf_times", cfg.pmf_times);
    read(j, "export_paths", cfg.export_paths);
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot read config " + file.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    ExperimentConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    const QueueParams& q = cfg.params;
    const analytic::TruncationPolicy& t = cfg.truncation;
    return {
        {"params",
         {{"lambda", q.lambda}, {"mu", q.mu}, {"k", q.k}, {"c1", q.c1}, {"c2", q.c2}, {"alpha1", q.alpha1},
          {"alpha2", q.alpha2}}},
        {"grid", {{"t_max", cfg.grid.t_max}, {"n_points", cfg.grid.n_points}}},
        {"truncation",
         {{"eps_rel", t.eps_rel}, {"max_m", t.max_m}, {"max_r", t.max_r}, {"max_i", t.max_i},
          {"max_conv_N", t.max_conv_N}}},
        {"n_paths", cfg.n_paths},
        {"seed", cfg.seed},
        {"out", cfg.out.string()},
        {"quantities", cfg.quantities},
        {"checks", cfg.checks},
        {"pmf_times", cfg.pmf_times},
        {"export_paths", cfg.export_paths},
    };
}

Quantity parse_quantity(const std::string& name, const QueueParams& q) {
    Quantity out;
    out.name = name;
    auto fields = [&](std::size_t want) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const std::size_t p = name.find(':', start);
            parts.push_back(name.substr(start, p - start));
            if (p == std::string::npos) break;
            start = p + 1;
        }
        if (parts.size() != want) throw ConfigError("malformed quantity '" + name + "'");
        return parts;
    };
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw ConfigError("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("malformed quantity '" + name + "'");
        }
    };
    const std::string head = name.substr(0, name.find(':'));
    using K = Quantity::Kind;
    if (head == "p0" || head == "mean" || head == "busy" || head == "service") {
        fields(1);
        out.kind = head == "p0" ? K::P0 : head == "mean" ? K::Mean : head == "busy" ? K::Busy : K::Service;
    } else if (head == "pns") {
        const auto f = fields(3);
        out.kind = K::Pns;
        out.n = to_int(f[1]);
        out.s = to_int(f[2]);
        if (out.n < 1 || out.s < 1 || out.s > q.k) throw ConfigError("pns needs n >= 1 and 1 <= s <= k");
    } else if (head == "pmf") {
        const auto f = fields(2);
        out.kind = K::Pmf;
        out.n = to_int(f[1]);
        if (out.n < 0) throw ConfigError("pmf needs n >= 0");
    } else if (head == "survival") {
        const auto f = fields(2);
        out.kind = K::Survival;
        try {
            out.theta = std::stod(f[1]);
        } catch (const std::exception&) {
            throw ConfigError("malformed quantity '" + name + "'");
        }
        if (!(out.theta > 0.0)) throw ConfigError("survival rate must be positive");
    } else if (head == "interarrival" || head == "interphase" || head == "sojourn") {
        fields(1);
        out.kind = K::Survival;
        out.theta = head == "interarrival" ? q.lambda : head == "interphase" ? q.k * q.mu : q.theta();
    } else {
        throw ConfigError("unknown quantity '" + name + "'");
    }
    return out;
}

}  // namespace merlang
