#include "merlang/validate.hpp"

#include "merlang/analytic.hpp"
#include "merlang/ctmc.hpp"
#include "merlang/errors.hpp"
#include "merlang/laplace.hpp"
#include "merlang/rng.hpp"
#include "merlang/sampling.hpp"
#include "merlang/sim.hpp"
#include "merlang/specfun.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <functional>
#include <sstream>

namespace merlang::validate {

namespace {

// Tolerances, one block per criterion.
constexpr double kSpecfunTol = 1e-10;
constexpr double kRoundTripTol = 1e-3;
constexpr double kRoundTripFrom = 0.1;
constexpr double kGoverningTol = 1e-6;
constexpr double kReductionTol = 1e-10;
constexpr double kClassicalTol = 1e-3;
constexpr int kClassicalCaps = 80;
constexpr double kSigmaBand = 3.0;
constexpr double kSamplerKsTol = 0.005;
constexpr double kSurvivalSupTol = 0.01;
constexpr double kBusyKsTol = 0.02;
constexpr std::uint64_t kBusyMinCompleted = 10000;
constexpr int kPropertySets = 1000;
// absolute discretization accuracy of the 101-point property grid
constexpr double kPropertySlack = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

using analytic::Curve;
using analytic::Engine;
using analytic::TimeGrid;
using analytic::TruncationPolicy;
using laplace::cplx;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

CheckRecord record(std::string quantity, std::string routes, double dev, double tol, std::string detail = "") {
    CheckRecord r;
    r.quantity = std::move(quantity);
    r.routes = std::move(routes);
    r.max_deviation = dev;
    r.tolerance = tol;
    r.pass = std::isfinite(dev) && dev <= tol;
    r.detail = std::move(detail);
    return r;
}

// ---- 1 -------------------------------------------------------------------

std::vector<CheckRecord> special_functions() {
    std::vector<CheckRecord> out;
    double dev = 0.0;
    for (int i = 0; i <= 1500; ++i) {
        const double x = -10.0 + 0.01 * i;
        dev = std::max(dev, std::fabs(specfun::mittag_leffler3({1, 1, 1}, x) / std::exp(x) - 1.0));
    }
    out.push_back(record("E(1,1,1)(x), x in [-10,5]", "series vs exp", dev, kSpecfunTol));
    dev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = 0.05 * i;
        dev = std::max(dev, std::fabs(specfun::mittag_leffler3({2, 1, 1}, x) / std::cosh(std::sqrt(x)) - 1.0));
    }
    out.push_back(record("E(2,1,1)(x), x in [0,50]", "series vs cosh(sqrt x)", dev, kSpecfunTol));
    const double ref = std::exp(1.0) * std::erfc(1.0);
    dev = std::fabs(specfun::mittag_leffler3({0.5, 1, 1}, -1.0) / ref - 1.0);
    out.push_back(record("E(0.5,1,1)(-1)", "series vs e erfc(1)", dev, kSpecfunTol));
    return out;
}

// ---- 2 -------------------------------------------------------------------

double max_rel_vs_talbot(const Curve& c, const laplace::Transform& F) {
    double dev = 0.0;
    const int stride = std::max(1, (c.grid.n_points - 1) / 300);
    std::vector<int> idx;
    for (int i = 0; i < c.grid.n_points; i += stride)
        if (c.grid.at(i) >= kRoundTripFrom) idx.push_back(i);
    std::vector<double> rel(idx.size(), 0.0);
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t j = 0; j < idx.size(); ++j) {
        try {
            const double t = c.grid.at(idx[j]);
            const double v = laplace::invert_lt(F, t);
            rel[j] = std::fabs(v - c.values[idx[j]]) / std::fabs(v);
        } catch (const OracleError&) {
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed) throw OracleError("contour inversion failed");
    for (double r : rel) dev = std::max(dev, r);
    return dev;
}

std::vector<CheckRecord> lt_roundtrip(const ExperimentConfig& cfg, const std::string& part) {
    const QueueParams& q = cfg.params;
    const TruncationPolicy& pol = cfg.truncation;
    Engine e(q, cfg.grid, pol);
    std::vector<CheckRecord> out;
    const std::string routes = "series curve vs Talbot inversion";
    auto want = [&](const char* p) { return part.empty() || part == p; };
    auto add = [&](const std::string& name, const Curve& c, const laplace::Transform& F) {
        std::string detail = c.flagged ? "curve flagged for truncation, same caps on both sides" : "";
        out.push_back(record(name, routes, max_rel_vs_talbot(c, F), kRoundTripTol, detail));
    };
    if (want("p0")) add("p0", e.p0(), [&](cplx z) { return laplace::lt_p0(z, q, &pol); });
    if (want("pns")) add("p(1,1)", e.pns(1, 1), [&](cplx z) { return laplace::lt_pns(1, 1, z, q, &pol); });
    if (want("mean")) add("mean", e.mean_length(), [&](cplx z) { return laplace::lt_mean(z, q, &pol); });
    if (want("busy")) add("busy CDF", e.busy_period_cdf(), [&](cplx z) { return laplace::lt_busy(z, q, &pol); });
    if (want("survival")) {
        for (double th : {q.lambda, q.k * q.mu, q.theta()}) {
            add("survival theta=" + fmt(th), e.survival_event_time(th),
                [&, th](cplx z) { return laplace::lt_event_survival(th, z, q); });
        }
    }
    if (want("service")) add("service density", e.service_density(), [&](cplx z) { return laplace::lt_service(z, q); });
    return out;
}

// ---- 3 -------------------------------------------------------------------

std::vector<CheckRecord> governing_system(const ExperimentConfig& cfg) {
    const QueueParams q = cfg.params.effective();
    std::vector<CheckRecord> out;
    for (double z : {1.0, 2.0, 5.0}) {
        const double p0 = laplace::lt_p0(z, q);
        const double p11 = laplace::lt_pns(1, 1, z, q);
        const double ph = laplace::phi(z, q);
        const double terms[] = {ph * p0, -ph / z, q.lambda * p0, -q.k * q.mu * p11};
        double res = 0.0, scale = 0.0;
        for (double t : terms) {
            res += t;
            scale = std::max(scale, std::fabs(t));
        }
        out.push_back(record("z=" + fmt(z), "transformed equation residual / largest term",
                             std::fabs(res) / scale, kGoverningTol));
    }
    return out;
}

// ---- 4 -------------------------------------------------------------------

double max_abs_scaled(const Curve& a, const Curve& b) {
    double dev = 0.0;
    for (std::size_t i = 1; i < a.values.size(); ++i) {
        const double s = std::max(1.0, std::fabs(b.values[i]));
        dev = std::max(dev, std::fabs(a.values[i] - b.values[i]) / s);
    }
    return dev;
}

std::vector<CheckRecord> fractional_reduction(const ExperimentConfig& cfg) {
    QueueParams q = cfg.params;
    q.c1 = 1.0;
    q.c2 = 0.0;
    Engine mixed(q, cfg.grid, cfg.truncation, analytic::EvalPath::Mixed);
    Engine single(q, cfg.grid, cfg.truncation, analytic::EvalPath::SingleOrder);
    std::vector<CheckRecord> out;
    const std::string routes = "mixed formula vs single-order path";
    auto add = [&](const std::string& name, const Curve& a, const Curve& b) {
        out.push_back(record(name, routes, max_abs_scaled(a, b), kReductionTol));
    };
    add("p0", mixed.p0(), single.p0());
    add("p(1,1)", mixed.pns(1, 1), single.pns(1, 1));
    add("p(2," + std::to_string(q.k) + ")", mixed.pns(2, q.k), single.pns(2, q.k));
    add("mean", mixed.mean_length(), single.mean_length());
    add("busy CDF", mixed.busy_period_cdf(), single.busy_period_cdf());
    for (double th : {q.lambda, q.k * q.mu, q.theta()}) {
        add("survival theta=" + fmt(th), mixed.survival_event_time(th), single.survival_event_time(th));
    }
    add("service density", mixed.service_density(), single.service_density());
    double g = 0.0;
    for (int N = 1; N <= 6; ++N)
        for (double t : {0.1, 0.5, 1.0, 2.0}) g = std::max(g, std::fabs(coeffs::kernel_g(N, t, q) * q.c2));
    out.push_back(record("c2 g-kernel terms", "mixed formula vs zero", g, kReductionTol));
    return out;
}

// ---- 5 -------------------------------------------------------------------

std::vector<CheckRecord> classical_limit(const ExperimentConfig& cfg) {
    QueueParams q = cfg.params;
    q.c1 = 1.0;
    q.c2 = 0.0;
    q.alpha1 = 1.0;
    TruncationPolicy pol = cfg.truncation;
    pol.max_m = std::max(pol.max_m, kClassicalCaps);
    pol.max_r = std::max(pol.max_r, kClassicalCaps);
    pol.max_i = std::max(pol.max_i, kClassicalCaps);
    Engine e(q, cfg.grid, pol);
    const Eigen::MatrixXd dist = ctmc::classical_distributions(q, cfg.grid);
    if (!dist.allFinite()) throw OracleError("matrix exponential produced non-finite values");
    const double bmass = ctmc::boundary_mass(dist, q.k);
    const std::string routes = "series curve vs CTMC matrix exponential";
    auto dev = [](const Curve& a, const Curve& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::fabs(a.values[i] - b.values[i]));
        return d;
    };
    std::vector<CheckRecord> out;
    out.push_back(record("p0", routes, dev(e.p0(), ctmc::p0(dist, cfg.grid)), kClassicalTol,
                         "boundary mass " + fmt(bmass)));
    double worst = 0.0;
    std::string where;
    for (int n = 1; n <= 4; ++n) {
        for (int s = 1; s <= q.k; ++s) {
            const double d = dev(e.pns(n, s), ctmc::pns(dist, cfg.grid, n, s, q.k));
            if (d >= worst) {
                worst = d;
                where = "worst at (" + std::to_string(n) + "," + std::to_string(s) + ")";
            }
        }
    }
    out.push_back(record("p(n,s), n<=4", routes, worst, kClassicalTol, where));
    out.push_back(record("mean", routes, dev(e.mean_length(), ctmc::mean_length(dist, cfg.grid)), kClassicalTol));
    return out;
}

// ---- 6 -------------------------------------------------------------------

std::vector<CheckRecord> monte_carlo(const ExperimentConfig& cfg) {
    const QueueParams& q = cfg.params;
    const std::vector<double> times = {0.5, 1.0, 2.0};
    const TimeGrid grid{2.0, 2001};
    Engine e(q, grid, cfg.truncation);
    const sim::MonteCarloSummary mc = sim::monte_carlo(q, times, cfg.seed, cfg.n_paths);
    const double n = static_cast<double>(mc.n_paths);

    std::vector<std::pair<std::string, Curve>> states;
    states.emplace_back("p0", e.p0());
    for (int a = 1; a <= 3; ++a)
        for (int s = 1; s <= q.k; ++s)
            states.emplace_back("p(" + std::to_string(a) + "," + std::to_string(s) + ")", e.pns(a, s));

    std::vector<CheckRecord> out;
    const std::string routes = "empirical vs series, in binomial sigmas";
    for (std::size_t j = 0; j < times.size(); ++j) {
        double worst = 0.0;
        std::string where;
        for (std::size_t m = 0; m < states.size(); ++m) {
            const double p = states[m].second.value_at(times[j]);
            const double sd = std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
            const double z = std::fabs(mc.pmfs[j].probability(static_cast<long long>(m)) - p) / sd;
            if (z >= worst) {
                worst = z;
                where = "worst " + states[m].first;
            }
        }
        out.push_back(record("state pmf n<=3 at t=" + fmt(times[j]), routes, worst, kSigmaBand, where));
    }
    const Curve mean = e.mean_length();
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double z = std::fabs(mc.means[j].mean - mean.value_at(times[j])) / mc.means[j].std_error;
        out.push_back(record("mean length at t=" + fmt(times[j]), "empirical vs series, in standard errors", z,
                             kSigmaBand, "empirical " + fmt(mc.means[j].mean) + ", series " +
                                             fmt(mean.value_at(times[j]))));
    }
    return out;
}

// ---- 7 -------------------------------------------------------------------

double survival_sup(std::vector<double> sample, const Curve& c) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (int i = 0; i < c.grid.n_points; ++i) {
        const double t = c.grid.at(i);
        const auto above = sample.end() - std::upper_bound(sample.begin(), sample.end(), t);
        d = std::max(d, std::fabs(static_cast<double>(above) / n - c.values[i]));
    }
    return d;
}

std::vector<CheckRecord> sampling_lemmas(const ExperimentConfig& cfg) {
    const QueueParams& q = cfg.params;
    const long long n = static_cast<long long>(cfg.n_paths);
    std::vector<double> composite(n), direct(n), independent(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        RngStream a(cfg.seed, static_cast<std::uint64_t>(i));
        const double x = a.exponential(q.lambda);
        composite[i] = sampling::sample_mixed_subordinator_at(x, q, a);
        RngStream b(cfg.seed, static_cast<std::uint64_t>(i));
        direct[i] = sampling::sample_event_time(q.lambda, q, b);
        RngStream c(~cfg.seed, static_cast<std::uint64_t>(i));
        independent[i] = sampling::sample_event_time(q.lambda, q, c);
    }
    std::vector<CheckRecord> out;
    out.push_back(record("event time, theta=lambda", "composite sampler vs direct sampler, paired streams, KS",
                         ks_two_sample(composite, direct), kSamplerKsTol,
                         "independent-stream KS " + fmt(ks_two_sample(composite, independent))));

    Engine e(q, cfg.grid, cfg.truncation);
    for (double th : {q.lambda, q.k * q.mu, q.theta()}) {
        std::vector<double> s(n);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) {
            RngStream r(cfg.seed + 1, static_cast<std::uint64_t>(i));
            s[i] = sampling::sample_event_time(th, q, r);
        }
        out.push_back(record("survival theta=" + fmt(th), "empirical vs series, sup distance",
                             survival_sup(std::move(s), e.survival_event_time(th)), kSurvivalSupTol));
    }
    return out;
}

// ---- 8 -------------------------------------------------------------------

std::vector<CheckRecord> busy_period(const ExperimentConfig& cfg) {
    const QueueParams& q = cfg.params;
    Engine e(q, cfg.grid, cfg.truncation);
    const Curve F = e.busy_period_cdf();
    const sim::BusySample b = sim::simulate_busy_periods(q, cfg.grid.t_max, cfg.seed, cfg.n_paths);
    const double n = static_cast<double>(b.started);
    double d = 0.0;
    for (std::size_t j = 0; j < b.completed.size(); ++j) {
        const double f = F.value_at(b.completed[j]);
        d = std::max({d, std::fabs(f - j / n), std::fabs(f - (j + 1) / n)});
    }
    d = std::max(d, std::fabs(F.values.back() - b.completed.size() / n));
    std::vector<CheckRecord> out;
    CheckRecord r = record("busy-period CDF on [0, t_max]", "empirical vs series, KS", d, kBusyKsTol,
                           std::to_string(b.completed.size()) + " completed of " + std::to_string(b.started));
    if (b.completed.size() < kBusyMinCompleted) {
        r.pass = false;
        r.detail += ", fewer than " + std::to_string(kBusyMinCompleted) + " completed";
    }
    out.push_back(r);
    return out;
}

// ---- 9 -------------------------------------------------------------------

QueueParams random_params(RngStream& r) {
    QueueParams q;
    q.k = 1 + static_cast<int>(r.next_u32() % 8);
    q.lambda = 0.5 + 4.5 * r.uniform();
    q.mu = 0.5 + 4.5 * r.uniform();
    if (r.uniform() < 0.05) {
        q.c1 = 1.0;
        q.c2 = 0.0;
        q.alpha1 = 1.0;
        return q;
    }
    // 0 < alpha2 < alpha1 < 1, c1 in (0, 1]
    q.alpha1 = r.uniform();
    q.alpha2 = q.alpha1 * r.uniform();
    q.c1 = 1.0 - r.uniform() + 0x1p-53;
    if (q.c1 > 1.0) q.c1 = 1.0;
    q.c2 = 1.0 - q.c1;
    return q;
}

// Largest amount by which a curve breaks monotonicity beyond its truncation bounds.
double monotone_excess(const Curve& c, bool increasing) {
    double worst = 0.0;
    for (std::size_t i = 1; i < c.values.size(); ++i) {
        if (!std::isfinite(c.values[i]) || !std::isfinite(c.values[i - 1])) return kInf;
        const double step = c.values[i] - c.values[i - 1];
        const double excess = (increasing ? -step : step) - c.trunc_error[i] - c.trunc_error[i - 1];
        worst = std::max(worst, excess);
    }
    return worst;
}

double unit_excess(const Curve& c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        if (!std::isfinite(c.values[i])) return kInf;
        worst = std::max(worst, -c.values[i] - c.trunc_error[i]);
        worst = std::max(worst, c.values[i] - 1.0 - c.trunc_error[i]);
    }
    return worst;
}

std::vector<CheckRecord> structural_invariants(const ExperimentConfig& cfg) {
    const TimeGrid grid{1.0, 101};
    TruncationPolicy pol;
    pol.max_m = pol.max_r = pol.max_i = 10;
    pol.max_conv_N = 256;
    enum { Survival, Cdf, Normalization, JumpLaw, Determinism, kProps };
    const char* names[kProps] = {"survival monotone in [0,1]", "busy CDF monotone in [0,1]",
                                 "partial normalization 0 <= sum p <= 1", "phase-index jumps are +k or -1",
                                 "seed determinism"};
    const bool numeric[kProps] = {true, true, true, false, false};
    std::vector<int> failures(kProps, 0);
    std::vector<double> worst(kProps, 0.0);
    std::vector<long long> first_fail(kProps, -1);

#pragma omp parallel for schedule(dynamic, 1)
    for (int set = 0; set < kPropertySets; ++set) {
        RngStream r(cfg.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(set));
        const QueueParams q = random_params(r);
        double excess[kProps] = {0.0, 0.0, 0.0, 0.0, 0.0};
        bool broken[kProps] = {false, false, false, false, false};
        try {
            Engine e(q, grid, pol);
            for (double th : {q.lambda, q.k * q.mu, q.theta()}) {
                const Curve s = e.survival_event_time(th);
                excess[Survival] = std::max({excess[Survival], monotone_excess(s, false), unit_excess(s)});
            }
            const Curve b = e.busy_period_cdf();
            excess[Cdf] = std::max(monotone_excess(b, true), unit_excess(b));
            std::vector<Curve> parts{e.p0()};
            for (int n = 1; n <= 2; ++n)
                for (int s = 1; s <= q.k; ++s) parts.push_back(e.pns(n, s));
            for (int i = 0; i < grid.n_points; ++i) {
                double sum = 0.0, err = 0.0;
                for (const Curve& c : parts) {
                    if (!std::isfinite(c.values[i])) excess[Normalization] = kInf;
                    sum += c.values[i];
                    err += c.trunc_error[i];
                    excess[Normalization] = std::max(excess[Normalization], -c.values[i] - c.trunc_error[i]);
                }
                excess[Normalization] = std::max(excess[Normalization], sum - 1.0 - err);
            }
        } catch (const Error&) {
            broken[Survival] = broken[Cdf] = broken[Normalization] = true;
        }
        const std::uint64_t seed = cfg.seed ^ (0x9e3779b97f4a7c15ULL * (set + 1));
        std::vector<sim::Trajectory> a, b;
        for (std::uint64_t i = 0; i < 4; ++i) {
            RngStream s1(seed, i), s2(seed, i);
            a.push_back(sim::simulate_path(q, grid.t_max, s1));
            b.push_back(sim::simulate_path(q, grid.t_max, s2));
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto& ja = a[i].jumps;
            const auto& jb = b[i].jumps;
            if (ja.size() != jb.size()) broken[Determinism] = true;
            for (std::size_t j = 0; !broken[Determinism] && j < ja.size(); ++j)
                if (ja[j].time != jb[j].time || !(ja[j].state == jb[j].state)) broken[Determinism] = true;
            for (std::size_t j = 1; j < ja.size(); ++j) {
                const long long d = sim::phase_index(ja[j].state, q.k) - sim::phase_index(ja[j - 1].state, q.k);
                if (d != q.k && d != -1) broken[JumpLaw] = true;
            }
        }
#pragma omp critical
        for (int p = 0; p < kProps; ++p) {
            worst[p] = std::max(worst[p], excess[p]);
            if (broken[p] || excess[p] > kPropertySlack) {
                ++failures[p];
                if (first_fail[p] < 0 || set < first_fail[p]) first_fail[p] = set;
            }
        }
    }
    std::vector<CheckRecord> out;
    for (int p = 0; p < kProps; ++p) {
        std::string detail = std::to_string(kPropertySets) + " parameter sets, " + std::to_string(failures[p]) +
                             " failing";
        if (failures[p] > 0) detail += ", first failing set " + std::to_string(first_fail[p]);
        if (numeric[p]) {
            CheckRecord rec = record(names[p], "worst excess beyond truncation bounds", worst[p], kPropertySlack, detail);
            rec.pass = rec.pass && failures[p] == 0;
            out.push_back(rec);
        } else {
            out.push_back(record(names[p], "property over randomized parameters, failing sets", failures[p], 0.0, detail));
        }
    }
    return out;
}

using Runner = std::function<std::vector<CheckRecord>(const ExperimentConfig&)>;

struct Entry {
    CheckInfo info;
    Runner run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {{"special-functions", 1, "Mittag-Leffler exp/cosh identities"},
         [](const ExperimentConfig&) { return special_functions(); }},
        {{"lt-roundtrip", 2, "closed-form transforms vs inverted series curves"},
         [](const ExperimentConfig& c) { return lt_roundtrip(c, ""); }},
        {{"governing-system", 3, "transformed governing equation for p0"}, governing_system},
        {{"fractional-reduction", 4, "c1 = 1 mixed vs single-order"}, fractional_reduction},
        {{"classical-limit", 5, "c1 = 1, alpha1 = 1 vs CTMC"}, classical_limit},
        {{"monte-carlo", 6, "simulated state pmf and mean vs series"}, monte_carlo},
        {{"sampling-lemmas", 7, "event-time samplers vs each other and the series"}, sampling_lemmas},
        {{"busy-period", 8, "simulated busy periods vs series CDF"}, busy_period},
        {{"structural-invariants", 9, "properties over randomized parameter sets"}, structural_invariants},
    };
    return r;
}

const char* kRoundTripParts[] = {"p0", "pns", "mean", "busy", "survival", "service"};

}  // namespace

bool CheckResult::pass() const {
    if (records.empty()) return false;
    return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

bool ValidationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["pass"] = pass();
    j["environment"] = environment;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json jc{{"name", c.name}, {"criterion", c.criterion}, {"pass", c.pass()}};
        jc["records"] = nlohmann::json::array();
        for (const auto& r : c.records) {
            jc["records"].push_back({{"quantity", r.quantity},
                                     {"routes", r.routes},
                                     {"max_deviation", r.max_deviation},
                                     {"tolerance", r.tolerance},
                                     {"pass", r.pass},
                                     {"detail", r.detail}});
        }
        j["checks"].push_back(std::move(jc));
    }
    return j;
}

const std::vector<CheckInfo>& checks() {
    static const std::vector<CheckInfo> v = [] {
        std::vector<CheckInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return v;
}

CheckResult run_check(const std::string& name, const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult res;
    res.name = name;
    bool found = false;
    for (const auto& e : registry()) {
        if (name == e.info.name) {
            res.criterion = e.info.criterion;
            res.records = e.run(cfg);
            found = true;
        }
    }
    for (const char* part : kRoundTripParts) {
        if (name == std::string("lt-roundtrip-") + part) {
            res.criterion = 2;
            res.records = lt_roundtrip(cfg, part);
            found = true;
        }
    }
    if (!found) throw ConfigError("unknown check '" + name + "'");
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ValidationReport run_validate(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::string> names = cfg.checks;
    if (names.empty())
        for (const auto& c : checks()) names.push_back(c.name);
    // reject unknown names before spending time on the known ones
    for (const auto& n : names) {
        const bool known = std::any_of(checks().begin(), checks().end(), [&](const CheckInfo& c) { return n == c.name; }) ||
                           std::any_of(std::begin(kRoundTripParts), std::end(kRoundTripParts),
                                       [&](const char* p) { return n == std::string("lt-roundtrip-") + p; });
        if (!known) throw ConfigError("unknown check '" + n + "'");
    }
    ValidationReport rep;
    rep.environment = {
        {"version", MERLANG_VERSION},
        {"compiler", __VERSION__},
        {"max_threads", omp_get_max_threads()},
        {"config", to_json(cfg)},
    };
    for (const auto& n : names) rep.checks.push_back(run_check(n, cfg));
    return rep;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterError("KS needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

}  // namespace merlang::validate
