#include "merlang/analytic.hpp"

#include "merlang/errors.hpp"
#include "merlang/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace merlang::analytic {

namespace {

// C_N(t_max) below this ends the chain; later orders only add to the tail.
constexpr double kChainFloor = 1e-17;

int last_nonzero(const std::vector<double>& w) {
    for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) {
        if (w[i] != 0.0) return i;
    }
    return 0;
}

}  // namespace

void TimeGrid::validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ParameterError("grid: t_max must be positive");
    if (n_points < 2) throw ParameterError("grid: n_points must be at least 2");
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(n_points);
    for (int i = 0; i < n_points; ++i) t[i] = at(i);
    return t;
}

const char* kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Probability: return "probability";
        case CurveKind::Survival: return "survival";
        case CurveKind::CDF: return "cdf";
        case CurveKind::Mean: return "mean";
        case CurveKind::Density: return "density";
    }
    return "unknown";
}

double Curve::max_trunc_error() const {
    double m = 0.0;
    for (double e : trunc_error) m = std::max(m, e);
    return m;
}

double Curve::value_at(double t) const {
    if (values.empty()) throw ParameterError("curve is empty");
    const double h = grid.h();
    if (t <= 0.0) return values.front();
    if (t >= grid.t_max) return values.back();
    const double x = t / h;
    const int i = std::min(static_cast<int>(x), grid.n_points - 2);
    const double f = x - i;
    return values[i] * (1.0 - f) + values[i + 1] * f;
}

void TruncationPolicy::validate() const {
    if (!(eps_rel > 0.0)) throw ParameterError("policy: eps_rel must be positive");
    if (max_m < 1 || max_r < 1 || max_i < 1 || max_conv_N < 1) {
        throw ParameterError("policy: all caps must be at least 1");
    }
}

int a_k(int n, int k) {
    if (n < 1 || k < 1) throw ParameterError("a_k: n and k must be positive");
    return (n + k - 1) / k;
}

int b_k(int n, int k) { return n - k * (a_k(n, k) - 1); }

Engine::Engine(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol, EvalPath path)
    : q_(q.effective()), grid_(grid), pol_(pol), path_(path) {
    q.validate();
    grid.validate();
    pol.validate();
    if (path_ == EvalPath::SingleOrder && q_.c2 != 0.0) {
        throw ParameterError("single-order path needs c1 = 1 or c2 = 1");
    }
}

conv::GridFunction Engine::event_density_grid(double theta) const {
    if (!(theta > 0.0)) throw ParameterError("event rate must be positive");
    const int n = grid_.n_points;
    conv::GridFunction g;
    g.h = grid_.h();
    g.exponent = q_.alpha1 - 1.0;
    g.v0.assign(n, 0.0);
    g.v1.assign(n, 0.0);
    g.v2.assign(n, 0.0);
    const double b = theta / q_.c1;
    const double a1 = q_.alpha1;
    const bool mixed = path_ == EvalPath::Mixed;
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 1; i < n; ++i) {
        const double t = grid_.at(i);
        if (mixed) {
            const coeffs::EventKernels e = coeffs::event_time_kernels(theta, t, q_);
            g.v0[i] = e.density;
            g.v1[i] = e.cdf;
            g.v2[i] = e.cdf_integral;
            continue;
        }
        double* out[3] = {&g.v0[i], &g.v1[i], &g.v2[i]};
        const double x = -b * std::pow(t, a1);
        for (int level = 0; level < 3; ++level) {
            *out[level] = b * std::pow(t, a1 - 1.0 + level) * specfun::mittag_leffler3({a1, a1 + level, 1.0}, x);
        }
    }
    g.regularize_origin();
    return g;
}

int Engine::extend_chain(int N) {
    if (!have_sojourn_) {
        sojourn_ = event_density_grid(q_.theta());
        have_sojourn_ = true;
        chain_.assign(1, std::vector<double>(grid_.n_points, 1.0));
    }
    const int target = std::min(N, pol_.max_conv_N);
    while (chain_length() < target) {
        if (chain_length() >= 1 && chain_.back().back() < kChainFloor) break;
        if (chain_length() == 0) {
            tip_ = sojourn_;
        } else {
            tip_ = conv::convolve(tip_, sojourn_);
        }
        chain_.push_back(tip_.v1);
    }
    return chain_length();
}

Curve Engine::from_increments(const std::vector<double>& w, const std::vector<double>& shell,
                              CurveKind kind, const std::string& label) {
    // theta * sum_N w_N (C_{N-1} - C_N)
    const int top = std::max(last_nonzero(w), last_nonzero(shell));
    const int L = extend_chain(top);
    const int n = grid_.n_points;
    const double th = q_.theta();
    Curve c;
    c.grid = grid_;
    c.kind = kind;
    c.label = label;
    c.values.assign(n, 0.0);
    c.trunc_error.assign(n, 0.0);
    double beyond = 0.0;
    for (int N = L + 1; N <= top; ++N) {
        beyond += std::fabs(N < static_cast<int>(w.size()) ? w[N] : 0.0) +
                  std::fabs(N < static_cast<int>(shell.size()) ? shell[N] : 0.0);
    }
    for (int i = 0; i < n; ++i) {
        double v = 0.0, e = 0.0;
        for (int N = 1; N <= std::min(L, top); ++N) {
            const double inc = chain_[N - 1][i] - chain_[N][i];
            if (N < static_cast<int>(w.size())) v += w[N] * inc;
            if (N < static_cast<int>(shell.size())) e += shell[N] * std::fabs(inc);
        }
        c.values[i] = th * v;
        c.trunc_error[i] = th * (e + beyond * chain_[L][i]);
    }
    return c;
}

Curve Engine::from_cdfs(const std::vector<double>& w, const std::vector<double>& shell,
                        CurveKind kind, const std::string& label) {
    // sum_N w_N C_N
    const int top = std::max(last_nonzero(w), last_nonzero(shell));
    const int L = extend_chain(top);
    const int n = grid_.n_points;
    Curve c;
    c.grid = grid_;
    c.kind = kind;
    c.label = label;
    c.values.assign(n, 0.0);
    c.trunc_error.assign(n, 0.0);
    double beyond = 0.0;
    for (int N = L + 1; N <= top; ++N) {
        beyond += std::fabs(N < static_cast<int>(w.size()) ? w[N] : 0.0) +
                  std::fabs(N < static_cast<int>(shell.size()) ? shell[N] : 0.0);
    }
    for (int i = 0; i < n; ++i) {
        double v = 0.0, e = 0.0;
        for (int N = 1; N <= std::min(L, top); ++N) {
            if (N < static_cast<int>(w.size())) v += w[N] * chain_[N][i];
            if (N < static_cast<int>(shell.size())) e += shell[N] * chain_[N][i];
        }
        c.values[i] = v;
        c.trunc_error[i] = e + beyond * chain_[L][i];
    }
    return c;
}

Engine* Engine::fine_engine() {
    if (fine_) return fine_.get();
    if (depth_ >= kMaxRefine) return nullptr;
    const double layer = std::pow(q_.c1 / q_.theta(), 1.0 / q_.alpha1);
    if (!(grid_.h() > 0.5 * layer)) return nullptr;
    const int cells = std::min(kRefineCells, grid_.n_points - 1);
    const TimeGrid fine{grid_.at(cells), cells * kRefineFactor + 1};
    fine_ = std::make_unique<Engine>(q_, fine, pol_, path_);
    fine_->depth_ = depth_ + 1;
    return fine_.get();
}

void Engine::refine_start(Curve& c, const std::function<Curve(Engine&)>& f) {
    Engine* fe = fine_engine();
    if (!fe) return;
    const Curve fc = f(*fe);
    const int cells = fe->grid_.n_points / kRefineFactor;
    for (int i = 1; i <= cells; ++i) {
        c.values[i] = fc.values[i * kRefineFactor];
        c.trunc_error[i] = fc.trunc_error[i * kRefineFactor];
    }
}

void Engine::finish(Curve& c) const {
    double scale = 1.0;
    for (double v : c.values) scale = std::max(scale, std::fabs(v));
    c.flagged = c.max_trunc_error() > 10.0 * pol_.eps_rel * scale;
}

Curve Engine::p0() {
    const coeffs::IndexCaps caps = pol_.caps();
    const int n_max = coeffs::p0_horizon(caps, q_.k);
    Curve c = from_increments(coeffs::p0_weights(q_, n_max, &caps), coeffs::p0_shell(q_, n_max, caps),
                              CurveKind::Probability, "p0");
    c.values[0] = 1.0;
    c.trunc_error[0] = 0.0;
    refine_start(c, [](Engine& e) { return e.p0(); });
    finish(c);
    return c;
}

Curve Engine::pns(int n, int s) {
    if (n < 1 || s < 1 || s > q_.k) throw ParameterError("pns: (n, s) outside the state space");
    const coeffs::IndexCaps caps = pol_.caps();
    const int n_max = coeffs::pns_horizon(n, s, caps, q_.k);
    Curve c = from_increments(coeffs::pns_weights(n, s, q_, n_max, &caps),
                              coeffs::pns_shell(n, s, q_, n_max, caps), CurveKind::Probability,
                              "p_" + std::to_string(n) + "_" + std::to_string(s));
    c.values[0] = 0.0;
    c.trunc_error[0] = 0.0;
    refine_start(c, [n, s](Engine& e) { return e.pns(n, s); });
    finish(c);
    return c;
}

Curve Engine::queue_length_pmf(int n) {
    if (n < 0) throw ParameterError("queue length must be nonnegative");
    if (n == 0) return p0();
    return pns(a_k(n, q_.k), b_k(n, q_.k));
}

Curve Engine::mean_length() {
    const coeffs::IndexCaps caps = pol_.caps();
    const int n_max = coeffs::p0_horizon(caps, q_.k);
    const double kmu = q_.k * q_.mu;
    std::vector<double> w = coeffs::p0_weights(q_, n_max, &caps);
    std::vector<double> sh = coeffs::p0_shell(q_, n_max, caps);
    for (double& x : w) x *= kmu;
    for (double& x : sh) x *= kmu;
    Curve c = from_cdfs(w, sh, CurveKind::Mean, "mean");
    const double lead = q_.k * (q_.lambda - q_.mu) / q_.c1;
    const double da = q_.alpha1 - q_.alpha2;
    const double a = q_.c2 / q_.c1;
    for (int i = 1; i < grid_.n_points; ++i) {
        const double t = grid_.at(i);
        double e;
        if (path_ == EvalPath::Mixed && a > 0.0) {
            e = specfun::mittag_leffler3({da, q_.alpha1 + 1.0, 1.0}, -a * std::pow(t, da));
        } else {
            e = specfun::rgamma(q_.alpha1 + 1.0);
        }
        c.values[i] += lead * std::pow(t, q_.alpha1) * e;
    }
    c.values[0] = 0.0;
    c.trunc_error[0] = 0.0;
    refine_start(c, [](Engine& e) { return e.mean_length(); });
    finish(c);
    return c;
}

Curve Engine::busy_period_cdf() {
    const coeffs::IndexCaps caps = pol_.caps();
    const int n_max = coeffs::busy_horizon(caps, q_.k);
    Curve c = from_cdfs(coeffs::busy_weights(q_, n_max, &caps), coeffs::busy_shell(q_, n_max, caps),
                        CurveKind::CDF, "busy_cdf");
    c.values[0] = 0.0;
    c.trunc_error[0] = 0.0;
    refine_start(c, [](Engine& e) { return e.busy_period_cdf(); });
    finish(c);
    return c;
}

Curve Engine::survival_event_time(double theta) {
    if (!(theta > 0.0)) throw ParameterError("event rate must be positive");
    const int n = grid_.n_points;
    Curve c;
    c.grid = grid_;
    c.kind = CurveKind::Survival;
    c.label = "survival";
    c.values.assign(n, 1.0);
    c.trunc_error.assign(n, 0.0);
    const double b = theta / q_.c1;
    const bool mixed = path_ == EvalPath::Mixed;
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 1; i < n; ++i) {
        const double t = grid_.at(i);
        if (mixed) {
            const coeffs::EventKernels e = coeffs::event_time_kernels(theta, t, q_);
            c.values[i] = e.survival;
            c.trunc_error[i] = e.error;
        } else {
            c.values[i] = specfun::mittag_leffler3({q_.alpha1, 1.0, 1.0}, -b * std::pow(t, q_.alpha1));
        }
    }
    finish(c);
    return c;
}

Curve Engine::service_density() {
    const conv::GridFunction g = conv::nfold_convolve(event_density_grid(q_.k * q_.mu), q_.k, pol_.max_conv_N);
    Curve c;
    c.grid = grid_;
    c.kind = CurveKind::Density;
    c.label = "service_density";
    c.values = g.v0;
    c.trunc_error.assign(grid_.n_points, 0.0);
    refine_start(c, [](Engine& e) { return e.service_density(); });
    finish(c);
    return c;
}

conv::GridFunction nfold_convolve(const conv::GridFunction& kernel, int N, const TruncationPolicy& pol) {
    return conv::nfold_convolve(kernel, N, pol.max_conv_N);
}

Curve p0_curve(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol) {
    return Engine(q, grid, pol).p0();
}

Curve pns_curve(int n, int s, const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol) {
    return Engine(q, grid, pol).pns(n, s);
}

Curve queue_length_pmf(int n, const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol) {
    return Engine(q, grid, pol).queue_length_pmf(n);
}

Curve mean_length_curve(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol) {
    return Engine(q, grid, pol).mean_length();
}

Curve survival_event_time(double theta, const QueueParams& q, const TimeGrid& grid,
                          const TruncationPolicy& pol) {
    return Engine(q, grid, pol).survival_event_time(theta);
}

Curve service_density(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol) {
    return Engine(q, grid, pol).service_density();
}

Curve busy_period_cdf(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol) {
    return Engine(q, grid, pol).busy_period_cdf();
}

}  // namespace merlang::analytic
