#pragma once

#include "merlang/coeffs.hpp"
#include "merlang/convolve.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace merlang::analytic {

struct TimeGrid {
    double t_max = 3.0;
    int n_points = 3001;

    void validate() const;
    double h() const { return t_max / (n_points - 1); }
    double at(int i) const { return i == n_points - 1 ? t_max : i * h(); }
    std::vector<double> times() const;
};

enum class CurveKind { Probability, Survival, CDF, Mean, Density };

const char* kind_name(CurveKind k);

struct Curve {
    TimeGrid grid;
    std::vector<double> values;
    CurveKind kind = CurveKind::Probability;
    std::vector<double> trunc_error;
    bool flagged = false;
    std::string label;

    double max_trunc_error() const;
    /// Linear interpolation on the grid.
    double value_at(double t) const;
};

struct TruncationPolicy {
    double eps_rel = 1e-8;
    int max_m = 40;
    int max_r = 40;
    int max_i = 40;
    int max_conv_N = 1024;

    void validate() const;
    coeffs::IndexCaps caps() const { return {max_m, max_r, max_i}; }
};

/// How the event-time density and its integrals are evaluated.
/// SingleOrder uses two-parameter Mittag-Leffler functions directly and
/// requires a single fractional order (c2 = 0 after the c1 = 0 swap).
enum class EvalPath { Mixed, SingleOrder };

/// Curve builder for one parameter set and grid. Holds the distribution
/// functions C_N of sums of N sojourn times, built by repeated convolution
/// and shared by p0, p_{n,s}, the mean and the busy period.
/// When the grid step exceeds the width of the sojourn law's initial layer,
/// (c1/theta)^{1/alpha1}, the first kRefineCells cells of chain-based curves
/// are recomputed on a grid kRefineFactor times finer (at most kMaxRefine
/// levels deep).
/// Not safe for concurrent use; create one engine per thread.
class Engine {
public:
    Engine(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol,
           EvalPath path = EvalPath::Mixed);

    Curve p0();
    Curve pns(int n, int s);
    Curve queue_length_pmf(int n);
    Curve mean_length();
    Curve busy_period_cdf();
    Curve survival_event_time(double theta);
    Curve service_density();

    /// Density of a single event time with rate theta, with antiderivatives.
    conv::GridFunction event_density_grid(double theta) const;
    /// Number of convolution orders built so far.
    int chain_length() const { return static_cast<int>(chain_.size()) - 1; }

    static constexpr int kRefineCells = 32;
    static constexpr int kRefineFactor = 10;
    static constexpr int kMaxRefine = 2;

private:
    QueueParams q_;
    TimeGrid grid_;
    TruncationPolicy pol_;
    EvalPath path_;
    conv::GridFunction sojourn_;
    conv::GridFunction tip_;  // density of the sum of chain_length() sojourns
    bool have_sojourn_ = false;
    std::vector<std::vector<double>> chain_;  // chain_[N] = C_N on the grid
    int depth_ = 0;
    std::unique_ptr<Engine> fine_;

    Engine* fine_engine();
    void refine_start(Curve& c, const std::function<Curve(Engine&)>& f);

    // Extends the chain up to min(N, max_conv_N) or until C_N(t_max) is
    // negligible. Returns the last order available.
    int extend_chain(int N);
    Curve from_increments(const std::vector<double>& w, const std::vector<double>& shell,
                          CurveKind kind, const std::string& label);
    Curve from_cdfs(const std::vector<double>& w, const std::vector<double>& shell,
                    CurveKind kind, const std::string& label);
    void finish(Curve& c) const;
};

conv::GridFunction nfold_convolve(const conv::GridFunction& kernel, int N, const TruncationPolicy& pol);

Curve p0_curve(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol);
Curve pns_curve(int n, int s, const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol);
Curve queue_length_pmf(int n, const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol);
Curve mean_length_curve(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol);
Curve survival_event_time(double theta, const QueueParams& q, const TimeGrid& grid,
                          const TruncationPolicy& pol);
Curve service_density(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol);
Curve busy_period_cdf(const QueueParams& q, const TimeGrid& grid, const TruncationPolicy& pol);

/// Queue length n in phases -> (customers, remaining phases of the customer in service).
int a_k(int n, int k);
int b_k(int n, int k);

}  // namespace merlang::analytic
