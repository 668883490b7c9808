#include "merlang/analytic.hpp"
#include "merlang/ctmc.hpp"
#include "merlang/errors.hpp"
#include "merlang/sim.hpp"
#include "merlang/validate.hpp"

#include <gtest/gtest.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace merlang;
using namespace merlang::sim;

namespace {

QueueParams fig1() { return QueueParams::figure1(); }

QueueParams classical() {
    QueueParams q;
    q.c1 = 1.0;
    q.c2 = 0.0;
    q.alpha1 = 1.0;
    return q;
}

double binomial_se(double p, double n) { return std::sqrt(std::max(p * (1.0 - p), 1e-12) / n); }

// sup over grid points of |empirical CDF - curve|
double busy_distance(const BusySample& b, const analytic::Curve& c) {
    double d = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) d = std::max(d, std::fabs(b.cdf(c.grid.at(i)) - c.values[i]));
    return d;
}

}  // namespace

TEST(PhaseIndex, Examples) {
    EXPECT_EQ(phase_index({0, 0}, 4), 0);
    EXPECT_EQ(phase_index({2, 3}, 4), 7);
    EXPECT_EQ(phase_index({1, 4}, 4), 4);
    EXPECT_EQ(state_from_index(0, 4), (QueueState{0, 0}));
    EXPECT_EQ(state_from_index(4, 4), (QueueState{1, 4}));
}

TEST(PhaseIndex, RoundTrip) {
    for (int k = 1; k <= 8; ++k) {
        EXPECT_EQ(state_from_index(phase_index({0, 0}, k), k), (QueueState{0, 0}));
        for (int n = 1; n <= 100; ++n)
            for (int s = 1; s <= k; ++s) EXPECT_EQ(state_from_index(phase_index({n, s}, k), k), (QueueState{n, s}));
    }
}

TEST(PhaseIndex, InvalidStates) {
    EXPECT_THROW(validate_state({0, 1}, 4), ParameterError);
    EXPECT_THROW(validate_state({1, 0}, 4), ParameterError);
    EXPECT_THROW(validate_state({1, 5}, 4), ParameterError);
    EXPECT_THROW(state_from_index(-1, 4), ParameterError);
}

TEST(NextEvent, EmptyQueueGoesToFullService) {
    RngStream r(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const Event e = next_event({0, 0}, fig1(), r);
        EXPECT_EQ(e.next, (QueueState{1, 4}));
        EXPECT_GT(e.holding, 0.0);
    }
}

TEST(NextEvent, CompletionFromLastPhase) {
    RngStream r(2, 0);
    const int n = 100000;
    int empty = 0;
    for (int i = 0; i < n; ++i) {
        const Event e = next_event({1, 1}, fig1(), r);
        if (e.next == QueueState{0, 0}) {
            ++empty;
        } else {
            EXPECT_EQ(e.next, (QueueState{2, 1}));
        }
    }
    const double p = 20.0 / 26.0;
    EXPECT_NEAR(empty / double(n), p, 3.0 * binomial_se(p, n));
}

TEST(NextEvent, Transitions) {
    RngStream r(3, 0);
    for (int i = 0; i < 1000; ++i) {
        const Event a = next_event({3, 2}, fig1(), r);
        EXPECT_TRUE(a.next == (QueueState{4, 2}) || a.next == (QueueState{3, 1}));
        const Event b = next_event({3, 1}, fig1(), r);
        EXPECT_TRUE(b.next == (QueueState{4, 1}) || b.next == (QueueState{2, 4}));
    }
}

TEST(NextEvent, ArrivalFrequency) {
    const QueueParams q = fig1();
    RngStream r(4, 0);
    const int n = 1000000;
    int arrivals = 0;
    QueueState st{5, 2};
    for (int i = 0; i < n; ++i) {
        const Event e = next_event(st, q, r);
        if (e.next.n > st.n) ++arrivals;
        st = e.next.n == 0 ? QueueState{5, 2} : e.next;
        if (st.n > 1000) st = {5, 2};
    }
    const double p = 6.0 / 26.0;
    EXPECT_NEAR(arrivals / double(n), p, 3.0 * binomial_se(p, n));
}

TEST(SimulatePath, JumpLawAndOrdering) {
    const QueueParams q = fig1();
    const auto paths = simulate_paths(q, 3.0, 5, 200);
    for (const Trajectory& t : paths) {
        ASSERT_FALSE(t.jumps.empty());
        EXPECT_EQ(t.jumps.front().time, 0.0);
        EXPECT_EQ(t.jumps.front().state, (QueueState{0, 0}));
        for (std::size_t j = 1; j < t.jumps.size(); ++j) {
            EXPECT_GT(t.jumps[j].time, t.jumps[j - 1].time);
            EXPECT_LE(t.jumps[j].time, 3.0);
            const long long d = phase_index(t.jumps[j].state, q.k) - phase_index(t.jumps[j - 1].state, q.k);
            EXPECT_TRUE(d == q.k || d == -1);
        }
    }
}

TEST(SimulatePath, ShortHorizon) {
    RngStream r(6, 0);
    const Trajectory t = simulate_path(fig1(), 1e-300, r);
    EXPECT_EQ(t.jumps.size(), 1u);
    EXPECT_THROW(simulate_path(fig1(), 0.0, r), ParameterError);
}

TEST(SimulatePath, DeterministicAcrossThreadCounts) {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = simulate_paths(fig1(), 2.0, 99, 64);
    omp_set_num_threads(3);
    const auto b = simulate_paths(fig1(), 2.0, 99, 64);
    omp_set_num_threads(saved);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].path_id, b[i].path_id);
        ASSERT_EQ(a[i].jumps.size(), b[i].jumps.size());
        for (std::size_t j = 0; j < a[i].jumps.size(); ++j) {
            EXPECT_EQ(a[i].jumps[j].time, b[i].jumps[j].time);
            EXPECT_EQ(a[i].jumps[j].state, b[i].jumps[j].state);
        }
    }
}

TEST(SimulatePath, HoldingTimesExchangeable) {
    // lag-1 correlation of batch-mean ranks against its permutation distribution;
    // draws from one stream, no horizon, so nothing couples successive events
    RngStream r(8, 0);
    const QueueState st{2, 3};
    std::vector<double> hold(100000);
    for (double& h : hold) h = next_event(st, fig1(), r).holding;
    const std::size_t batch = 50, nb = hold.size() / batch;
    ASSERT_GT(nb, 200u);
    std::vector<double> means(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t i = 0; i < batch; ++i) means[b] += hold[b * batch + i] / batch;
    std::vector<std::size_t> order(nb);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return means[x] < means[y]; });
    std::vector<double> rank(nb);
    for (std::size_t i = 0; i < nb; ++i) rank[order[i]] = static_cast<double>(i);
    auto lag1 = [&](const std::vector<double>& v) {
        const double m = (nb - 1) / 2.0;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < nb; ++i) {
            den += (v[i] - m) * (v[i] - m);
            if (i + 1 < nb) num += (v[i] - m) * (v[i + 1] - m);
        }
        return num / den;
    };
    const double observed = std::fabs(lag1(rank));
    std::mt19937_64 gen(2024);
    int extreme = 0;
    const int perms = 999;
    std::vector<double> p = rank;
    for (int i = 0; i < perms; ++i) {
        std::shuffle(p.begin(), p.end(), gen);
        if (std::fabs(lag1(p)) >= observed) ++extreme;
    }
    EXPECT_GT((extreme + 1.0) / (perms + 1.0), 0.05);
}

TEST(Estimators, TimeZero) {
    const auto paths = simulate_paths(fig1(), 1.0, 9, 100);
    const EmpiricalPmf p = estimate_state_pmf(paths, 0.0, 4);
    EXPECT_EQ(p.counts[0], 100u);
    EXPECT_EQ(p.probability(0), 1.0);
    const MeanEstimate m = estimate_mean_length(paths, 0.0, 4);
    EXPECT_EQ(m.mean, 0.0);
}

TEST(Estimators, CountsSumToPaths) {
    const auto paths = simulate_paths(fig1(), 2.0, 10, 500);
    const EmpiricalPmf p = estimate_state_pmf(paths, 1.5, 4);
    EXPECT_EQ(std::accumulate(p.counts.begin(), p.counts.end(), std::uint64_t{0}), 500u);
    EXPECT_EQ(p.counts.size(), static_cast<std::size_t>(kPmfCap + 1));
}

TEST(Estimators, StateAtIsRightContinuous) {
    Trajectory t;
    t.jumps = {{0.0, {0, 0}}, {0.5, {1, 4}}, {0.7, {1, 3}}};
    EXPECT_EQ(state_at(t, 0.49), (QueueState{0, 0}));
    EXPECT_EQ(state_at(t, 0.5), (QueueState{1, 4}));
    EXPECT_EQ(state_at(t, 10.0), (QueueState{1, 3}));
}

TEST(Estimators, BusyPeriodsFromPaths) {
    Trajectory t;
    t.jumps = {{0.0, {0, 0}}, {1.0, {1, 2}}, {1.5, {1, 1}}, {2.0, {0, 0}}, {3.0, {1, 2}}, {3.2, {1, 1}}};
    const std::vector<double> b = extract_busy_periods({t});
    ASSERT_EQ(b.size(), 1u);
    EXPECT_DOUBLE_EQ(b[0], 1.0);
}

TEST(Estimators, StreamingMatchesStored) {
    const QueueParams q = fig1();
    const auto paths = simulate_paths(q, 1.0, 12, 300);
    const MonteCarloSummary s = monte_carlo(q, {0.25, 1.0}, 12, 300);
    for (int j = 0; j < 2; ++j) {
        const EmpiricalPmf p = estimate_state_pmf(paths, s.times[j], q.k);
        EXPECT_EQ(p.counts, s.pmfs[j].counts);
        EXPECT_EQ(estimate_mean_length(paths, s.times[j], q.k).mean, s.means[j].mean);
    }
}

TEST(MonteCarlo, ClassicalP0AgainstCtmc) {
    const QueueParams q = classical();
    const analytic::TimeGrid g{1.0, 101};
    const Eigen::MatrixXd dist = ctmc::classical_distributions(q, g);
    const double p = dist(100, 0);
    const MonteCarloSummary s = monte_carlo(q, {1.0}, 13, 100000);
    EXPECT_NEAR(s.pmfs[0].probability(0), p, 3.0 * binomial_se(p, 100000));
}

TEST(MonteCarlo, FigureOneAgainstSeries) {
    const QueueParams q = fig1();
    analytic::TruncationPolicy pol;
    pol.max_m = pol.max_r = pol.max_i = 80;
    analytic::Engine e(q, analytic::TimeGrid{1.0, 1001}, pol);
    const std::uint64_t n = 100000;
    const MonteCarloSummary s = monte_carlo(q, {1.0}, 14, n);
    for (int m = 0; m <= 3 * q.k; ++m) {
        const double p = e.queue_length_pmf(m).values.back();
        EXPECT_NEAR(s.pmfs[0].probability(m), p, 3.0 * binomial_se(p, n)) << m;
    }
    const double mean = e.mean_length().values.back();
    EXPECT_NEAR(s.means[0].mean, mean, 3.0 * s.means[0].std_error);
}

TEST(BusyPeriod, ClassicalAgainstSeries) {
    const QueueParams q = classical();
    analytic::Engine e(q, analytic::TimeGrid{3.0, 3001}, analytic::TruncationPolicy{});
    const BusySample b = simulate_busy_periods(q, 3.0, 15, 100000);
    EXPECT_LE(busy_distance(b, e.busy_period_cdf()), 0.01);
}

TEST(BusyPeriod, FigureOneAgainstSeries) {
    const QueueParams q = fig1();
    analytic::Engine e(q, analytic::TimeGrid{3.0, 3001}, analytic::TruncationPolicy{});
    const BusySample b = simulate_busy_periods(q, 3.0, 16, 20000);
    EXPECT_GE(b.completed.size(), 10000u);
    EXPECT_LE(busy_distance(b, e.busy_period_cdf()), 0.02);
    EXPECT_THROW(b.cdf(3.5), DomainError);
}
