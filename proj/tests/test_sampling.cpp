#include "merlang/analytic.hpp"
#include "merlang/laplace.hpp"
#include "merlang/rng.hpp"
#include "merlang/sampling.hpp"
#include "merlang/validate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace merlang;
using namespace merlang::sampling;

namespace {

QueueParams fig1() { return QueueParams::figure1(); }

QueueParams single(double alpha) {
    QueueParams q;
    q.c1 = 1.0;
    q.c2 = 0.0;
    q.alpha1 = alpha;
    return q;
}

template <class Cdf>
double ks_one_sample(std::vector<double> x, Cdf F) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = F(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

}  // namespace

// Random123 known-answer vectors for Philox4x32-10
TEST(Philox, KnownAnswers) {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    EXPECT_EQ(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}),
              (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}),
              (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, Reproducible) {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_stream = false, differs_seed = false;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs_stream |= x != c.next_u64();
        differs_seed |= x != d.next_u64();
    }
    EXPECT_TRUE(differs_stream);
    EXPECT_TRUE(differs_seed);
}

TEST(RngStream, CopyKeepsPosition) {
    RngStream a(1, 2);
    a.next_u32();
    RngStream b = a;
    EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(RngStream, UniformOpenInterval) {
    RngStream r(5, 0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Stable, LaplaceTransformHalf) {
    RngStream r(11, 0);
    const int n = 1000000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_stable_unit(0.5, r);
        ASSERT_GT(x, 0.0);
        const double e = std::exp(-x);
        s += e;
        s2 += e * e;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, std::exp(-1.0), 3.0 * se);
}

TEST(Stable, LevyDistribution) {
    // LT exp(-sqrt z) is the Levy law with CDF erfc(1 / (2 sqrt x))
    RngStream r(12, 0);
    std::vector<double> x(1000000);
    for (double& v : x) v = sample_stable_unit(0.5, r);
    EXPECT_LE(ks_one_sample(x, [](double v) { return std::erfc(0.5 / std::sqrt(v)); }), 0.002);
}

TEST(Stable, DegenerateAtOne) {
    RngStream r(1, 0);
    EXPECT_EQ(sample_stable_unit(1.0, r), 1.0);
}

TEST(Stable, PositiveForSmallOrders) {
    RngStream r(13, 0);
    for (double a : {0.05, 0.2, 0.9, 0.999})
        for (int i = 0; i < 10000; ++i) {
            const double x = sample_stable_unit(a, r);
            ASSERT_TRUE(x > 0.0 && std::isfinite(x)) << a;
        }
}

// below about 0.05 the variate leaves double range; event times stay finite
TEST(Stable, EventTimeFiniteForTinyOrders) {
    RngStream r(14, 0);
    QueueParams q;
    q.alpha1 = 0.006;
    q.alpha2 = 0.0006;
    q.c1 = 0.43;
    q.c2 = 1.0 - q.c1;
    for (int i = 0; i < 10000; ++i) {
        const double x = sample_event_time(18.6, q, r);
        ASSERT_TRUE(x >= 0.0 && !std::isnan(x));
    }
}

TEST(EventTime, ClassicalIsExponential) {
    RngStream r(21, 0);
    std::vector<double> x(100000);
    for (double& v : x) v = sample_event_time(6.0, single(1.0), r);
    // 0.1% critical value of the one-sample KS statistic
    EXPECT_LE(ks_one_sample(x, [](double v) { return -std::expm1(-6.0 * v); }), 1.95 / std::sqrt(100000.0));
}

TEST(EventTime, SurvivalAgainstSeries) {
    const QueueParams q = fig1();
    const analytic::TimeGrid grid{3.0, 3001};
    analytic::Engine e(q, grid, analytic::TruncationPolicy{});
    for (double th : {6.0, 26.0}) {
        const analytic::Curve s = e.survival_event_time(th);
        RngStream r(22, static_cast<std::uint64_t>(th));
        std::vector<double> x(100000);
        for (double& v : x) v = sample_event_time(th, q, r);
        std::sort(x.begin(), x.end());
        double sup = 0.0;
        for (int i = 0; i < grid.n_points; i += 10) {
            const double t = grid.at(i);
            const double above = static_cast<double>(x.end() - std::upper_bound(x.begin(), x.end(), t)) / x.size();
            sup = std::max(sup, std::fabs(above - s.values[i]));
        }
        EXPECT_LE(sup, 0.01) << th;
    }
}

TEST(EventTime, EmpiricalLaplaceTransform) {
    const QueueParams q = fig1();
    RngStream r(23, 0);
    const int n = 200000;
    std::vector<double> x(n);
    for (double& v : x) v = sample_event_time(20.0, q, r);
    for (double z : {1.0, 2.0, 5.0}) {
        double s = 0.0, s2 = 0.0;
        for (double v : x) {
            const double e = std::exp(-z * v);
            s += e;
            s2 += e * e;
        }
        const double mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        EXPECT_NEAR(mean, laplace::lt_event_density(20.0, z, q), 3.0 * se) << z;
    }
}

TEST(Subordinator, StartsAtZero) {
    RngStream r(1, 0);
    EXPECT_EQ(sample_mixed_subordinator_at(0.0, fig1(), r), 0.0);
}

TEST(Subordinator, LaplaceTransform) {
    const QueueParams q = fig1();
    RngStream r(31, 0);
    const int n = 1000000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = std::exp(-sample_mixed_subordinator_at(0.7, q, r));
        s += e;
        s2 += e * e;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, std::exp(-0.7), 3.0 * se);
}

TEST(Subordinator, SelfSimilarity) {
    // each term scales as x^{1/alpha}: D(2x) / 2^{1/alpha} has the law of D(x)
    for (double a : {0.5, 0.3}) {
        const QueueParams q = single(a);
        RngStream r1(32, 0), r2(33, 0);
        const int n = 1000000;
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = sample_mixed_subordinator_at(0.7, q, r1);
            y[i] = sample_mixed_subordinator_at(1.4, q, r2) / std::pow(2.0, 1.0 / a);
        }
        EXPECT_LE(validate::ks_two_sample(x, y), 0.005) << a;
    }
}

TEST(Subordinator, CompositeIdentityPaired) {
    const QueueParams q = fig1();
    RngStream r1(41, 3), r2(41, 3);
    for (int i = 0; i < 1000; ++i) {
        const double x = r1.exponential(q.lambda);
        const double a = sample_mixed_subordinator_at(x, q, r1);
        const double b = sample_event_time(q.lambda, q, r2);
        EXPECT_NEAR(a, b, 1e-12 * b);
    }
}

TEST(Subordinator, CompositeIdentityIndependent) {
    const QueueParams q = fig1();
    RngStream r1(42, 0), r2(43, 0);
    const int n = 100000;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = sample_mixed_subordinator_at(r1.exponential(q.lambda), q, r1);
        b[i] = sample_event_time(q.lambda, q, r2);
    }
    // 0.1% critical value of the two-sample KS statistic
    EXPECT_LE(validate::ks_two_sample(a, b), 1.95 * std::sqrt(2.0 / n));
}
