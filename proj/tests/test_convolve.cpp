#include "merlang/coeffs.hpp"
#include "merlang/convolve.hpp"
#include "merlang/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace merlang;
using conv::GridFunction;

namespace {

GridFunction exponential(double t_max, int n) {
    GridFunction g;
    g.h = t_max / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double t = i * g.h;
        g.v0.push_back(std::exp(-t));
        g.v1.push_back(-std::expm1(-t));
        g.v2.push_back(t + std::expm1(-t));
    }
    return g;
}

// kernel_f of order N on the grid, with its first two antiderivatives
GridFunction kernel_f_grid(int N, double t_max, int n, const QueueParams& q) {
    const double beta0 = q.alpha1 + (1.0 - q.alpha1) / N;
    GridFunction g;
    g.h = t_max / (n - 1);
    g.exponent = beta0 - 1.0;
    g.v0.assign(n, 0.0);
    g.v1.assign(n, 0.0);
    g.v2.assign(n, 0.0);
    for (int i = 1; i < n; ++i) {
        const double t = i * g.h;
        g.v0[i] = coeffs::ml_kernel(beta0, q.theta(), 0, t, q).value;
        g.v1[i] = coeffs::ml_kernel(beta0, q.theta(), 1, t, q).value;
        g.v2[i] = coeffs::ml_kernel(beta0, q.theta(), 2, t, q).value;
    }
    g.regularize_origin();
    return g;
}

}  // namespace

TEST(Convolve, SingleFoldIsIdentity) {
    const GridFunction g = exponential(4.0, 401);
    const GridFunction r = conv::nfold_convolve(g, 1, 16);
    EXPECT_EQ(r.v0, g.v0);
    EXPECT_EQ(r.v1, g.v1);
}

TEST(Convolve, ExponentialSelfConvolution) {
    const GridFunction g = exponential(4.0, 4001);
    const GridFunction r = conv::nfold_convolve(g, 2, 16);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double t = i * g.h;
        worst = std::max(worst, std::fabs(r.v0[i] - t * std::exp(-t)));
    }
    EXPECT_LE(worst, 1e-4);
}

TEST(Convolve, ErlangChain) {
    // e^{-t} convolved 5 times is the Erlang(5, 1) density
    const GridFunction g = exponential(6.0, 601);
    const GridFunction r = conv::nfold_convolve(g, 5, 16);
    for (std::size_t i = 100; i < r.size(); i += 100) {
        const double t = i * g.h;
        EXPECT_NEAR(r.v0[i], std::pow(t, 4) * std::exp(-t) / 24.0, 1e-5) << t;
    }
}

TEST(Convolve, ParallelMatchesSerialBitwise) {
    const GridFunction g = exponential(3.0, 1001);
    const GridFunction a = conv::convolve(g, g);
    const GridFunction b = conv::convolve_serial(g, g);
    EXPECT_EQ(a.v0, b.v0);
    EXPECT_EQ(a.v1, b.v1);
    EXPECT_EQ(a.v2, b.v2);
    EXPECT_EQ(a.exponent, b.exponent);
}

TEST(Convolve, PolicyCap) {
    const GridFunction g = exponential(1.0, 11);
    EXPECT_THROW(conv::nfold_convolve(g, 17, 16), PolicyError);
    EXPECT_THROW(conv::nfold_convolve(g, 0, 16), ParameterError);
}

TEST(Convolve, GridMismatch) {
    EXPECT_THROW(conv::convolve(exponential(1.0, 11), exponential(1.0, 21)), ParameterError);
}

TEST(Convolve, SmoothAntiderivatives) {
    const GridFunction e = exponential(2.0, 201);
    const GridFunction s = conv::from_smooth(e.v0, e.h);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(s.v1[i], e.v1[i], 1e-5);
        EXPECT_NEAR(s.v2[i], e.v2[i], 1e-5);
    }
}

// fixed Talbot inversion of the squared single-factor transform, M = 24, 32 and 40 agree to 2e-13
TEST(Convolve, SingularKernelAgainstInversion) {
    const QueueParams q = QueueParams::figure1();
    const GridFunction g = kernel_f_grid(2, 2.0, 2001, q);
    const GridFunction r = conv::nfold_convolve(g, 2, 16);
    const double oracle[3] = {0.000184245694208964, 0.000130969324725462, 9.29809762870509e-05};
    const int idx[3] = {500, 1000, 2000};
    for (int j = 0; j < 3; ++j)
        EXPECT_LT(std::fabs(r.v0[idx[j]] - oracle[j]) / oracle[j], 1e-3) << idx[j];
}
