#include "merlang/errors.hpp"
#include "merlang/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace merlang;
using specfun::MLParams;
using specfun::mittag_leffler3;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST(MittagLeffler, ExponentialAtOne) {
    EXPECT_NEAR(mittag_leffler3({1.0, 1.0, 1.0}, 1.0), std::exp(1.0), 1e-14);
}

TEST(MittagLeffler, ZeroArgument) {
    EXPECT_DOUBLE_EQ(mittag_leffler3({0.5, 1.0, 1.0}, 0.0), 1.0);
    EXPECT_NEAR(mittag_leffler3({0.7, 2.5, 3.0}, 0.0), 1.0 / std::tgamma(2.5), 1e-15);
}

// mpmath, 50 digits, 400-term series
TEST(MittagLeffler, HalfOrderAtMinusOne) {
    EXPECT_LT(rel(mittag_leffler3({0.5, 1.0, 1.0}, -1.0), 0.42758357615580700441), 1e-12);
    EXPECT_LT(rel(mittag_leffler3({0.5, 1.0, 1.0}, -1.0), std::exp(1.0) * std::erfc(1.0)), 1e-12);
}

// mpmath, 1500-term series; equals e^25 erfc(5)
TEST(MittagLeffler, HalfOrderAtMinusFive) {
    EXPECT_LT(rel(mittag_leffler3({0.5, 1.0, 1.0}, -5.0), 0.11070463773306862637), 1e-11);
}

// mpmath, 600-term series
TEST(MittagLeffler, PrabhakarValues) {
    EXPECT_LT(rel(mittag_leffler3({0.7, 1.3, 2.5}, -3.0), -0.0078859996746059834365), 1e-10);
    EXPECT_LT(rel(mittag_leffler3({0.9, 0.6, 1.7}, 2.0), 35.366621481541621671), 1e-12);
}

TEST(MittagLeffler, ExpIdentityRange) {
    for (double x = -10.0; x <= 5.0; x += 0.25)
        EXPECT_LT(rel(mittag_leffler3({1.0, 1.0, 1.0}, x), std::exp(x)), 1e-10) << x;
}

TEST(MittagLeffler, CoshIdentityRange) {
    for (double x = 0.0; x <= 50.0; x += 0.5)
        EXPECT_LT(rel(mittag_leffler3({2.0, 1.0, 1.0}, x), std::cosh(std::sqrt(x))), 1e-10) << x;
}

TEST(MittagLeffler, NondecreasingForPositiveArguments) {
    const MLParams p{0.6, 1.2, 1.5};
    double prev = mittag_leffler3(p, 0.0);
    for (double x = 0.1; x <= 10.0; x += 0.1) {
        const double v = mittag_leffler3(p, x);
        EXPECT_GE(v, prev) << x;
        prev = v;
    }
}

TEST(MittagLeffler, LargeNegativeArgument) {
    // e^{x^2} erfc(x) at x = 8
    const specfun::MLResult r = specfun::mittag_leffler3_eval({0.5, 1.0, 1.0}, -8.0);
    EXPECT_LT(rel(r.value, std::exp(64.0) * std::erfc(8.0)), 1e-10);
    EXPECT_GE(r.error, 0.0);
}

TEST(MittagLeffler, InvalidParameters) {
    EXPECT_THROW(mittag_leffler3({0.0, 1.0, 1.0}, 1.0), ParameterError);
    EXPECT_THROW(mittag_leffler3({0.5, -1.0, 1.0}, 1.0), ParameterError);
    EXPECT_THROW(mittag_leffler3({0.5, 1.0, 0.0}, 1.0), ParameterError);
    EXPECT_THROW(mittag_leffler3({0.5, 1.0, 1.0}, std::nan("")), ParameterError);
}

TEST(IncompleteGamma, Values) {
    EXPECT_LT(rel(specfun::upper_incomplete_gamma(1.0, 2.0), std::exp(-2.0)), 1e-13);
    EXPECT_LT(rel(specfun::upper_incomplete_gamma(3.7, 0.0), std::tgamma(3.7)), 1e-13);
    EXPECT_LT(rel(specfun::upper_incomplete_gamma(2.0, 1.0), 2.0 * std::exp(-1.0)), 1e-13);
    // mpmath gammainc
    EXPECT_LT(rel(specfun::upper_incomplete_gamma(2.5, 3.0), 0.40706917587130299843), 1e-12);
    EXPECT_LT(rel(specfun::upper_incomplete_gamma(0.3, 0.1), 1.3584330368686120883), 1e-12);
}

TEST(IncompleteGamma, DecreasingAndBounded) {
    for (double s : {0.4, 1.0, 2.5, 7.0}) {
        double prev = specfun::upper_incomplete_gamma(s, 0.0);
        EXPECT_LE(prev, std::tgamma(s) * (1 + 1e-14));
        for (double x = 0.05; x <= 20.0; x += 0.05) {
            const double v = specfun::upper_incomplete_gamma(s, x);
            EXPECT_LT(v, prev) << s << " " << x;
            prev = v;
        }
    }
}

TEST(IncompleteGamma, ScaledLogForLargeArguments) {
    // e^x Gamma(1, x) = 1
    EXPECT_NEAR(specfun::log_scaled_upper_gamma(1.0, 1e4), 0.0, 1e-12);
    // e^x Gamma(2, x) = x + 1
    EXPECT_NEAR(specfun::log_scaled_upper_gamma(2.0, 800.0), std::log(801.0), 1e-12);
}

TEST(Gamma, Reciprocal) {
    EXPECT_EQ(specfun::rgamma(0.0), 0.0);
    EXPECT_EQ(specfun::rgamma(-3.0), 0.0);
    EXPECT_NEAR(specfun::rgamma(0.5), 1.0 / std::sqrt(M_PI), 1e-15);
    EXPECT_NEAR(specfun::rgamma(-0.5), -0.5 / std::sqrt(M_PI), 1e-15);
    int sign = 0;
    EXPECT_NEAR(specfun::log_abs_rgamma(171.5, sign), -std::lgamma(171.5), 1e-10);
    EXPECT_EQ(sign, 1);
}
