#include "merlang/ctmc.hpp"
#include "merlang/errors.hpp"
#include "merlang/laplace.hpp"
#include "merlang/sim.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

using namespace merlang;
using namespace merlang::laplace;

namespace {

QueueParams fig1() { return QueueParams::figure1(); }

QueueParams classical() {
    QueueParams q;
    q.c1 = 1.0;
    q.c2 = 0.0;
    q.alpha1 = 1.0;
    return q;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// (zI - Q^T)^{-1} e_0 for the truncated classical chain
Eigen::VectorXd ctmc_resolvent(const QueueParams& q, double z, int phases) {
    const Eigen::MatrixXd Q = ctmc::classical_generator(q.lambda, q.mu, q.k, phases);
    const Eigen::MatrixXd A = z * Eigen::MatrixXd::Identity(phases, phases) - Q.transpose();
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(phases);
    e0(0) = 1.0;
    return A.partialPivLu().solve(e0);
}

}  // namespace

TEST(Inversion, Exponential) {
    EXPECT_NEAR(invert_lt([](cplx z) { return 1.0L / (z + 1.0L); }, 1.0), std::exp(-1.0), 1e-8);
}

TEST(Inversion, Ramp) {
    EXPECT_NEAR(invert_lt([](cplx z) { return 1.0L / (z * z); }, 2.5), 2.5, 1e-8);
}

TEST(Inversion, Failures) {
    EXPECT_THROW(invert_lt([](cplx) { return cplx(NAN, 0.0L); }, 1.0), OracleError);
    EXPECT_THROW(invert_lt([](cplx z) { return 1.0L / z; }, 0.0), DomainError);
}

// subordinated resolvent reference (see test_analytic.cpp)
TEST(Inversion, P0AtFigureOne) {
    const QueueParams q = fig1();
    EXPECT_LT(rel(invert_lt([&](cplx z) { return lt_p0(z, q); }, 1.0), 0.203304621588379), 1e-7);
    EXPECT_LT(rel(invert_lt([&](cplx z) { return lt_busy(z, q); }, 1.0), 0.502750442767335), 1e-7);
    EXPECT_LT(rel(invert_lt([&](cplx z) { return lt_mean(z, q); }, 1.0), 9.7168479817476), 1e-7);
    EXPECT_LT(rel(invert_lt([&](cplx z) { return lt_pns(1, 1, z, q); }, 0.5), 0.0347827516278198), 1e-7);
}

TEST(Phi, Monotone) {
    const QueueParams q = fig1();
    double prev = 0.0;
    for (double z = 1e-6; z < 1e6; z *= 1.5) {
        const double v = phi(z, q);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Transforms, RealAndComplexAgree) {
    const QueueParams q = fig1();
    for (double z : {0.5, 2.0, 7.0}) {
        EXPECT_EQ(lt_p0(z, q), static_cast<double>(lt_p0(cplx(z, 0.0L), q).real()));
        EXPECT_EQ(lt_service(z, q), static_cast<double>(lt_service(cplx(z, 0.0L), q).real()));
    }
}

TEST(Transforms, ClosedFormReductions) {
    QueueParams q = classical();
    for (double z : {0.3, 1.0, 4.0}) {
        EXPECT_NEAR(lt_event_survival(6.0, z, q), 1.0 / (6.0 + z), 1e-15);
        EXPECT_NEAR(lt_event_density(6.0, z, q), 6.0 / (6.0 + z), 1e-15);
    }
    q.k = 1;
    EXPECT_NEAR(lt_service(2.0, q), q.mu / (q.mu + 2.0), 1e-15);
    EXPECT_NEAR(lt_service(1e-12, fig1()), 1.0, 1e-3);
}

TEST(Transforms, InitialValues) {
    const QueueParams q = fig1();
    const double z = 1e12;
    EXPECT_NEAR(z * lt_p0(z, q), 1.0, 1e-3);
    EXPECT_NEAR(z * lt_pns(1, 1, z, q), 0.0, 1e-3);
    EXPECT_NEAR(z * lt_mean(z, q), 0.0, 1e-3);
    EXPECT_NEAR(z * lt_busy(z, q), 0.0, 1e-3);
    EXPECT_NEAR(z * lt_event_survival(6.0, z, q), 1.0, 1e-3);
}

TEST(Transforms, GoverningSystem) {
    const QueueParams q = fig1();
    for (double z : {1.0, 2.0, 5.0}) {
        const double p0 = lt_p0(z, q), p11 = lt_pns(1, 1, z, q);
        const double ph = phi(z, q);
        const double lhs = ph * p0 - ph / z;
        const double rhs = -q.lambda * p0 + q.k * q.mu * p11;
        EXPECT_LT(std::fabs(lhs - rhs) / std::fabs(rhs), 1e-6) << z;
    }
}

TEST(Transforms, NormalizationFromBelow) {
    const QueueParams q = fig1();
    const double z = 2.0;
    double sum = lt_p0(z, q);
    for (int n = 1; n <= 6; ++n)
        for (int s = 1; s <= q.k; ++s) sum += lt_pns(n, s, z, q);
    EXPECT_LE(z * sum, 1.0 + 1e-3);
    EXPECT_GT(z * sum, 0.9);
}

TEST(Transforms, ClassicalAgainstCtmc) {
    const QueueParams q = classical();
    const int phases = 400;
    const Eigen::VectorXd r1 = ctmc_resolvent(q, 1.0, phases);
    EXPECT_NEAR(lt_p0(1.0, q), r1(0), 1e-4);
    for (double z : {1.0, 2.0}) {
        const Eigen::VectorXd r = ctmc_resolvent(q, z, phases);
        double mean = 0.0;
        for (int i = 0; i < phases; ++i) mean += i * r(i);
        EXPECT_NEAR(lt_mean(z, q), mean, 1e-3) << z;
        EXPECT_NEAR(lt_pns(1, 2, z, q), r(2), 1e-4) << z;
    }
}

TEST(Transforms, ClassicalBusyAgainstSimulation) {
    const QueueParams q = classical();
    const sim::BusySample b = sim::simulate_busy_periods(q, 60.0, 7, 100000);
    // int e^{-zt} F(t) dt = E[e^{-zB}] / z at z = 1
    double acc = 0.0;
    for (double x : b.completed) acc += std::exp(-x);
    EXPECT_NEAR(lt_busy(1.0, q), acc / b.started, 1e-2);
}

TEST(Waiting, ClassicalMemoryless) {
    const QueueParams q = classical();
    const double r = q.k * q.mu / (q.k * q.mu + 3.0);
    EXPECT_NEAR(lt_waiting_quadrature(3.0, q, 1.0, 0.4, 2), r * r, 1e-8);
    EXPECT_NEAR(lt_waiting_quadrature(3.0, q, 1.0, 0.4, 1), r, 1e-8);
}

TEST(Waiting, FreshPhase) {
    const QueueParams q = fig1();
    for (double z : {1.0, 5.0}) {
        const double expect = 1.0 - z * lt_event_survival(q.k * q.mu, z, q);
        EXPECT_NEAR(lt_waiting_quadrature(z, q, 1.0, 1.0 - 1e-10, 1), expect, 1e-4) << z;
    }
}

// heavy tails: the transform approaches 1 like z^alpha2
TEST(Waiting, SmallTransformVariable) {
    EXPECT_NEAR(lt_waiting_quadrature(1e-12, fig1(), 1.0, 0.5, 3), 1.0, 1e-3);
}

TEST(Waiting, SeriesAgreesWithQuadrature) {
    const QueueParams q = fig1();
    // terms scale like (b max(z, z tau / tau)^-alpha1)^m, b = k mu / c1 = 50
    const double z = 1e5, t = 1.0, t0 = 1.0 - 1e-4;
    EXPECT_LT(rel(lt_waiting(z, q, t, t0, 2), lt_waiting_quadrature(z, q, t, t0, 2)), 1e-6);
}

TEST(Waiting, SeriesOutsideConvergence) {
    EXPECT_THROW(lt_waiting(0.5, fig1(), 3.0, 0.0, 1), TruncationError);
    EXPECT_THROW(lt_waiting(1.0, fig1(), 1.0, 1.0, 1), ParameterError);
}
