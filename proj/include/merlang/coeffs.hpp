#pragma once

#include <cstdint>
#include <vector>

namespace merlang {

/// Model configuration of the mixed time-changed Erlang queue.
struct QueueParams {
    double lambda = 6.0;
    double mu = 5.0;
    int k = 4;
    double c1 = 0.4;
    double c2 = 0.6;
    double alpha1 = 0.5;
    double alpha2 = 0.3;

    void validate() const;
    /// Copy with (c1, alpha1) and (c2, alpha2) exchanged when c1 = 0.
    QueueParams effective() const;
    double theta() const { return lambda + k * mu; }
    bool classical() const { return c1 == 1.0 && alpha1 == 1.0; }

    static QueueParams figure1() { return {}; }
};

}  // namespace merlang

namespace merlang::coeffs {

struct A0Coeff {
    std::int64_t a0 = 0;
    double A0 = 0.0;
    double logA0 = 0.0;
};

struct SeriesConstants {
    std::int64_t a0 = 0;
    double A0 = 0.0;
    double B = 0.0;
    std::int64_t delta = 0;
    double C = 0.0;
    std::int64_t nu = 0;
    double D = 0.0;
    std::int64_t pi_ = 0;
    double logA0 = 0.0, logB = 0.0, logC = 0.0, logD = 0.0;
};

double log_A0(std::int64_t m, std::int64_t r, const QueueParams& q);
A0Coeff coeff_a0_A0(std::int64_t m, std::int64_t r, const QueueParams& q);

std::int64_t delta_index(std::int64_t n, std::int64_t s, std::int64_t i, int k);
double log_B(std::int64_t n, std::int64_t s, std::int64_t i, const QueueParams& q);
SeriesConstants coeff_block(std::int64_t n, std::int64_t s, std::int64_t i, std::int64_t m,
                            std::int64_t r, const QueueParams& q);

/// Index caps for the truncated double and triple sums.
struct IndexCaps {
    int max_m = 40;
    int max_r = 40;
    int max_i = 40;
};

/// Weights grouped by the total exponent N of (theta + phi(z))^{-N}, scaled
/// by theta^{-N}: w[N] = sum over index tuples with exponent N of
/// coefficient / theta^N. Index 0 is unused. Entries beyond n_max are dropped.
/// With caps == nullptr all tuples with exponent <= n_max are included.
std::vector<double> p0_weights(const QueueParams& q, int n_max, const IndexCaps* caps = nullptr);
std::vector<double> pns_weights(int n, int s, const QueueParams& q, int n_max,
                                const IndexCaps* caps = nullptr);
std::vector<double> busy_weights(const QueueParams& q, int n_max, const IndexCaps* caps = nullptr);

/// Largest exponent N reached by the capped sums, including the first
/// discarded shell.
int p0_horizon(const IndexCaps& caps, int k);
int pns_horizon(int n, int s, const IndexCaps& caps, int k);
int busy_horizon(const IndexCaps& caps, int k);

/// Magnitude of the first discarded shell of each truncated sum, grouped by
/// exponent like the weights above.
std::vector<double> p0_shell(const QueueParams& q, int n_max, const IndexCaps& caps);
std::vector<double> pns_shell(int n, int s, const QueueParams& q, int n_max, const IndexCaps& caps);
std::vector<double> busy_shell(const QueueParams& q, int n_max, const IndexCaps& caps);

struct KernelValue {
    double value = 0.0;
    double error = 0.0;
    int terms = 0;
};

/// t^{b0-1+L} sum_h (-c2/c1)^h t^{(a1-a2)h} E^{h+1}_{a1, b0+(a1-a2)h+L}(-(theta/c1) t^{a1}).
/// Level L is the order of the termwise antiderivative.
KernelValue ml_kernel(double beta0, double theta, int level, double t, const QueueParams& q);

double kernel_f(int N, double t, const QueueParams& q);
double kernel_g(int N, double t, const QueueParams& q);
double kernel_h(int N, double t, const QueueParams& q);

/// Survival of the event time with rate theta, and its antiderivatives.
KernelValue event_survival(double theta, int level, double t, const QueueParams& q);
/// Density of the event time with rate theta.
KernelValue event_density(double theta, double t, const QueueParams& q);

/// Event-time functions from the spectral form S(t) = int_0^inf e^{-rt} rho(r) dr,
/// rho(r) = theta Im phi(r e^{i pi}) / (pi r |phi(r e^{i pi}) + theta|^2) >= 0,
/// integrated with a nested double-exponential rule. Exact exponentials when
/// alpha1 = 1 and c2 = 0.
struct EventKernels {
    double survival = 1.0;
    double density = 0.0;
    double cdf = 0.0;           // 1 - survival
    double cdf_integral = 0.0;  // int_0^t cdf
    double error = 0.0;         // largest absolute quadrature error estimate
    int nodes = 0;
};

EventKernels event_time_kernels(double theta, double t, const QueueParams& q);

}  // namespace merlang::coeffs
