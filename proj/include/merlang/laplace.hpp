#pragma once

#include "merlang/analytic.hpp"
#include "merlang/coeffs.hpp"

#include <complex>
#include <functional>

namespace merlang::laplace {

using cplx = std::complex<long double>;

/// c1 z^a1 + c2 z^a2 with principal-branch powers.
cplx phi(cplx z, const QueueParams& q);
double phi(double z, const QueueParams& q);

// Each transform has one complex evaluator; the real overloads call it with a
// zero imaginary part. With pol == nullptr the index sums run until the term
// ratio falls below 1e-17 for a full window of orders; with a policy the same
// index caps as the time-domain curves apply.

cplx lt_p0(cplx z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
cplx lt_pns(int n, int s, cplx z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
cplx lt_mean(cplx z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
cplx lt_busy(cplx z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
cplx lt_event_survival(double theta, cplx z, const QueueParams& q);
cplx lt_event_density(double theta, cplx z, const QueueParams& q);
cplx lt_service(cplx z, const QueueParams& q);

double lt_p0(double z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
double lt_pns(int n, int s, double z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
double lt_mean(double z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
double lt_busy(double z, const QueueParams& q, const analytic::TruncationPolicy* pol = nullptr);
double lt_event_survival(double theta, double z, const QueueParams& q);
double lt_event_density(double theta, double z, const QueueParams& q);
double lt_service(double z, const QueueParams& q);

/// Transform of the conditional waiting-time density given n phases ahead
/// and a last phase completion at t0 < t, from the double series with
/// upper incomplete gamma factors. The series converges only for large z;
/// throws TruncationError otherwise.
double lt_waiting(double z, const QueueParams& q, double t, double t0, int n);

/// Same quantity from quadrature of the shifted inter-phase survival.
double lt_waiting_quadrature(double z, const QueueParams& q, double t, double t0, int n);

using Transform = std::function<cplx(cplx)>;

constexpr int kTalbotNodes = 32;

/// Fixed-Talbot inversion with M nodes, long double accumulation.
/// Throws OracleError if a node evaluation is not finite.
double invert_lt(const Transform& F, double t, int M = kTalbotNodes);

}  // namespace merlang::laplace
