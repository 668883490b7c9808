#pragma once

#include "merlang/coeffs.hpp"
#include "merlang/rng.hpp"

namespace merlang::sampling {

/// Unit one-sided stable variate with Laplace transform exp(-z^alpha),
/// Kanter's representation. alpha = 1 returns 1.
double sample_stable_unit(double alpha, RngStream& rng);

/// Event time with rate theta: D_{a1,a2}(X), X ~ Exp(theta), drawn as
/// c1^{1/a1} X^{1/a1} D1 + c2^{1/a2} X^{1/a2} D2 with fresh stable variates.
double sample_event_time(double theta, const QueueParams& q, RngStream& rng);

/// Mixed stable subordinator at a deterministic time x >= 0.
double sample_mixed_subordinator_at(double x, const QueueParams& q, RngStream& rng);

}  // namespace merlang::sampling
