#include "merlang/sampling.hpp"

#include "merlang/errors.hpp"

#include <cmath>
#include <numbers>

namespace merlang::sampling {

namespace {

// log of a unit stable variate; consumes one uniform and one exponential
double log_stable_unit(double alpha, RngStream& rng) {
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential(1.0);
    if (alpha == 1.0) return 0.0;
    const double la = alpha / (1.0 - alpha) * std::log(std::sin(alpha * u)) + std::log(std::sin((1.0 - alpha) * u)) -
                      std::log(std::sin(u)) / (1.0 - alpha);
    return (1.0 - alpha) / alpha * (la - std::log(e));
}

}  // namespace

double sample_stable_unit(double alpha, RngStream& rng) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("stable index must lie in (0, 1]");
    return std::exp(log_stable_unit(alpha, rng));
}

double sample_mixed_subordinator_at(double x, const QueueParams& q, RngStream& rng) {
    if (!(x >= 0.0)) throw ParameterError("subordinator time must be nonnegative");
    // both stable variates are always drawn so the stream advances identically;
    // products are formed in log space since (c x)^{1/alpha} and D underflow or
    // overflow separately for small alpha
    const double l1 = log_stable_unit(q.alpha1, rng);
    // alpha2 is unused and may be unset when c2 = 0
    const double l2 = log_stable_unit(q.c2 > 0.0 ? q.alpha2 : 1.0, rng);
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    double y = 0.0;
    if (q.c1 > 0.0) y += std::exp((std::log(q.c1) + lx) / q.alpha1 + l1);
    if (q.c2 > 0.0) y += std::exp((std::log(q.c2) + lx) / q.alpha2 + l2);
    return y;
}

double sample_event_time(double theta, const QueueParams& q, RngStream& rng) {
    if (!(theta > 0.0)) throw ParameterError("event rate must be positive");
    const double x = rng.exponential(theta);
    return sample_mixed_subordinator_at(x, q, rng);
}

}  // namespace merlang::sampling
