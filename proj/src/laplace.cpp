#include "merlang/laplace.hpp"

#include "merlang/errors.hpp"
#include "merlang/specfun.hpp"
#include "mp.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

namespace merlang::laplace {

namespace {

// Talbot inversion amplifies transform errors by about e^{2M/5}, so the
// series are summed to near working precision.
constexpr double kTermRatio = 1e-17;
constexpr int kFirstHorizon = 1024;
constexpr int kMaxHorizon = 65536;

enum class Family { P0, Pns, Busy };

using Key = std::tuple<double, double, double, double, double, double, int, int, int, int, int, int, int, int>;

struct Weights {
    std::vector<long double> w;
    bool capped = false;
};

std::mutex cache_mutex;
std::map<Key, std::shared_ptr<const Weights>> cache;

std::shared_ptr<const Weights> weights(Family f, int n, int s, const QueueParams& q,
                                       const analytic::TruncationPolicy* pol, int horizon) {
    const coeffs::IndexCaps caps = pol ? pol->caps() : coeffs::IndexCaps{};
    const Key key{q.lambda, q.mu,  q.c1,  q.c2, q.alpha1, q.alpha2, q.k, static_cast<int>(f),
                  n,        s,     pol ? caps.max_m : -1, pol ? caps.max_r : -1,
                  pol ? caps.max_i : -1, pol ? 0 : horizon};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<double> w;
    if (pol) {
        switch (f) {
            case Family::P0: w = coeffs::p0_weights(q, coeffs::p0_horizon(caps, q.k), &caps); break;
            case Family::Pns: w = coeffs::pns_weights(n, s, q, coeffs::pns_horizon(n, s, caps, q.k), &caps); break;
            case Family::Busy: w = coeffs::busy_weights(q, coeffs::busy_horizon(caps, q.k), &caps); break;
        }
    } else {
        switch (f) {
            case Family::P0: w = coeffs::p0_weights(q, horizon); break;
            case Family::Pns: w = coeffs::pns_weights(n, s, q, horizon); break;
            case Family::Busy: w = coeffs::busy_weights(q, horizon); break;
        }
    }
    auto out = std::make_shared<Weights>();
    out->w.assign(w.begin(), w.end());
    out->capped = pol != nullptr;
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, out);
    return out;
}

// sum_N w_N rho^N with rho = theta / (theta + phi(z))
cplx weighted_series(Family f, int n, int s, cplx z, const QueueParams& q,
                     const analytic::TruncationPolicy* pol) {
    const long double th = q.theta();
    const cplx rho = th / (th + phi(z, q));
    const int window = 2 * (q.k + 1);
    for (int horizon = kFirstHorizon;; horizon *= 2) {
        const std::shared_ptr<const Weights> w = weights(f, n, s, q, pol, horizon);
        cplx sum = 0.0L, p = 1.0L;
        int small = 0;
        bool done = w->capped;
        for (std::size_t N = 1; N < w->w.size(); ++N) {
            p *= rho;
            const cplx term = w->w[N] * p;
            sum += term;
            if (w->capped) continue;
            if (std::abs(term) < kTermRatio * std::abs(sum)) {
                if (++small >= window) {
                    done = true;
                    break;
                }
            } else {
                small = 0;
            }
        }
        if (!std::isfinite(std::abs(sum))) throw TruncationError("transform series overflowed", INFINITY);
        if (done) return sum;
        if (horizon >= kMaxHorizon) {
            throw TruncationError("transform series did not converge",
                                  static_cast<double>(std::abs(w->w.back() * p)));
        }
    }
}

void check_z(cplx z) {
    if (!(std::isfinite(z.real()) && std::isfinite(z.imag())) || (z.imag() == 0.0L && !(z.real() > 0.0L))) {
        throw DomainError("transform variable must have positive real part on the real axis");
    }
}

}  // namespace

cplx phi(cplx z, const QueueParams& qin) {
    const QueueParams q = qin.effective();
    cplx v = static_cast<long double>(q.c1) * std::pow(z, static_cast<long double>(q.alpha1));
    if (q.c2 != 0.0) v += static_cast<long double>(q.c2) * std::pow(z, static_cast<long double>(q.alpha2));
    return v;
}

double phi(double z, const QueueParams& q) { return static_cast<double>(phi(cplx(z, 0.0L), q).real()); }

cplx lt_p0(cplx z, const QueueParams& qin, const analytic::TruncationPolicy* pol) {
    check_z(z);
    const QueueParams q = qin.effective();
    return phi(z, q) / z * weighted_series(Family::P0, 0, 0, z, q, pol);
}

cplx lt_pns(int n, int s, cplx z, const QueueParams& qin, const analytic::TruncationPolicy* pol) {
    check_z(z);
    const QueueParams q = qin.effective();
    if (n < 1 || s < 1 || s > q.k) throw ParameterError("lt_pns: (n, s) outside the state space");
    return phi(z, q) / z * weighted_series(Family::Pns, n, s, z, q, pol);
}

cplx lt_mean(cplx z, const QueueParams& qin, const analytic::TruncationPolicy* pol) {
    check_z(z);
    const QueueParams q = qin.effective();
    const long double lead = q.k * (q.lambda - q.mu);
    const long double kmu = q.k * q.mu;
    return lead / (z * phi(z, q)) + kmu / z * weighted_series(Family::P0, 0, 0, z, q, pol);
}

cplx lt_busy(cplx z, const QueueParams& qin, const analytic::TruncationPolicy* pol) {
    check_z(z);
    const QueueParams q = qin.effective();
    return weighted_series(Family::Busy, 0, 0, z, q, pol) / z;
}

cplx lt_event_survival(double theta, cplx z, const QueueParams& q) {
    check_z(z);
    if (!(theta > 0.0)) throw ParameterError("event rate must be positive");
    const cplx f = phi(z, q);
    return f / (z * (static_cast<long double>(theta) + f));
}

cplx lt_event_density(double theta, cplx z, const QueueParams& q) {
    check_z(z);
    if (!(theta > 0.0)) throw ParameterError("event rate must be positive");
    const long double th = theta;
    return th / (th + phi(z, q));
}

cplx lt_service(cplx z, const QueueParams& qin) {
    const QueueParams q = qin.effective();
    return std::pow(lt_event_density(q.k * q.mu, z, q), q.k);
}

double lt_p0(double z, const QueueParams& q, const analytic::TruncationPolicy* pol) {
    return static_cast<double>(lt_p0(cplx(z, 0.0L), q, pol).real());
}

double lt_pns(int n, int s, double z, const QueueParams& q, const analytic::TruncationPolicy* pol) {
    return static_cast<double>(lt_pns(n, s, cplx(z, 0.0L), q, pol).real());
}

double lt_mean(double z, const QueueParams& q, const analytic::TruncationPolicy* pol) {
    return static_cast<double>(lt_mean(cplx(z, 0.0L), q, pol).real());
}

double lt_busy(double z, const QueueParams& q, const analytic::TruncationPolicy* pol) {
    return static_cast<double>(lt_busy(cplx(z, 0.0L), q, pol).real());
}

double lt_event_survival(double theta, double z, const QueueParams& q) {
    return static_cast<double>(lt_event_survival(theta, cplx(z, 0.0L), q).real());
}

double lt_event_density(double theta, double z, const QueueParams& q) {
    return static_cast<double>(lt_event_density(theta, cplx(z, 0.0L), q).real());
}

double lt_service(double z, const QueueParams& q) {
    return static_cast<double>(lt_service(cplx(z, 0.0L), q).real());
}

namespace {

void check_waiting_args(double z, double t, double t0, int n) {
    if (!(z > 0.0)) throw DomainError("lt_waiting: z must be positive");
    if (!(t0 < t) || !(t0 >= 0.0)) throw ParameterError("lt_waiting: need 0 <= t0 < t");
    if (n < 1) throw ParameterError("lt_waiting: n must be positive");
}

double inter_phase_survival(const QueueParams& q, double tau) {
    const double psi = coeffs::event_survival(q.k * q.mu, 0, tau, q).value;
    if (!(psi > 0.0)) throw DomainError("lt_waiting: inter-phase survival underflows");
    return psi;
}

}  // namespace

double lt_waiting(double z, const QueueParams& qin, double t, double t0, int n) {
    check_waiting_args(z, t, t0, n);
    const QueueParams q = qin.effective();
    const double tau = t - t0;
    const double x = z * tau;
    const double psi = inter_phase_survival(q, tau);
    const double a = q.c2 / q.c1;
    const double b = q.k * q.mu / q.c1;
    const double da = q.alpha1 - q.alpha2;
    const int shifts = a > 0.0 ? 2 : 1;

    // First pass in double: log-magnitudes of the terms
    // (m+r)!/(r! m!) a^{r+j} b^m e^x Q(s, x) z^{1-s} / psi, s = da (r+j) + a1 m + 1,
    // to find where the diagonals d = m + r become negligible and how much
    // cancellation the signed sum suffers.
    auto log_term = [&](int m, int r, int j) {
        const double sh = da * (r + j) + q.alpha1 * m + 1.0;
        double l = std::lgamma(m + r + 1.0) - std::lgamma(r + 1.0) - std::lgamma(m + 1.0) +
                   m * std::log(b) + (1.0 - sh) * std::log(z) - std::lgamma(sh) - std::log(psi) +
                   specfun::log_scaled_upper_gamma(sh, x);
        if (r + j > 0) l += (r + j) * std::log(a);
        return l;
    };
    constexpr int kMaxDiag = 2000;
    const double log_floor = std::log(1e-20);
    double peak = -INFINITY;
    int last = -1, small = 0;
    for (int d = 0; d <= kMaxDiag; ++d) {
        double dmax = -INFINITY;
        for (int m = 0; m <= d; ++m) {
            const int r = d - m;
            if (r > 0 && a == 0.0) continue;
            for (int j = 0; j < shifts; ++j) dmax = std::max(dmax, log_term(m, r, j));
        }
        peak = std::max(peak, dmax);
        if (dmax < log_floor && dmax < peak) {
            if (++small >= 3) {
                last = d;
                break;
            }
        } else {
            small = 0;
        }
    }
    if (last < 0) throw TruncationError("lt_waiting: series did not converge", std::exp(peak));

    // Second pass in multiprecision, enough bits to absorb the cancellation.
    const long bits = 96 + static_cast<long>(std::max(0.0, peak) / std::log(2.0));
    if (bits > 16384) throw TruncationError("lt_waiting: cancellation beyond precision cap", std::exp(peak));
    using detail::Mp;
    Mp sum(bits), term(bits), tmp(bits), sv(bits), xv(bits), lz(bits), la(bits), lb(bits), lpsi(bits);
    mpfr_set_d(xv.get(), x, MPFR_RNDN);
    mpfr_set_d(lz.get(), z, MPFR_RNDN);
    mpfr_log(lz.get(), lz.get(), MPFR_RNDN);
    mpfr_set_d(lb.get(), b, MPFR_RNDN);
    mpfr_log(lb.get(), lb.get(), MPFR_RNDN);
    mpfr_set_d(lpsi.get(), psi, MPFR_RNDN);
    mpfr_log(lpsi.get(), lpsi.get(), MPFR_RNDN);
    if (a > 0.0) {
        mpfr_set_d(la.get(), a, MPFR_RNDN);
        mpfr_log(la.get(), la.get(), MPFR_RNDN);
    }
    mpfr_set_zero(sum.get(), 1);
    for (int d = 0; d <= last; ++d) {
        for (int m = 0; m <= d; ++m) {
            const int r = d - m;
            if (r > 0 && a == 0.0) continue;
            for (int j = 0; j < shifts; ++j) {
                // s = da (r + j) + a1 m + 1
                mpfr_set_d(sv.get(), da, MPFR_RNDN);
                mpfr_mul_ui(sv.get(), sv.get(), r + j, MPFR_RNDN);
                mpfr_set_d(tmp.get(), q.alpha1, MPFR_RNDN);
                mpfr_mul_ui(tmp.get(), tmp.get(), m, MPFR_RNDN);
                mpfr_add(sv.get(), sv.get(), tmp.get(), MPFR_RNDN);
                mpfr_add_ui(sv.get(), sv.get(), 1, MPFR_RNDN);
                // log Gamma(s, x) + x - log Gamma(s) + (1 - s) log z
                mpfr_gamma_inc(term.get(), sv.get(), xv.get(), MPFR_RNDN);
                mpfr_log(term.get(), term.get(), MPFR_RNDN);
                mpfr_add(term.get(), term.get(), xv.get(), MPFR_RNDN);
                mpfr_lngamma(tmp.get(), sv.get(), MPFR_RNDN);
                mpfr_sub(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                mpfr_ui_sub(tmp.get(), 1, sv.get(), MPFR_RNDN);
                mpfr_mul(tmp.get(), tmp.get(), lz.get(), MPFR_RNDN);
                mpfr_add(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                // binomial, rate powers and 1/psi
                mpfr_set_ui(tmp.get(), m + r + 1, MPFR_RNDN);
                mpfr_lngamma(tmp.get(), tmp.get(), MPFR_RNDN);
                mpfr_add(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                mpfr_set_ui(tmp.get(), r + 1, MPFR_RNDN);
                mpfr_lngamma(tmp.get(), tmp.get(), MPFR_RNDN);
                mpfr_sub(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                mpfr_set_ui(tmp.get(), m + 1, MPFR_RNDN);
                mpfr_lngamma(tmp.get(), tmp.get(), MPFR_RNDN);
                mpfr_sub(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                mpfr_mul_ui(tmp.get(), lb.get(), m, MPFR_RNDN);
                mpfr_add(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                if (r + j > 0) {
                    mpfr_mul_ui(tmp.get(), la.get(), r + j, MPFR_RNDN);
                    mpfr_add(term.get(), term.get(), tmp.get(), MPFR_RNDN);
                }
                mpfr_sub(term.get(), term.get(), lpsi.get(), MPFR_RNDN);
                mpfr_exp(term.get(), term.get(), MPFR_RNDN);
                // (-a)^r (-b)^m in the first sum and -(-a)^{r+1} (-b)^m in the
                // second carry the same sign
                const bool negative = ((r + m) & 1) != 0;
                if (negative) {
                    mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
                } else {
                    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
                }
            }
        }
    }
    const double bracket = mpfr_get_d(sum.get(), MPFR_RNDN);
    const double lead = std::pow(lt_event_density(q.k * q.mu, z, q), n - 1);
    return lead * (1.0 - bracket);
}

double lt_waiting_quadrature(double z, const QueueParams& qin, double t, double t0, int n) {
    check_waiting_args(z, t, t0, n);
    const QueueParams q = qin.effective();
    const double tau = t - t0;
    const double psi = inter_phase_survival(q, tau);
    boost::math::quadrature::exp_sinh<double> integrator(10);
    auto f = [&](double u) {
        const double w = std::exp(-z * u);
        if (w == 0.0) return 0.0;
        return w * coeffs::event_survival(q.k * q.mu, 0, tau + u, q).value;
    };
    const double integral = integrator.integrate(f, 1e-10);
    const double lead = std::pow(lt_event_density(q.k * q.mu, z, q), n - 1);
    return lead * (1.0 - z * integral / psi);
}

double invert_lt(const Transform& F, double t, int M) {
    if (!(t > 0.0)) throw DomainError("invert_lt: t must be positive");
    if (M < 2) throw ParameterError("invert_lt: need at least two nodes");
    const long double r = 2.0L * M / (5.0L * t);
    const long double tl = t;
    auto eval = [&](cplx z) {
        const cplx v = F(z);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw OracleError("invert_lt: transform is not finite on the contour");
        }
        return v;
    };
    long double sum = 0.5L * std::real(eval(cplx(r, 0.0L))) * std::exp(r * tl);
    for (int k = 1; k < M; ++k) {
        const long double th = k * std::numbers::pi_v<long double> / M;
        const long double ct = std::cos(th) / std::sin(th);
        const cplx sigma = r * th * cplx(ct, 1.0L);
        const cplx dsigma = cplx(1.0L, th + (th * ct - 1.0L) * ct);
        sum += std::real(std::exp(tl * sigma) * eval(sigma) * dsigma);
    }
    const double out = static_cast<double>(r / M * sum);
    if (!std::isfinite(out)) throw OracleError("invert_lt: result is not finite");
    return out;
}

}  // namespace merlang::laplace
