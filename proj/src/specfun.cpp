#include "merlang/specfun.hpp"

#include "merlang/errors.hpp"
#include "mp.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <mpfr.h>
#include <quadmath.h>

#include <cfloat>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>
#include <limits>
#include <string>

namespace merlang::specfun {

using detail::Mp;

void MLParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0) || !std::isfinite(alpha) ||
        !std::isfinite(beta) || !std::isfinite(gamma)) {
        throw ParameterError("Mittag-Leffler parameters must be finite and positive");
    }
}

double log_abs_rgamma(double x, int& sign) {
    if (x > 0.0) {
        sign = 1;
        return -boost::math::lgamma(x);
    }
    if (x == std::floor(x)) {
        sign = 0;
        return -std::numeric_limits<double>::infinity();
    }
    // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    const double sp = boost::math::sin_pi(x);
    sign = sp > 0 ? 1 : -1;
    return boost::math::lgamma(1.0 - x) + std::log(std::fabs(sp)) - std::log(M_PI);
}

double rgamma(double x) {
    int sign = 0;
    const double l = log_abs_rgamma(x, sign);
    return sign == 0 ? 0.0 : sign * std::exp(l);
}

double upper_incomplete_gamma(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
        throw ParameterError("upper_incomplete_gamma requires s > 0 and x >= 0");
    }
    return boost::math::tgamma(s, x);
}

double log_scaled_upper_gamma(double s, double x) {
    if (!(s > 0.0) || !(x > 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
        throw ParameterError("log_scaled_upper_gamma requires s > 0 and x > 0");
    }
    if (x > s + 1.0) {
        // continued fraction for e^x x^{-s} Gamma(s, x)
        constexpr double tiny = 1e-300;
        double b = x + 1.0 - s;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < 10000; ++i) {
            const double an = -i * (i - s);
            b += 2.0;
            d = an * d + b;
            if (std::fabs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::fabs(del - 1.0) < 1e-16) break;
        }
        return s * std::log(x) + std::log(h);
    }
    const double qv = boost::math::gamma_q(s, x);
    if (!(qv > 0.0)) throw DomainError("log_scaled_upper_gamma: underflow");
    return std::log(qv) + std::lgamma(s) + x;
}

namespace {

template <class T>
struct Ops;

template <>
struct Ops<long double> {
    using T = long double;
    static T lg(T x) { return lgammal(x); }
    static T ex(T x) { return expl(x); }
    static T lo(T x) { return logl(x); }
    static T ab(T x) { return fabsl(x); }
    static T eps() { return LDBL_EPSILON; }
};

template <>
struct Ops<__float128> {
    using T = __float128;
    static T lg(T x) { return lgammaq(x); }
    static T ex(T x) { return expq(x); }
    static T lo(T x) { return logq(x); }
    static T ab(T x) { return fabsq(x); }
    static T eps() { return scalbnq(1, -112); }
};

struct Partial {
    double value = 0.0;
    double error = 0.0;
    int terms = 0;
    bool converged = false;
};

// Power series with Kahan summation and term-ratio stopping. The error
// estimate accounts for rounding of each exponentiated term and the tail.
template <class T>
Partial power_series(const MLParams& p, double x) {
    using O = Ops<T>;
    const bool neg = x < 0.0;
    const T lx = O::lo(T(std::fabs(x)));
    const T alpha = p.alpha, beta = p.beta, gamma = p.gamma;
    T logpoch = 0;  // log((gamma)_r / r!)
    T sum = 0, comp = 0, abs_sum = 0;
    T lmax = 0;
    T prev_logmag = -std::numeric_limits<double>::infinity();
    int small_run = 0;
    Partial out;
    T last = 0;
    for (int r = 0; r < kMaxSeriesTerms; ++r) {
        const T lgv = O::lg(alpha * r + beta);
        const T logmag = logpoch + T(r) * lx - lgv;
        T term = O::ex(logmag);
        if (neg && (r & 1)) term = -term;
        const T y = term - comp;
        const T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        abs_sum += O::ab(term);
        const T scale = O::ab(logpoch) + O::ab(T(r) * lx) + O::ab(lgv);
        if (scale > lmax) lmax = scale;
        last = O::ab(term);
        out.terms = r + 1;
        if (O::ab(term) < T(1e-3) * O::eps() * O::ab(sum) && logmag < prev_logmag) {
            if (++small_run >= 3) {
                out.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        prev_logmag = logmag;
        logpoch += O::lo((gamma + r) / T(r + 1));
    }
    out.value = static_cast<double>(sum);
    out.error = static_cast<double>(O::eps() * abs_sum * (4 + lmax) + last) +
                std::numeric_limits<double>::epsilon() * std::fabs(out.value);
    return out;
}

// E^g_{1,b}(-X) = e^{-X} 1F1(b-g; b; X) / Gamma(b)
Partial kummer(const MLParams& p, double X) {
    using O = Ops<long double>;
    const long double a = p.beta - p.gamma;
    const long double lx = logl(X);
    long double logpoch = 0;
    int psign = 1;
    long double sum = 0, comp = 0, abs_sum = 0, lmax = 0, last = 0;
    long double prev = -std::numeric_limits<long double>::infinity();
    int small_run = 0;
    Partial out;
    for (int r = 0; r < kMaxSeriesTerms; ++r) {
        const long double lgv = lgammal(p.beta + r);
        const long double logmag = logpoch + r * lx - lgv - X;
        long double term = psign == 0 ? 0.0L : psign * expl(logmag);
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        abs_sum += fabsl(term);
        const long double scale = fabsl(logpoch) + fabsl(r * lx) + fabsl(lgv) + X;
        if (scale > lmax) lmax = scale;
        last = fabsl(term);
        out.terms = r + 1;
        if (psign == 0) {
            out.converged = true;
            break;
        }
        if (fabsl(term) < 1e-3L * O::eps() * fabsl(sum) && logmag < prev) {
            if (++small_run >= 3) {
                out.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        prev = logmag;
        const long double f = a + r;
        if (f == 0) {
            psign = 0;
        } else {
            if (f < 0) psign = -psign;
            logpoch += logl(fabsl(f) / (r + 1));
        }
    }
    out.value = static_cast<double>(sum);
    out.error = static_cast<double>(O::eps() * abs_sum * (4 + lmax) + last) +
                std::numeric_limits<double>::epsilon() * std::fabs(out.value);
    return out;
}

// Algebraic expansion of E^g_{a,b}(-X) for 0 < a < 1. Stops where the
// envelope of |term| (1/Gamma without its sine factor) starts to grow.
Partial asymptotic(const MLParams& p, double X) {
    const double lx = std::log(X);
    long double sum = 0, comp = 0;
    double logpoch = 0;  // log((gamma)_j / j!)
    double prev_env = std::numeric_limits<double>::infinity();
    int small_run = 0;
    Partial out;
    double tail = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kMaxSeriesTerms; ++j) {
        const double arg = p.beta - p.alpha * (p.gamma + j);
        const double env_g = arg > 0.5 ? -std::lgamma(arg) : std::lgamma(1.0 - arg) - std::log(M_PI);
        const double env = logpoch - (p.gamma + j) * lx + env_g;
        if (env > prev_env) {
            tail = std::exp(env);
            out.converged = true;
            break;
        }
        prev_env = env;
        int sg = 0;
        const double lr = log_abs_rgamma(arg, sg);
        out.terms = j + 1;
        if (sg != 0) {
            long double term = std::exp(logpoch - (p.gamma + j) * lx + lr) * sg;
            if (j & 1) term = -term;
            const long double y = term - comp;
            const long double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        if (std::exp(env) < 1e-3 * LDBL_EPSILON * static_cast<double>(fabsl(sum))) {
            if (++small_run >= 3) {
                tail = std::exp(env);
                out.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        logpoch += std::log((p.gamma + j) / (j + 1));
    }
    out.value = static_cast<double>(sum);
    out.error = tail + 64 * std::numeric_limits<double>::epsilon() * std::fabs(out.value);
    return out;
}

// For 0 < a < 1 the Laplace transform u^{a g - b} / (u^a + 1)^g has no poles
// on the principal sheet, so its inverse at tau = X^{1/a} collapses onto the
// negative real axis. Small-u terms with exponent <= -1 are inverted in closed
// form; the remainder is integrated with exp-sinh quadrature.
Partial spectral(const MLParams& p, double X, double quad_tol) {
    using cd = std::complex<double>;
    const double a = p.alpha, b = p.beta, g = p.gamma;
    const double tau = std::pow(X, 1.0 / a);
    const double e0 = a * g - b;

    std::vector<double> coef;  // (-1)^j (g)_j / j!
    double c = 1.0;
    double analytic = 0.0, analytic_abs = 0.0;
    for (int j = 0; e0 + a * j <= -1.0 && j < 2000; ++j) {
        const double e = e0 + a * j;
        coef.push_back(c);
        const double term = c * std::pow(tau, -e - 1.0) * rgamma(-e);
        analytic += term;
        analytic_abs += std::fabs(term);
        c *= -(g + j) / (j + 1);
    }
    const int J = static_cast<int>(coef.size());
    const double cJ = c;

    auto remainder = [&](double rho) -> double {
        const double ra = std::pow(rho, a);
        if (J > 0 && ra < std::min(0.5, 1.5 / (1.0 + g))) {
            // convergent expansion of the remainder
            const cd w = std::polar(ra, M_PI * a);
            cd z = cJ * std::polar(std::pow(rho, e0), M_PI * e0) * std::pow(w, J);
            double sum = 0.0;
            for (int j = J; j < J + 4000; ++j) {
                sum += z.imag();
                if (std::abs(z) < 1e-17 * std::fabs(sum) && j > J + 2) break;
                z *= w * (-(g + j) / (j + 1));
            }
            return sum;
        }
        if (J == 0) {
            const cd u_a = std::polar(ra, M_PI * a);
            const cd G = std::polar(std::pow(rho, e0), M_PI * e0) * std::exp(-g * std::log(1.0 + u_a));
            return G.imag();
        }
        using cl = std::complex<long double>;
        const long double lr = std::log((long double)rho);
        const cl u_a = std::polar((long double)ra, (long double)M_PI * a);
        const cl G = std::polar(std::exp(e0 * lr), (long double)M_PI * e0) *
                     std::exp(-(long double)g * std::log(1.0L + u_a));
        long double im = G.imag();
        for (int j = 0; j < J; ++j) {
            const long double e = e0 + a * j;
            im -= coef[j] * std::exp(e * lr) * std::sin((long double)M_PI * e);
        }
        return static_cast<double>(im);
    };

    thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
    Partial out;
    double err = 0.0, l1 = 0.0;
    double integral = 0.0;
    try {
        integral = integrator.integrate(
            [&](double v) {
                const double w = std::exp(-v);
                return w == 0.0 ? 0.0 : w * remainder(v / tau);
            }, quad_tol, &err, &l1);
    } catch (const std::exception&) {
        return out;
    }
    integral /= -(M_PI * tau);
    err /= (M_PI * tau);
    l1 /= (M_PI * tau);
    if (!std::isfinite(integral)) return out;
    const double scale = std::pow(X, (1.0 - b) / a);
    out.value = scale * (analytic + integral);
    out.error = std::fabs(scale) * (err + std::max(1e-14, 0.1 * quad_tol) * l1 + 1e-15 * analytic_abs) +
                4 * std::numeric_limits<double>::epsilon() * std::fabs(out.value);
    out.terms = J;
    out.converged = true;
    return out;
}

// Peak of log|term| of the power series, scanned in double precision.
double series_peak_log(const MLParams& p, double X) {
    const double lx = std::log(X);
    double logpoch = 0, peak = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < kMaxSeriesTerms; ++r) {
        const double lm = logpoch + r * lx - std::lgamma(p.alpha * r + p.beta);
        if (lm > peak) peak = lm;
        if (lm < peak - 60 && r > 4) break;
        logpoch += std::log((p.gamma + r) / (r + 1));
    }
    return peak;
}

Partial mp_series(const MLParams& p, double x, double rel_tol) {
    const double peak_bits = series_peak_log(p, std::fabs(x)) / std::log(2.0);
    double guess_bits = 0;  // assumed -log2|result|
    const double need_bits = -std::log2(rel_tol) + 16;
    for (int attempt = 0; attempt < 6; ++attempt) {
        const auto prec = static_cast<mpfr_prec_t>(
            std::max(64.0, peak_bits + guess_bits + need_bits + 32));
        if (prec > 8192) break;
        Mp sum(prec), term(prec), tmp(prec), xv(prec), logx(prec), poch(prec), g(prec);
        mpfr_set_d(xv.get(), x, MPFR_RNDN);
        mpfr_set_ui(sum.get(), 0, MPFR_RNDN);
        mpfr_set_ui(poch.get(), 1, MPFR_RNDN);  // (gamma)_r / r! * x^r
        int small_run = 0, r = 0;
        bool converged = false;
        for (; r < kMaxSeriesTerms; ++r) {
            mpfr_set_d(g.get(), p.alpha, MPFR_RNDN);
            mpfr_mul_ui(g.get(), g.get(), static_cast<unsigned long>(r), MPFR_RNDN);
            mpfr_add_d(g.get(), g.get(), p.beta, MPFR_RNDN);
            mpfr_gamma(g.get(), g.get(), MPFR_RNDN);
            mpfr_div(term.get(), poch.get(), g.get(), MPFR_RNDN);
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
            mpfr_abs(tmp.get(), term.get(), MPFR_RNDN);
            mpfr_abs(g.get(), sum.get(), MPFR_RNDN);
            mpfr_mul_d(g.get(), g.get(), rel_tol * 1e-6, MPFR_RNDN);
            if (r > 0 && mpfr_cmp(tmp.get(), g.get()) < 0) {
                if (++small_run >= 3) {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
            mpfr_set_d(g.get(), p.gamma, MPFR_RNDN);
            mpfr_add_ui(g.get(), g.get(), static_cast<unsigned long>(r), MPFR_RNDN);
            mpfr_mul(poch.get(), poch.get(), g.get(), MPFR_RNDN);
            mpfr_div_ui(poch.get(), poch.get(), static_cast<unsigned long>(r + 1), MPFR_RNDN);
            mpfr_mul(poch.get(), poch.get(), xv.get(), MPFR_RNDN);
        }
        if (!converged) break;
        const double v = mpfr_get_d(sum.get(), MPFR_RNDN);
        const double lost_bits = peak_bits - std::log2(std::fabs(v) > 0 ? std::fabs(v) : 1e-300);
        if (lost_bits + need_bits + 16 <= static_cast<double>(prec)) {
            Partial out;
            out.value = v;
            out.error = std::ldexp(std::fabs(v), -static_cast<int>(prec - lost_bits - 8)) +
                        std::numeric_limits<double>::epsilon() * std::fabs(v);
            out.terms = r + 1;
            out.converged = true;
            return out;
        }
        guess_bits = lost_bits - peak_bits + 32;
    }
    return {};
}

struct Tolerance {
    double rel;
    double abs;
};

bool acceptable(const Partial& r, Tolerance tol) {
    return r.converged && std::isfinite(r.value) &&
           r.error <= std::max(tol.rel * std::fabs(r.value), tol.abs);
}

}  // namespace

MLResult mittag_leffler3_eval(const MLParams& p, double x, double rel_tol, double abs_tol) {
    const Tolerance tol{rel_tol, abs_tol};
    p.validate();
    if (!std::isfinite(x)) throw ParameterError("Mittag-Leffler argument must be finite");
    if (x == 0.0) return {rgamma(p.beta), 0.0, 1, MLMethod::Series};

    auto wrap = [](const Partial& r, MLMethod m) { return MLResult{r.value, r.error, r.terms, m}; };
    const double X = std::fabs(x);
    if (x < 0.0) {
        if (p.alpha == 1.0 && p.beta >= p.gamma) {
            const Partial k = kummer(p, X);
            if (acceptable(k, tol)) return wrap(k, MLMethod::Kummer);
        }
        const double y = std::pow(X, 1.0 / p.alpha);
        double magnitude = 0.0;  // rough size of the result, when known
        if (p.alpha < 1.0 && y > 12.0) {
            const Partial a = asymptotic(p, X);
            if (acceptable(a, tol)) return wrap(a, MLMethod::Asymptotic);
            if (a.converged && a.error < 0.1 * std::fabs(a.value)) magnitude = std::fabs(a.value);
        }
        if (y <= 16.0) {
            const Partial s = power_series<long double>(p, x);
            if (acceptable(s, tol)) return wrap(s, MLMethod::Series);
        }
        if (p.alpha < 1.0) {
            double qt = 1e-14;
            if (magnitude > 0.0) qt = std::clamp(tol.abs / magnitude, 1e-14, 1e-6);
            const Partial s = spectral(p, X, qt);
            if (acceptable(s, tol)) return wrap(s, MLMethod::Spectral);
        }
        if (y <= 48.0) {
            const Partial s = power_series<__float128>(p, x);
            if (acceptable(s, tol)) return wrap(s, MLMethod::Series);
        }
    } else {
        const Partial s = power_series<long double>(p, x);
        if (acceptable(s, tol)) return wrap(s, MLMethod::Series);
    }
    const Partial m = mp_series(p, x, rel_tol);
    if (acceptable(m, tol)) return wrap(m, MLMethod::Multiprecision);
    throw TruncationError("Mittag-Leffler series did not converge (alpha=" + std::to_string(p.alpha) +
                              ", beta=" + std::to_string(p.beta) + ", gamma=" +
                              std::to_string(p.gamma) + ", x=" + std::to_string(x) + ")",
                          m.error);
}

double mittag_leffler3(const MLParams& p, double x) { return mittag_leffler3_eval(p, x).value; }

}  // namespace merlang::specfun
