#include "merlang/coeffs.hpp"

#include "merlang/errors.hpp"
#include "merlang/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace merlang {

void QueueParams::validate() const {
    auto fail = [](const std::string& m) { throw ParameterError(m); };
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be positive");
    if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be positive");
    if (k < 1) fail("k must be a positive integer");
    if (!(c1 >= 0.0) || !(c2 >= 0.0)) fail("mixing weights must be nonnegative");
    if (std::fabs(c1 + c2 - 1.0) > 1e-12) fail("mixing weights must sum to 1");
    if (!(alpha1 > 0.0) || alpha1 > 1.0) fail("alpha1 must lie in (0, 1]");
    if (c2 > 0.0 && (!(alpha2 > 0.0) || !(alpha2 < 1.0))) fail("alpha2 must lie in (0, 1)");
    if (c1 > 0.0 && c2 > 0.0 && !(alpha2 < alpha1)) fail("alpha2 must be smaller than alpha1");
    if (alpha1 == 1.0 && c1 > 0.0 && c1 != 1.0) fail("alpha1 = 1 requires c1 = 1");
}

QueueParams QueueParams::effective() const {
    QueueParams e = *this;
    if (c1 == 0.0) {
        std::swap(e.c1, e.c2);
        std::swap(e.alpha1, e.alpha2);
    }
    return e;
}

}  // namespace merlang

namespace merlang::coeffs {

namespace {

double lfact(std::int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double checked_exp(double l, const char* what) {
    const double v = std::exp(l);
    if (!std::isfinite(v)) throw TruncationError(std::string(what) + " overflows double precision");
    return v;
}

}  // namespace

double log_A0(std::int64_t m, std::int64_t r, const QueueParams& q) {
    const std::int64_t k = q.k;
    const double kmu = k * q.mu;
    return std::log(static_cast<double>(m)) + r * std::log(q.lambda) +
           (m + r * k - 1) * std::log(kmu) + lfact(m + r * (k + 1) - 1) - lfact(r) -
           lfact(m + r * k);
}

A0Coeff coeff_a0_A0(std::int64_t m, std::int64_t r, const QueueParams& q) {
    if (m < 1 || r < 0) throw ParameterError("coeff_a0_A0 requires m >= 1 and r >= 0");
    A0Coeff c;
    c.a0 = m + r * (q.k + 1);
    c.logA0 = log_A0(m, r, q);
    c.A0 = checked_exp(c.logA0, "A0");
    return c;
}

std::int64_t delta_index(std::int64_t n, std::int64_t s, std::int64_t i, int k) {
    return n - s + (i + 1) * (k + 1);
}

double log_B(std::int64_t n, std::int64_t s, std::int64_t i, const QueueParams& q) {
    const std::int64_t k = q.k;
    return (n + i) * std::log(q.lambda) + (k * (i + 1) - s) * std::log(k * q.mu) +
           lfact(n + k - s + i * (k + 1)) - lfact(k * (i + 1) - s) - lfact(n + i);
}

SeriesConstants coeff_block(std::int64_t n, std::int64_t s, std::int64_t i, std::int64_t m,
                            std::int64_t r, const QueueParams& q) {
    if (n < 1 || s < 1 || s > q.k || i < 0 || m < 1 || r < 0) {
        throw ParameterError("coeff_block index out of range");
    }
    SeriesConstants c;
    const double lkmu = std::log(q.k * q.mu);
    c.a0 = m + r * (q.k + 1);
    c.logA0 = log_A0(m, r, q);
    c.delta = delta_index(n, s, i, q.k);
    c.logB = log_B(n, s, i, q);
    c.nu = c.delta + c.a0;
    c.logC = lkmu + c.logB + c.logA0;
    const std::int64_t n2 = s < q.k ? n : n + 1;
    const std::int64_t s2 = s < q.k ? s + 1 : 1;
    c.logD = lkmu + log_B(n2, s2, i, q) + c.logA0;
    c.pi_ = delta_index(n2, s2, i, q.k) + c.a0;
    c.A0 = checked_exp(c.logA0, "A0");
    c.B = checked_exp(c.logB, "B");
    c.C = checked_exp(c.logC, "C");
    c.D = checked_exp(c.logD, "D");
    return c;
}

namespace {

int m_limit(const IndexCaps* caps) { return caps ? caps->max_m : std::numeric_limits<int>::max(); }
int r_limit(const IndexCaps* caps) { return caps ? caps->max_r : std::numeric_limits<int>::max(); }
int i_limit(const IndexCaps* caps) { return caps ? caps->max_i : std::numeric_limits<int>::max(); }

// Scaled B weights B_i / theta^{delta_i} indexed by delta.
std::vector<double> b_weights(int n, int s, const QueueParams& q, int n_max, int max_i) {
    std::vector<double> w(n_max + 1, 0.0);
    const double lt = std::log(q.theta());
    for (std::int64_t i = 0; i <= max_i; ++i) {
        const std::int64_t d = delta_index(n, s, i, q.k);
        if (d > n_max) break;
        w[d] = std::exp(log_B(n, s, i, q) - d * lt);
    }
    return w;
}

// result[N] += scale * sum_j a[j] * b[N - j]
void convolve_into(std::vector<double>& out, const std::vector<double>& a,
                   const std::vector<double>& b, double scale) {
    const int n_max = static_cast<int>(out.size()) - 1;
    for (int j = 0; j <= n_max; ++j) {
        if (a[j] == 0.0) continue;
        for (int l = 0; j + l <= n_max; ++l) out[j + l] += scale * a[j] * b[l];
    }
}

}  // namespace

std::vector<double> p0_weights(const QueueParams& qin, int n_max, const IndexCaps* caps) {
    const QueueParams q = qin.effective();
    std::vector<double> w(n_max + 1, 0.0);
    const double lt = std::log(q.theta());
    const int mm = m_limit(caps), rm = r_limit(caps);
    for (std::int64_t r = 0; r <= rm; ++r) {
        if (1 + r * (q.k + 1) > n_max) break;
        for (std::int64_t m = 1; m <= mm; ++m) {
            const std::int64_t N = m + r * (q.k + 1);
            if (N > n_max) break;
            w[N] += std::exp(log_A0(m, r, q) - N * lt);
        }
    }
    return w;
}

std::vector<double> pns_weights(int n, int s, const QueueParams& qin, int n_max,
                                const IndexCaps* caps) {
    const QueueParams q = qin.effective();
    if (n < 1 || s < 1 || s > q.k) throw ParameterError("pns_weights: (n, s) outside the state space");
    const int im = std::min(i_limit(caps), n_max);
    const std::vector<double> w0 = p0_weights(q, n_max, caps);
    std::vector<double> wb = b_weights(n, s, q, n_max, im);
    const int n2 = s < q.k ? n : n + 1;
    const int s2 = s < q.k ? s + 1 : 1;
    const std::vector<double> wd = b_weights(n2, s2, q, n_max, im);
    std::vector<double> w = wb;
    const double kmu = q.k * q.mu;
    convolve_into(w, wb, w0, kmu);
    convolve_into(w, wd, w0, -kmu);
    return w;
}

std::vector<double> busy_weights(const QueueParams& qin, int n_max, const IndexCaps* caps) {
    const QueueParams q = qin.effective();
    std::vector<double> w(n_max + 1, 0.0);
    const double lt = std::log(q.theta());
    const double kmu = q.k * q.mu;
    const int hm = r_limit(caps);
    for (std::int64_t h = 0; h <= hm; ++h) {
        const std::int64_t N = q.k + h * (q.k + 1);
        if (N > n_max) break;
        w[N] = kmu * std::exp(log_A0(q.k, h, q) - N * lt);
    }
    return w;
}

int p0_horizon(const IndexCaps& caps, int k) { return caps.max_m + 1 + (caps.max_r + 1) * (k + 1); }

int pns_horizon(int n, int s, const IndexCaps& caps, int k) {
    const int n2 = s < k ? n : n + 1;
    const int s2 = s < k ? s + 1 : 1;
    return p0_horizon(caps, k) + static_cast<int>(delta_index(n2, s2, caps.max_i + 1, k));
}

int busy_horizon(const IndexCaps& caps, int k) { return k + (caps.max_r + 1) * (k + 1); }

std::vector<double> p0_shell(const QueueParams& qin, int n_max, const IndexCaps& caps) {
    const QueueParams q = qin.effective();
    std::vector<double> w(n_max + 1, 0.0);
    const double lt = std::log(q.theta());
    auto add = [&](std::int64_t m, std::int64_t r) {
        const std::int64_t N = m + r * (q.k + 1);
        if (N <= n_max) w[N] += std::exp(log_A0(m, r, q) - N * lt);
    };
    for (std::int64_t r = 0; r <= caps.max_r + 1; ++r) add(caps.max_m + 1, r);
    for (std::int64_t m = 1; m <= caps.max_m; ++m) add(m, caps.max_r + 1);
    return w;
}

std::vector<double> pns_shell(int n, int s, const QueueParams& qin, int n_max,
                              const IndexCaps& caps) {
    const QueueParams q = qin.effective();
    const double kmu = q.k * q.mu;
    const int n2 = s < q.k ? n : n + 1;
    const int s2 = s < q.k ? s + 1 : 1;
    // discarded i row against the kept (m, r) block, plus kept i rows against
    // the discarded (m, r) shell; C and D enter with absolute value
    const std::vector<double> w0 = p0_weights(q, n_max, &caps);
    const std::vector<double> s0 = p0_shell(q, n_max, caps);
    const std::vector<double> wb = b_weights(n, s, q, n_max, caps.max_i);
    const std::vector<double> wd = b_weights(n2, s2, q, n_max, caps.max_i);
    std::vector<double> rb(n_max + 1, 0.0), rd(n_max + 1, 0.0);
    const std::int64_t db = delta_index(n, s, caps.max_i + 1, q.k);
    const std::int64_t dd = delta_index(n2, s2, caps.max_i + 1, q.k);
    const double lt = std::log(q.theta());
    if (db <= n_max) rb[db] = std::exp(log_B(n, s, caps.max_i + 1, q) - db * lt);
    if (dd <= n_max) rd[dd] = std::exp(log_B(n2, s2, caps.max_i + 1, q) - dd * lt);
    std::vector<double> w = rb;
    convolve_into(w, rb, w0, kmu);
    convolve_into(w, rd, w0, kmu);
    convolve_into(w, wb, s0, kmu);
    convolve_into(w, wd, s0, kmu);
    return w;
}

std::vector<double> busy_shell(const QueueParams& qin, int n_max, const IndexCaps& caps) {
    const QueueParams q = qin.effective();
    std::vector<double> w(n_max + 1, 0.0);
    const std::int64_t h = caps.max_r + 1;
    const std::int64_t N = q.k + h * (q.k + 1);
    if (N <= n_max) w[N] = q.k * q.mu * std::exp(log_A0(q.k, h, q) - N * std::log(q.theta()));
    return w;
}

KernelValue ml_kernel(double beta0, double theta, int level, double t, const QueueParams& qin) {
    const QueueParams q = qin.effective();
    if (!(t >= 0.0)) throw DomainError("kernels are defined for t >= 0");
    const double a = q.c2 / q.c1;
    const double da = q.alpha1 - q.alpha2;
    const double b = theta / q.c1;
    KernelValue out;
    if (t == 0.0) {
        const double p = beta0 - 1.0 + level;
        if (p < 0.0) throw DomainError("kernel is singular at t = 0");
        out.value = p == 0.0 ? specfun::rgamma(beta0 + level) : 0.0;
        out.terms = 1;
        return out;
    }
    const double lt = std::log(t);
    const double la = a > 0.0 ? std::log(a) : 0.0;
    const double x = -b * std::pow(t, q.alpha1);
    constexpr int kCap = 500;
    constexpr double kStop = 1e-14;
    double sum = 0.0, err = 0.0, prev = 0.0;
    int small_run = 0;
    for (int h = 0; h < kCap; ++h) {
        if (h > 0 && a == 0.0) break;
        const double lcoef = h * la + (beta0 - 1.0 + level + da * h) * lt;
        const double c = std::exp(lcoef);
        // absolute accuracy relative to the running sum is all the outer sum needs
        const double atol = h > 0 ? 1e-15 * std::fabs(sum) / c : 0.0;
        const specfun::MLParams mp{q.alpha1, beta0 + da * h + level, static_cast<double>(h + 1)};
        const specfun::MLResult ml = specfun::mittag_leffler3_eval(mp, x, specfun::kMLRelTol, atol);
        double term = c * ml.value;
        if (h & 1) term = -term;
        sum += term;
        err += c * ml.error;
        out.terms = h + 1;
        if (std::fabs(term) < kStop * std::fabs(sum)) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
        prev = term;
        if (h == kCap - 1) {
            throw TruncationError("kernel outer sum did not converge", std::fabs(term));
        }
    }
    out.value = sum;
    out.error = err + std::fabs(prev) * (a > 0.0 ? 1.0 : 0.0) * kStop;
    return out;
}

double kernel_f(int N, double t, const QueueParams& qin) {
    if (N < 1) throw ParameterError("kernel order must be positive");
    const QueueParams q = qin.effective();
    return ml_kernel(q.alpha1 + (1.0 - q.alpha1) / N, q.theta(), 0, t, q).value;
}

double kernel_g(int N, double t, const QueueParams& qin) {
    if (N < 1) throw ParameterError("kernel order must be positive");
    const QueueParams q = qin.effective();
    return ml_kernel(q.alpha1 + (1.0 - q.alpha2) / N, q.theta(), 0, t, q).value;
}

double kernel_h(int N, double t, const QueueParams& qin) {
    if (N < 1) throw ParameterError("kernel order must be positive");
    const QueueParams q = qin.effective();
    return ml_kernel(q.alpha1 + 1.0 / N, q.theta(), 0, t, q).value;
}

KernelValue event_survival(double theta, int level, double t, const QueueParams& qin) {
    const QueueParams q = qin.effective();
    KernelValue a = ml_kernel(1.0, theta, level, t, q);
    if (q.c2 > 0.0) {
        const KernelValue g = ml_kernel(1.0 + q.alpha1 - q.alpha2, theta, level, t, q);
        const double r = q.c2 / q.c1;
        a.value += r * g.value;
        a.error += r * g.error;
        a.terms += g.terms;
    }
    return a;
}

KernelValue event_density(double theta, double t, const QueueParams& qin) {
    const QueueParams q = qin.effective();
    KernelValue v = ml_kernel(q.alpha1, theta, 0, t, q);
    v.value *= theta / q.c1;
    v.error *= theta / q.c1;
    return v;
}

EventKernels event_time_kernels(double theta, double t, const QueueParams& qin) {
    const QueueParams q = qin.effective();
    if (!(theta > 0.0)) throw ParameterError("event rate must be positive");
    if (!(t >= 0.0)) throw DomainError("kernels are defined for t >= 0");
    EventKernels out;
    if (q.alpha1 == 1.0) {
        // c1 = 1: exponential with rate theta
        out.survival = std::exp(-theta * t);
        out.density = theta * out.survival;
        out.cdf = -std::expm1(-theta * t);
        out.cdf_integral = t - out.cdf / theta;
        return out;
    }
    if (t == 0.0) return out;
    const double s1 = std::sin(M_PI * q.alpha1), k1 = std::cos(M_PI * q.alpha1);
    const double s2 = std::sin(M_PI * q.alpha2), k2 = std::cos(M_PI * q.alpha2);
    const bool two = q.c2 > 0.0;
    const double lt = std::log(t), lth = std::log(theta), lc1 = std::log(q.c1);
    const double lc2 = two ? std::log(q.c2) : 0.0;
    // r rho(r) as a function of log r, scaled by the largest of the three terms
    auto r_rho = [&](double lr) {
        const double la = lc1 + q.alpha1 * lr;
        const double lb = two ? lc2 + q.alpha2 * lr : -INFINITY;
        const double m = std::max({la, lb, lth});
        const double a = std::exp(la - m), b = std::exp(lb - m), th = std::exp(lth - m);
        const double re = a * k1 + b * k2 + th, im = a * s1 + b * s2;
        return th * im / (M_PI * (re * re + im * im));
    };
    // L = log(r t) = p (pi/2) sinh(s); r rho decays like e^{-alpha |L|} in both tails
    const double amin = two ? q.alpha2 : q.alpha1;
    const double p = std::min(1.0 / amin, 4.0);
    const double span = std::max(5.0, std::asinh((40.0 / amin + 50.0) / (0.5 * M_PI * p)));
    auto accumulate = [&](double s, double* acc) {
        const double L = p * 0.5 * M_PI * std::sinh(s);
        const double w = 0.5 * M_PI * std::cosh(s) * p * r_rho(L - lt);
        if (w == 0.0) return;
        const double v = std::exp(L);
        const double ev = std::exp(-v), om = -std::expm1(-v);
        acc[0] += w * ev;
        acc[1] += w * std::exp(L - v) / t;
        acc[2] += w * om;
        acc[3] += w * t * (v < 1e-8 ? 1.0 - 0.5 * v : om / v);
    };
    constexpr double kTol = 1e-14;
    constexpr int kMaxLevels = 10;
    double acc[4] = {0, 0, 0, 0};
    double h = 0.5;
    int base = 0;
    for (double s = -span; s <= span + 1e-12; s += h, ++base) accumulate(s, acc);
    out.nodes = base;
    double prev[4];
    for (int i = 0; i < 4; ++i) prev[i] = acc[i] * h;
    double diff = 0.0;
    for (int level = 1; level <= kMaxLevels; ++level) {
        for (double s = -span + 0.5 * h; s < span; s += h) {
            accumulate(s, acc);
            ++out.nodes;
        }
        h *= 0.5;
        diff = 0.0;
        bool done = true;
        for (int i = 0; i < 4; ++i) {
            const double cur = acc[i] * h;
            const double d = std::fabs(cur - prev[i]);
            diff = std::max(diff, d);
            if (d > kTol * std::fabs(cur)) done = false;
            prev[i] = cur;
        }
        if (done && level >= 3) break;
    }
    for (double x : prev)
        if (!std::isfinite(x)) throw OracleError("event-time spectral quadrature is not finite");
    out.survival = prev[0];
    out.density = prev[1];
    out.cdf = prev[2];
    out.cdf_integral = t - prev[3];
    out.error = diff + 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(out.density));
    return out;
}

}  // namespace merlang::coeffs

