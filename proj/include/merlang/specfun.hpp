#pragma once

namespace merlang::specfun {

/// Parameters of the three-parameter (Prabhakar) Mittag-Leffler function.
struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;

    void validate() const;
};

enum class MLMethod { Series, Kummer, Asymptotic, Spectral, Multiprecision };

struct MLResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
    int terms = 0;
    MLMethod method = MLMethod::Series;
};

inline constexpr double kMLRelTol = 1e-12;
inline constexpr int kMaxSeriesTerms = 10000;

/// E^gamma_{alpha,beta}(x) with method and error metadata. A regime is
/// accepted once its error estimate is below max(rel_tol*|value|, abs_tol).
/// Throws TruncationError if no regime reaches the tolerance.
MLResult mittag_leffler3_eval(const MLParams& p, double x, double rel_tol = kMLRelTol,
                              double abs_tol = 0.0);

double mittag_leffler3(const MLParams& p, double x);

/// Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt.
double upper_incomplete_gamma(double s, double x);

/// log(e^x Gamma(s, x)) for s > 0, x > 0, without overflow for large x.
double log_scaled_upper_gamma(double s, double x);

/// log|1/Gamma(x)| and its sign; sign is 0 at the poles of Gamma.
double log_abs_rgamma(double x, int& sign);

/// 1/Gamma(x) for any real x.
double rgamma(double x);

}  // namespace merlang::specfun
