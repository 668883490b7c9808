#pragma once

#include <cstddef>
#include <vector>

namespace merlang::conv {

/// A function sampled on a uniform grid together with its first two
/// antiderivatives (v1 = int_0^t v0, v2 = int_0^t v1). The antiderivatives
/// carry the exact cell masses and moments used by the product rule, so an
/// integrable endpoint singularity t^p (p > -1) is handled without special
/// weights. v0[0] may be a regularized value when p < 0.
struct GridFunction {
    double h = 0.0;
    double exponent = 0.0;  // endpoint exponent p of v0 ~ t^p at 0
    std::vector<double> v0, v1, v2;

    std::size_t size() const { return v0.size(); }
    void regularize_origin();
};

/// Parallel (OpenMP) convolution (a * b)(t) = int_0^t a(t - s) b(s) ds.
GridFunction convolve(const GridFunction& a, const GridFunction& b);

/// Single-threaded reference with the same arithmetic.
GridFunction convolve_serial(const GridFunction& a, const GridFunction& b);

/// N-fold self-convolution by binary powering. Throws PolicyError when
/// N > max_n.
GridFunction nfold_convolve(const GridFunction& a, int N, int max_n);

/// GridFunction from values of a smooth function, antiderivatives by
/// cumulative quadrature.
GridFunction from_smooth(const std::vector<double>& v0, double h);

}  // namespace merlang::conv
