#include "merlang/convolve.hpp"

#include "merlang/errors.hpp"

#include <string>

namespace merlang::conv {

void GridFunction::regularize_origin() {
    if (v0.size() < 2) return;
    if (exponent > 0.0) {
        v0[0] = 0.0;
    } else {
        // value that makes the first cell's trapezoid mass exact
        v0[0] = 2.0 * (v1[1] - v1[0]) / h - v0[1];
    }
}

namespace {

// Linear-interpolation weights of a smooth factor against a cell measure
// with mass m_j and first moment q_j (about the left cell end).
struct CellWeights {
    std::vector<double> w0, w1;
};

CellWeights weights_from(const std::vector<double>& mass, const std::vector<double>& mom, double h) {
    CellWeights w;
    const std::size_t n = mass.size();
    w.w0.resize(n);
    w.w1.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        w.w1[j] = mom[j] / h;
        w.w0[j] = mass[j] - w.w1[j];
    }
    return w;
}

// Measure with density d0 whose antiderivatives d1, d2 are known exactly.
CellWeights exact_measure(const std::vector<double>& d1, const std::vector<double>& d2, double h) {
    const std::size_t cells = d1.size() - 1;
    std::vector<double> mass(cells), mom(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        mass[j] = d1[j + 1] - d1[j];
        mom[j] = h * d1[j + 1] - (d2[j + 1] - d2[j]);
    }
    return weights_from(mass, mom, h);
}

// Cubic Hermite integral of g over a cell, using g' = dg.
inline double hermite_mass(double g0, double g1, double dg0, double dg1, double h) {
    return h * (g0 + g1) / 2.0 + h * h * (dg0 - dg1) / 12.0;
}

inline double hermite_moment(double g0, double g1, double dg0, double dg1, double h) {
    return h * h * (3.0 * g0 + 7.0 * g1) / 20.0 + h * h * h * (dg0 / 30.0 - dg1 / 20.0);
}

// Measure with density d1 whose antiderivative d2 is exact and whose second
// antiderivative is approximated by Hermite cubics.
CellWeights once_integrated_measure(const std::vector<double>& d1, const std::vector<double>& d2,
                                    double h) {
    const std::size_t cells = d1.size() - 1;
    std::vector<double> mass(cells), mom(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        mass[j] = d2[j + 1] - d2[j];
        mom[j] = h * d2[j + 1] - hermite_mass(d2[j], d2[j + 1], d1[j], d1[j + 1], h);
    }
    return weights_from(mass, mom, h);
}

// Measure with density d2, both integrals approximated by Hermite cubics.
CellWeights twice_integrated_measure(const std::vector<double>& d1, const std::vector<double>& d2,
                                     double h) {
    const std::size_t cells = d1.size() - 1;
    std::vector<double> mass(cells), mom(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        mass[j] = hermite_mass(d2[j], d2[j + 1], d1[j], d1[j + 1], h);
        mom[j] = hermite_moment(d2[j], d2[j + 1], d1[j], d1[j + 1], h);
    }
    return weights_from(mass, mom, h);
}

// sum_{j < count} f[n-j] w0[j] + f[n-j-1] w1[j]
inline double half_sum(const double* f, const CellWeights& w, std::size_t n, std::size_t count) {
    double s = 0.0;
    const double* w0 = w.w0.data();
    const double* w1 = w.w1.data();
    for (std::size_t j = 0; j < count; ++j) s += f[n - j] * w0[j] + f[n - j - 1] * w1[j];
    return s;
}

GridFunction convolve_impl(const GridFunction& a, const GridFunction& b, bool parallel) {
    if (a.size() != b.size() || a.h != b.h) throw ParameterError("convolve: grids differ");
    const std::size_t n_pts = a.size();
    const double h = a.h;
    GridFunction out;
    out.h = h;
    out.exponent = a.exponent + b.exponent + 1.0;
    out.v0.assign(n_pts, 0.0);
    out.v1.assign(n_pts, 0.0);
    out.v2.assign(n_pts, 0.0);
    if (n_pts < 2) return out;

    // first half: a (or its integrals) interpolated against the measure b
    const CellWeights wb = exact_measure(b.v1, b.v2, h);
    // second half: b interpolated against measures with densities a, a1, a2
    const CellWeights wa0 = exact_measure(a.v1, a.v2, h);
    const CellWeights wa1 = once_integrated_measure(a.v1, a.v2, h);
    const CellWeights wa2 = twice_integrated_measure(a.v1, a.v2, h);

    const long long last = static_cast<long long>(n_pts) - 1;
#pragma omp parallel for schedule(dynamic, 32) if (parallel)
    for (long long nn = 1; nn <= last; ++nn) {
        const std::size_t n = static_cast<std::size_t>(nn);
        const std::size_t m = n / 2;
        out.v0[n] = half_sum(a.v0.data(), wb, n, m) + half_sum(b.v0.data(), wa0, n, n - m);
        out.v1[n] = half_sum(a.v1.data(), wb, n, m) + half_sum(b.v0.data(), wa1, n, n - m);
        out.v2[n] = half_sum(a.v2.data(), wb, n, m) + half_sum(b.v0.data(), wa2, n, n - m);
    }
    out.regularize_origin();
    return out;
}

}  // namespace

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
    return convolve_impl(a, b, true);
}

GridFunction convolve_serial(const GridFunction& a, const GridFunction& b) {
    return convolve_impl(a, b, false);
}

GridFunction nfold_convolve(const GridFunction& a, int N, int max_n) {
    if (N < 1) throw ParameterError("nfold_convolve: N must be positive");
    if (N > max_n) {
        throw PolicyError("nfold_convolve: N = " + std::to_string(N) + " exceeds max_conv_N = " +
                          std::to_string(max_n));
    }
    GridFunction result;
    bool have = false;
    GridFunction base = a;
    for (int e = N; e > 0; e >>= 1) {
        if (e & 1) {
            result = have ? convolve(result, base) : base;
            have = true;
        }
        if (e > 1) base = convolve(base, base);
    }
    return result;
}

GridFunction from_smooth(const std::vector<double>& v0, double h) {
    GridFunction g;
    g.h = h;
    g.exponent = 0.0;
    g.v0 = v0;
    const std::size_t n = v0.size();
    g.v1.assign(n, 0.0);
    g.v2.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        g.v1[j] = g.v1[j - 1] + h * (v0[j - 1] + v0[j]) / 2.0;
    }
    for (std::size_t j = 1; j < n; ++j) {
        g.v2[j] = g.v2[j - 1] + h * (g.v1[j - 1] + g.v1[j]) / 2.0 + h * h * (v0[j - 1] - v0[j]) / 12.0;
    }
    return g;
}

}  // namespace merlang::conv
