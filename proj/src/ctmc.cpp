#include "merlang/ctmc.hpp"

#include "merlang/errors.hpp"
#include "merlang/sim.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace merlang::ctmc {

Eigen::MatrixXd classical_generator(double lambda, double mu, int k, int n_phases) {
    if (n_phases <= k + 1) throw ParameterError("state space too small for the phase count");
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n_phases, n_phases);
    for (int i = 0; i < n_phases; ++i) {
        if (i + k < n_phases) Q(i, i + k) += lambda;
        if (i > 0) Q(i, i - 1) += k * mu;
        Q(i, i) = -Q.row(i).sum();
    }
    return Q;
}

Eigen::MatrixXd classical_distributions(const QueueParams& q, const analytic::TimeGrid& grid, int n_phases) {
    q.validate();
    grid.validate();
    const Eigen::MatrixXd Q = classical_generator(q.lambda, q.mu, q.k, n_phases);
    const Eigen::MatrixXd step = (Q.transpose() * grid.h()).exp();
    Eigen::MatrixXd dist(grid.n_points, n_phases);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_phases);
    p(0) = 1.0;
    dist.row(0) = p.transpose();
    for (int i = 1; i < grid.n_points; ++i) {
        p = step * p;
        dist.row(i) = p.transpose();
    }
    return dist;
}

double boundary_mass(const Eigen::MatrixXd& dist, int k) {
    return dist.bottomRightCorner(1, k).sum();
}

namespace {

analytic::Curve make(const analytic::TimeGrid& grid, analytic::CurveKind kind, const char* label) {
    analytic::Curve c;
    c.grid = grid;
    c.kind = kind;
    c.label = label;
    c.values.assign(grid.n_points, 0.0);
    c.trunc_error.assign(grid.n_points, 0.0);
    return c;
}

}  // namespace

analytic::Curve p0(const Eigen::MatrixXd& dist, const analytic::TimeGrid& grid) {
    analytic::Curve c = make(grid, analytic::CurveKind::Probability, "p0");
    for (int i = 0; i < grid.n_points; ++i) c.values[i] = dist(i, 0);
    return c;
}

analytic::Curve pns(const Eigen::MatrixXd& dist, const analytic::TimeGrid& grid, int n, int s, int k) {
    const long long m = sim::phase_index({n, s}, k);
    if (m >= dist.cols()) throw DomainError("state outside the truncated chain");
    analytic::Curve c = make(grid, analytic::CurveKind::Probability, "pns");
    for (int i = 0; i < grid.n_points; ++i) c.values[i] = dist(i, m);
    return c;
}

analytic::Curve mean_length(const Eigen::MatrixXd& dist, const analytic::TimeGrid& grid) {
    analytic::Curve c = make(grid, analytic::CurveKind::Mean, "mean");
    const Eigen::VectorXd idx = Eigen::VectorXd::LinSpaced(dist.cols(), 0.0, dist.cols() - 1.0);
    const Eigen::VectorXd m = dist * idx;
    for (int i = 0; i < grid.n_points; ++i) c.values[i] = m(i);
    return c;
}

}  // namespace merlang::ctmc
