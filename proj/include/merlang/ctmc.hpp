#pragma once

#include "merlang/analytic.hpp"
#include "merlang/coeffs.hpp"

#include <Eigen/Dense>

#include <vector>

namespace merlang::ctmc {

constexpr int kDefaultPhases = 200;

/// Generator of the exponential-time chain on phase indices 0..n_phases-1.
/// Arrivals that would leave the state space are dropped.
Eigen::MatrixXd classical_generator(double lambda, double mu, int k, int n_phases);

/// Phase-index distribution at each grid time, started empty.
/// Row i holds the distribution at grid.at(i).
Eigen::MatrixXd classical_distributions(const QueueParams& q, const analytic::TimeGrid& grid,
                                        int n_phases = kDefaultPhases);

/// Mass left in the top k phases at t_max; a check on the state-space cut.
double boundary_mass(const Eigen::MatrixXd& dist, int k);

analytic::Curve p0(const Eigen::MatrixXd& dist, const analytic::TimeGrid& grid);
analytic::Curve pns(const Eigen::MatrixXd& dist, const analytic::TimeGrid& grid, int n, int s, int k);
analytic::Curve mean_length(const Eigen::MatrixXd& dist, const analytic::TimeGrid& grid);

}  // namespace merlang::ctmc
