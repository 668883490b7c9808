#pragma once

#include "merlang/coeffs.hpp"
#include "merlang/rng.hpp"

#include <cstdint>
#include <vector>

namespace merlang::sim {

struct QueueState {
    int n = 0;  // customers
    int s = 0;  // remaining phases of the customer in service, 0 iff n = 0

    bool operator==(const QueueState&) const = default;
};

void validate_state(const QueueState& st, int k);

/// k(n-1) + s, and 0 for the empty state.
long long phase_index(const QueueState& st, int k);
QueueState state_from_index(long long m, int k);

struct Event {
    double holding = 0.0;
    QueueState next;
};

Event next_event(const QueueState& st, const QueueParams& q, RngStream& rng);

struct Jump {
    double time = 0.0;
    QueueState state;
};

struct Trajectory {
    std::uint64_t path_id = 0;
    std::uint64_t seed = 0;
    std::vector<Jump> jumps;  // first entry (0, (0,0))
};

constexpr long long kMaxEvents = 10'000'000;

/// Runs next_event from (0,0) until the clock passes t_max. Throws
/// RunawayError past kMaxEvents events.
Trajectory simulate_path(const QueueParams& q, double t_max, RngStream& rng);

/// Paths 0..n_paths-1, path i on stream (seed, i). Output order is by path id
/// whatever the thread count.
std::vector<Trajectory> simulate_paths(const QueueParams& q, double t_max, std::uint64_t seed,
                                       std::uint64_t n_paths);

/// State after the last jump at or before t.
QueueState state_at(const Trajectory& path, double t);

constexpr int kPmfCap = 512;

/// Occupancy counts by phase index at time t; index kPmfCap collects every
/// phase index >= kPmfCap.
struct EmpiricalPmf {
    double t = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_paths = 0;

    double probability(long long phase) const;
};

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

EmpiricalPmf estimate_state_pmf(const std::vector<Trajectory>& paths, double t, int k);
/// Mean phase index at time t with its standard error.
MeanEstimate estimate_mean_length(const std::vector<Trajectory>& paths, double t, int k);

/// Completed excursions from entry into (1,k) to the next visit of (0,0);
/// excursions still running at the end of a path are dropped.
std::vector<double> extract_busy_periods(const std::vector<Trajectory>& paths);

/// Streaming Monte Carlo: the same paths as simulate_paths, reduced on the
/// fly to occupancy counts and phase-index moments at the requested times.
struct MonteCarloSummary {
    std::vector<double> times;
    std::vector<EmpiricalPmf> pmfs;
    std::vector<MeanEstimate> means;
    std::uint64_t n_paths = 0;
    std::uint64_t events = 0;
};

MonteCarloSummary monte_carlo(const QueueParams& q, const std::vector<double>& times, std::uint64_t seed,
                              std::uint64_t n_paths);

/// Busy periods from independent excursions started in (1,k) at time 0 and
/// followed up to the horizon. Excursion i uses stream (seed, i).
struct BusySample {
    std::vector<double> completed;  // durations of excursions that emptied by the horizon
    std::uint64_t started = 0;
    double horizon = 0.0;

    /// Fraction of all started excursions that emptied by time t (t <= horizon).
    double cdf(double t) const;
};

BusySample simulate_busy_periods(const QueueParams& q, double horizon, std::uint64_t seed,
                                 std::uint64_t n_excursions);

}  // namespace merlang::sim
