#include "merlang/sim.hpp"

#include "merlang/errors.hpp"
#include "merlang/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace merlang::sim {

void validate_state(const QueueState& st, int k) {
    const bool empty = st.n == 0 && st.s == 0;
    const bool busy = st.n >= 1 && st.s >= 1 && st.s <= k;
    if (!empty && !busy) {
        throw ParameterError("invalid queue state (" + std::to_string(st.n) + ", " + std::to_string(st.s) + ")");
    }
}

long long phase_index(const QueueState& st, int k) {
    validate_state(st, k);
    if (st.n == 0) return 0;
    return static_cast<long long>(k) * (st.n - 1) + st.s;
}

QueueState state_from_index(long long m, int k) {
    if (m < 0 || k < 1) throw ParameterError("phase index must be nonnegative and k positive");
    if (m == 0) return {0, 0};
    const long long b = (m - 1) % k + 1;
    const long long a = (m - b) / k + 1;
    return {static_cast<int>(a), static_cast<int>(b)};
}

Event next_event(const QueueState& st, const QueueParams& q, RngStream& rng) {
    validate_state(st, q.k);
    Event ev;
    if (st.n == 0) {
        ev.holding = sampling::sample_event_time(q.lambda, q, rng);
        ev.next = {1, q.k};
        return ev;
    }
    const double kmu = q.k * q.mu;
    ev.holding = sampling::sample_event_time(q.lambda + kmu, q, rng);
    if (rng.uniform() < q.lambda / (q.lambda + kmu)) {
        ev.next = {st.n + 1, st.s};
    } else if (st.s > 1) {
        ev.next = {st.n, st.s - 1};
    } else if (st.n > 1) {
        ev.next = {st.n - 1, q.k};
    } else {
        ev.next = {0, 0};
    }
    return ev;
}

namespace {

void check_horizon(double t_max) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ParameterError("simulation horizon must be positive");
}

}  // namespace

Trajectory simulate_path(const QueueParams& q, double t_max, RngStream& rng) {
    check_horizon(t_max);
    Trajectory tr;
    tr.path_id = rng.stream_id();
    tr.seed = rng.seed();
    QueueState st{0, 0};
    double t = 0.0;
    tr.jumps.push_back({0.0, st});
    for (long long count = 0;; ++count) {
        if (count >= kMaxEvents) throw RunawayError("path exceeded the event cap");
        const Event ev = next_event(st, q, rng);
        t += ev.holding;
        if (t > t_max) break;
        st = ev.next;
        tr.jumps.push_back({t, st});
    }
    return tr;
}

std::vector<Trajectory> simulate_paths(const QueueParams& q, double t_max, std::uint64_t seed,
                                       std::uint64_t n_paths) {
    q.validate();
    check_horizon(t_max);
    std::vector<Trajectory> out(n_paths);
    const long long n = static_cast<long long>(n_paths);
    bool runaway = false;
#pragma omp parallel for schedule(dynamic, 64)
    for (long long i = 0; i < n; ++i) {
        try {
            RngStream rng(seed, static_cast<std::uint64_t>(i));
            out[i] = simulate_path(q, t_max, rng);
        } catch (const RunawayError&) {
#pragma omp atomic write
            runaway = true;
        }
    }
    if (runaway) throw RunawayError("a path exceeded the event cap");
    return out;
}

QueueState state_at(const Trajectory& path, double t) {
    if (path.jumps.empty()) throw ParameterError("empty trajectory");
    auto it = std::upper_bound(path.jumps.begin(), path.jumps.end(), t,
                               [](double v, const Jump& j) { return v < j.time; });
    if (it == path.jumps.begin()) return path.jumps.front().state;
    return std::prev(it)->state;
}

double EmpiricalPmf::probability(long long phase) const {
    if (n_paths == 0) return 0.0;
    if (phase < 0 || phase >= static_cast<long long>(counts.size())) return 0.0;
    return static_cast<double>(counts[phase]) / static_cast<double>(n_paths);
}

namespace {

// Integer accumulators keep the reduction independent of the thread count.
struct Accumulator {
    std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(kPmfCap + 1, 0);
    unsigned __int128 sum = 0;
    unsigned __int128 sum_sq = 0;

    void add(long long phase) {
        ++counts[std::min<long long>(phase, kPmfCap)];
        sum += static_cast<unsigned __int128>(phase);
        sum_sq += static_cast<unsigned __int128>(phase) * static_cast<unsigned __int128>(phase);
    }
    void merge(const Accumulator& o) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

MeanEstimate mean_from(const Accumulator& acc, std::uint64_t n) {
    MeanEstimate m;
    if (n == 0) return m;
    const double dn = static_cast<double>(n);
    m.mean = static_cast<double>(acc.sum) / dn;
    if (n > 1) {
        const double var = (static_cast<double>(acc.sum_sq) - dn * m.mean * m.mean) / (dn - 1.0);
        m.std_error = std::sqrt(std::max(var, 0.0) / dn);
    }
    return m;
}

}  // namespace

EmpiricalPmf estimate_state_pmf(const std::vector<Trajectory>& paths, double t, int k) {
    Accumulator acc;
    for (const Trajectory& p : paths) acc.add(phase_index(state_at(p, t), k));
    EmpiricalPmf pmf;
    pmf.t = t;
    pmf.counts = std::move(acc.counts);
    pmf.n_paths = paths.size();
    return pmf;
}

MeanEstimate estimate_mean_length(const std::vector<Trajectory>& paths, double t, int k) {
    Accumulator acc;
    for (const Trajectory& p : paths) acc.add(phase_index(state_at(p, t), k));
    return mean_from(acc, paths.size());
}

std::vector<double> extract_busy_periods(const std::vector<Trajectory>& paths) {
    std::vector<double> out;
    for (const Trajectory& p : paths) {
        double start = -1.0;
        for (std::size_t j = 1; j < p.jumps.size(); ++j) {
            const Jump& prev = p.jumps[j - 1];
            const Jump& cur = p.jumps[j];
            if (prev.state.n == 0 && cur.state.n == 1) start = cur.time;
            if (cur.state.n == 0 && start >= 0.0) {
                out.push_back(cur.time - start);
                start = -1.0;
            }
        }
    }
    return out;
}

MonteCarloSummary monte_carlo(const QueueParams& q, const std::vector<double>& times, std::uint64_t seed,
                              std::uint64_t n_paths) {
    q.validate();
    if (times.empty()) throw ParameterError("no observation times");
    if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
        throw ParameterError("observation times must be nonnegative and sorted");
    const double t_max = times.back();
    const std::size_t nt = times.size();

    std::vector<Accumulator> total(nt);
    std::uint64_t events = 0;
    bool runaway = false;
    const long long n = static_cast<long long>(n_paths);

#pragma omp parallel
    {
        std::vector<Accumulator> local(nt);
        std::uint64_t local_events = 0;
#pragma omp for schedule(dynamic, 256) nowait
        for (long long i = 0; i < n; ++i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i));
            QueueState st{0, 0};
            double t = 0.0;
            std::size_t next_obs = 0;
            for (long long count = 0; next_obs < nt; ++count) {
                if (count >= kMaxEvents) {
#pragma omp atomic write
                    runaway = true;
                    break;
                }
                const Event ev = next_event(st, q, rng);
                const double t_next = t + ev.holding;
                while (next_obs < nt && times[next_obs] < t_next) {
                    local[next_obs].add(phase_index(st, q.k));
                    ++next_obs;
                }
                t = t_next;
                st = ev.next;
                ++local_events;
                if (t > t_max) break;
            }
        }
#pragma omp critical
        {
            for (std::size_t j = 0; j < nt; ++j) total[j].merge(local[j]);
            events += local_events;
        }
    }
    if (runaway) throw RunawayError("a path exceeded the event cap");

    MonteCarloSummary out;
    out.times = times;
    out.n_paths = n_paths;
    out.events = events;
    for (std::size_t j = 0; j < nt; ++j) {
        out.means.push_back(mean_from(total[j], n_paths));
        EmpiricalPmf pmf;
        pmf.t = times[j];
        pmf.counts = std::move(total[j].counts);
        pmf.n_paths = n_paths;
        out.pmfs.push_back(std::move(pmf));
    }
    return out;
}

double BusySample::cdf(double t) const {
    if (started == 0) return 0.0;
    if (t > horizon) throw DomainError("busy-period CDF requested past the simulation horizon");
    const auto it = std::upper_bound(completed.begin(), completed.end(), t);
    return static_cast<double>(it - completed.begin()) / static_cast<double>(started);
}

BusySample simulate_busy_periods(const QueueParams& q, double horizon, std::uint64_t seed,
                                 std::uint64_t n_excursions) {
    q.validate();
    check_horizon(horizon);
    const long long n = static_cast<long long>(n_excursions);
    // NaN marks an excursion still running at the horizon
    std::vector<double> dur(n_excursions, std::numeric_limits<double>::quiet_NaN());
    bool runaway = false;
#pragma omp parallel for schedule(dynamic, 256)
    for (long long i = 0; i < n; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        QueueState st{1, q.k};
        double t = 0.0;
        for (long long count = 0;; ++count) {
            if (count >= kMaxEvents) {
#pragma omp atomic write
                runaway = true;
                break;
            }
            const Event ev = next_event(st, q, rng);
            t += ev.holding;
            if (t > horizon) break;
            st = ev.next;
            if (st.n == 0) {
                dur[i] = t;
                break;
            }
        }
    }
    if (runaway) throw RunawayError("an excursion exceeded the event cap");
    BusySample out;
    out.started = n_excursions;
    out.horizon = horizon;
    for (double d : dur)
        if (!std::isnan(d)) out.completed.push_back(d);
    std::sort(out.completed.begin(), out.completed.end());
    return out;
}

}  // namespace merlang::sim
