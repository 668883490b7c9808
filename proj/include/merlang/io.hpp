#pragma once

#include "merlang/analytic.hpp"
#include "merlang/sim.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace merlang::io {

/// Locale-independent %.17g.
std::string format_double(double x);

/// Columns t,value,trunc_error.
void write_curve_csv(const std::filesystem::path& file, const analytic::Curve& c);
/// {label, kind, t_max, n_points, flagged, t, value, trunc_error}.
nlohmann::json curve_to_json(const analytic::Curve& c);
void write_curves_json(const std::filesystem::path& file, const std::vector<analytic::Curve>& curves);

/// Columns path_id,time,n,s,phase_index; one row per jump.
void write_trajectories_csv(const std::filesystem::path& file, const std::vector<sim::Trajectory>& paths, int k);

/// Binary journal: 24-byte little-endian records
/// (u64 path_id, f64 time, u32 n, u32 s), one per jump, no header.
void write_journal(const std::filesystem::path& file, const std::vector<sim::Trajectory>& paths);

struct JournalRecord {
    std::uint64_t path_id = 0;
    double time = 0.0;
    std::uint32_t n = 0;
    std::uint32_t s = 0;
};

std::vector<JournalRecord> read_journal(const std::filesystem::path& file);

/// Columns phase_index,n,s,count,probability,std_error; the last row is the
/// tail bucket with n = s = -1.
void write_pmf_csv(const std::filesystem::path& file, const sim::EmpiricalPmf& pmf, int k);

}  // namespace merlang::io
