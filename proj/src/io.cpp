#include "merlang/io.hpp"

#include "merlang/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace merlang::io {

namespace {

std::ofstream open_out(const std::filesystem::path& file, std::ios::openmode mode = std::ios::out) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream os(file, mode | std::ios::trunc);
    if (!os) throw ConfigError("cannot open " + file.string() + " for writing");
    return os;
}

template <class T>
void put_le(std::string& buf, T v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    auto bits = std::bit_cast<std::array<char, sizeof(T)>>(v);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    buf.append(bits.data(), bits.size());
}

template <class T>
T get_le(const char* p) {
    std::array<char, sizeof(T)> bits;
    std::copy(p, p + sizeof(T), bits.begin());
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    return std::bit_cast<T>(bits);
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // guard against a locale with ',' radix
    for (char* p = buf; *p; ++p)
        if (*p == ',') *p = '.';
    return buf;
}

void write_curve_csv(const std::filesystem::path& file, const analytic::Curve& c) {
    std::ofstream os = open_out(file);
    os << "t,value,trunc_error\n";
    for (int i = 0; i < c.grid.n_points; ++i) {
        os << format_double(c.grid.at(i)) << ',' << format_double(c.values[i]) << ','
           << format_double(c.trunc_error[i]) << '\n';
    }
}

nlohmann::json curve_to_json(const analytic::Curve& c) {
    nlohmann::json j;
    j["label"] = c.label;
    j["kind"] = analytic::kind_name(c.kind);
    j["t_max"] = c.grid.t_max;
    j["n_points"] = c.grid.n_points;
    j["flagged"] = c.flagged;
    j["t"] = c.grid.times();
    j["value"] = c.values;
    j["trunc_error"] = c.trunc_error;
    return j;
}

void write_curves_json(const std::filesystem::path& file, const std::vector<analytic::Curve>& curves) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : curves) j.push_back(curve_to_json(c));
    std::ofstream os = open_out(file);
    os << j.dump(1) << '\n';
}

void write_trajectories_csv(const std::filesystem::path& file, const std::vector<sim::Trajectory>& paths, int k) {
    std::ofstream os = open_out(file);
    os << "path_id,time,n,s,phase_index\n";
    for (const auto& p : paths) {
        for (const auto& j : p.jumps) {
            os << p.path_id << ',' << format_double(j.time) << ',' << j.state.n << ',' << j.state.s << ','
               << sim::phase_index(j.state, k) << '\n';
        }
    }
}

void write_journal(const std::filesystem::path& file, const std::vector<sim::Trajectory>& paths) {
    std::string buf;
    for (const auto& p : paths) {
        for (const auto& j : p.jumps) {
            put_le<std::uint64_t>(buf, p.path_id);
            put_le<double>(buf, j.time);
            put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(j.state.n));
            put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(j.state.s));
        }
    }
    std::ofstream os = open_out(file, std::ios::out | std::ios::binary);
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<JournalRecord> read_journal(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + file.string());
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    constexpr std::size_t kRecord = 24;
    if (buf.size() % kRecord != 0) throw ConfigError("journal size is not a multiple of the record size");
    std::vector<JournalRecord> out(buf.size() / kRecord);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const char* p = buf.data() + i * kRecord;
        out[i] = {get_le<std::uint64_t>(p), get_le<double>(p + 8), get_le<std::uint32_t>(p + 16),
                  get_le<std::uint32_t>(p + 20)};
    }
    return out;
}

void write_pmf_csv(const std::filesystem::path& file, const sim::EmpiricalPmf& pmf, int k) {
    std::ofstream os = open_out(file);
    os << "phase_index,n,s,count,probability,std_error\n";
    const double n = static_cast<double>(pmf.n_paths);
    for (std::size_t m = 0; m < pmf.counts.size(); ++m) {
        const bool tail = m + 1 == pmf.counts.size();
        const sim::QueueState st = tail ? sim::QueueState{-1, -1} : sim::state_from_index(m, k);
        const double p = pmf.probability(static_cast<long long>(m));
        os << m << ',' << st.n << ',' << st.s << ',' << pmf.counts[m] << ',' << format_double(p) << ','
           << format_double(n > 0 ? std::sqrt(p * (1.0 - p) / n) : 0.0) << '\n';
    }
}

}  // namespace merlang::io
