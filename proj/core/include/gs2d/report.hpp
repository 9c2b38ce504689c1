#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gs2d/solver.hpp"

namespace gs2d {

struct ReportMeta {
    std::string version;
    std::uint64_t seed = 0;
    std::string grid_hash; // hex of the grid descriptor hash
    double wall_time_s = 0.0;
    std::string timestamp; // ISO-8601 UTC; excluded from determinism
};

ReportMeta make_meta(const SolverConfig& config, double wall_time_s);

/// JSON document with blocks {meta, config_echo, result, trail,
/// bounds}. Doubles serialize round-trip exactly; rereading a written
/// report reproduces it structurally.
std::string report_to_json(const SolveReport& report, const SolverConfig& config,
                           const ReportMeta& meta);

struct LoadedReport {
    SolveReport report;
    SolverConfig config;
    ReportMeta meta;
};

LoadedReport report_from_json(const std::string& json_text);

void write_report_file(const std::string& path, const SolveReport& report,
                       const SolverConfig& config, const ReportMeta& meta);
LoadedReport read_report_file(const std::string& path);

/// Per-node profile table, columns r,u,v.
void write_profile_csv(const std::string& path, const StatePair& state);
struct ProfileRow {
    double r, u, v;
};
std::vector<ProfileRow> read_profile_csv(const std::string& path);

/// Sweep table, columns mu,energy,lambda1,lambda2 with the fitted
/// slope and any flags in comment footers.
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

} // namespace gs2d
