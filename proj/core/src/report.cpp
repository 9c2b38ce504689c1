#include "gs2d/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gs2d/config.hpp"
#include "gs2d/errors.hpp"
#include "gs2d/version.hpp"

namespace gs2d {

using json = nlohmann::ordered_json;

ReportMeta make_meta(const SolverConfig& config, double wall_time_s) {
    ReportMeta meta;
    meta.version = std::string(kVersion);
    meta.seed = config.flow.seed;
    {
        char buf[24];
        snprintf(buf, sizeof buf, "%016llx",
                 static_cast<unsigned long long>(config.grid.build()->hash()));
        meta.grid_hash = buf;
    }
    meta.wall_time_s = wall_time_s;
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm_utc{};
        gmtime_r(&t, &tm_utc);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        meta.timestamp = buf;
    }
    return meta;
}

std::string report_to_json(const SolveReport& report, const SolverConfig& config,
                           const ReportMeta& meta) {
    json j;
    j["meta"] = {{"version", meta.version},
                 {"seed", meta.seed},
                 {"grid_hash", meta.grid_hash},
                 {"wall_time_s", meta.wall_time_s},
                 {"timestamp", meta.timestamp}};
    j["config_echo"] = render_config(config);

    json result;
    result["converged"] = report.converged;
    result["energy"] = report.energy;
    result["lambda1"] = report.lambda1;
    result["lambda2"] = report.lambda2;
    result["pohozaev_residual"] = report.pohozaev_residual;
    result["grad_residual"] = report.grad_residual;
    result["kinetic"] = report.kinetic;
    result["iterations"] = report.iterations;
    result["start_index"] = report.start_index;
    result["warnings"] = report.warnings;
    const auto& g = *report.state.grid();
    json r = json::array(), u = json::array(), v = json::array();
    for (int k = 0; k < g.size(); ++k) {
        r.push_back(g.node(k));
        u.push_back(report.state.u[k]);
        v.push_back(report.state.v[k]);
    }
    result["state"] = {{"r", std::move(r)}, {"u", std::move(u)}, {"v", std::move(v)}};
    j["result"] = std::move(result);

    json trail = json::array();
    for (const auto& e : report.trail)
        trail.push_back({e.J, e.P_abs, e.grad_norm, e.kinetic, e.event});
    j["trail"] = std::move(trail);

    if (report.bound_checks) {
        json checks = json::array();
        for (const auto& c : report.bound_checks->checks)
            checks.push_back({{"name", c.name},
                              {"lhs", c.lhs},
                              {"rhs", c.rhs},
                              {"pass", c.pass},
                              {"applicable", c.applicable},
                              {"anchor", c.anchor}});
        j["bounds"] = {{"checks", std::move(checks)}};
    } else {
        j["bounds"] = nullptr;
    }
    return j.dump(2) + "\n";
}

LoadedReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed report JSON: ") + e.what());
    }

    auto parsed = parse_config(j.at("config_echo").get<std::string>());
    const GridPtr grid = parsed.config.grid.build();

    const auto& jr = j.at("result");
    const auto& js = jr.at("state");
    std::vector<double> u = js.at("u").get<std::vector<double>>();
    std::vector<double> v = js.at("v").get<std::vector<double>>();
    if (static_cast<int>(u.size()) != grid->size())
        throw ConfigError("report state length disagrees with its grid");

    SolveReport report{StatePair{RadialFunction(grid, std::move(u)),
                                 RadialFunction(grid, std::move(v))}};
    report.converged = jr.at("converged").get<bool>();
    report.energy = jr.at("energy").get<double>();
    report.lambda1 = jr.at("lambda1").get<double>();
    report.lambda2 = jr.at("lambda2").get<double>();
    report.pohozaev_residual = jr.at("pohozaev_residual").get<double>();
    report.grad_residual = jr.at("grad_residual").get<double>();
    report.kinetic = jr.at("kinetic").get<double>();
    report.iterations = jr.at("iterations").get<int>();
    report.start_index = jr.at("start_index").get<int>();
    report.warnings = jr.at("warnings").get<std::vector<std::string>>();

    for (const auto& e : j.at("trail")) {
        TrailEntry t;
        t.J = e.at(0).get<double>();
        t.P_abs = e.at(1).get<double>();
        t.grad_norm = e.at(2).get<double>();
        t.kinetic = e.at(3).get<double>();
        t.event = e.size() > 4 ? e.at(4).get<int>() : 0;
        report.trail.push_back(t);
    }

    if (!j.at("bounds").is_null()) {
        BoundsReport bounds;
        for (const auto& c : j.at("bounds").at("checks"))
            bounds.checks.push_back({c.at("name").get<std::string>(), c.at("lhs").get<double>(),
                                     c.at("rhs").get<double>(), c.at("pass").get<bool>(),
                                     c.at("applicable").get<bool>(),
                                     c.at("anchor").get<std::string>()});
        report.bound_checks = std::move(bounds);
    }

    LoadedReport out{std::move(report), std::move(parsed.config), {}};
    const auto& jm = j.at("meta");
    out.meta.version = jm.at("version").get<std::string>();
    out.meta.seed = jm.at("seed").get<std::uint64_t>();
    out.meta.grid_hash = jm.at("grid_hash").get<std::string>();
    out.meta.wall_time_s = jm.at("wall_time_s").get<double>();
    out.meta.timestamp = jm.at("timestamp").get<std::string>();
    return out;
}

void write_report_file(const std::string& path, const SolveReport& report,
                       const SolverConfig& config, const ReportMeta& meta) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write report file '" + path + "'");
    out << report_to_json(report, config, meta);
}

LoadedReport read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open report file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return report_from_json(ss.str());
}

void write_profile_csv(const std::string& path, const StatePair& state) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write CSV file '" + path + "'");
    out << "r,u,v\n";
    char buf[128];
    const auto& g = *state.grid();
    for (int k = 0; k < g.size(); ++k) {
        snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.node(k), state.u[k], state.v[k]);
        out << buf;
    }
}

std::vector<ProfileRow> read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open CSV file '" + path + "'");
    std::vector<ProfileRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("r,", 0) == 0)
            continue;
        ProfileRow row{};
        if (sscanf(line.c_str(), "%lf,%lf,%lf", &row.r, &row.u, &row.v) != 3)
            throw ConfigError("malformed CSV row '" + line + "'");
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write CSV file '" + path + "'");
    out << "mu,energy,lambda1,lambda2\n";
    char buf[160];
    for (const auto& row : sweep.rows) {
        snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g%s\n", row.mu, row.energy,
                 row.lambda1, row.lambda2, row.converged ? "" : " # nonconverged");
        out << buf;
    }
    if (sweep.slope_valid) {
        snprintf(buf, sizeof buf, "# slope,%.17g\n", sweep.slope);
        out << buf;
    }
    if (!sweep.complete)
        out << "# partial: some entries did not converge\n";
    for (const auto& w : sweep.warnings)
        out << "# warning: " << w << "\n";
}

} // namespace gs2d
