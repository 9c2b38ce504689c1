#include "gs2d/cli.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "gs2d/audit.hpp"
#include "gs2d/config.hpp"
#include "gs2d/errors.hpp"
#include "gs2d/report.hpp"
#include "gs2d/verify.hpp"

namespace gs2d {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNonConvergence = 3;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << "\n";
}

void print_bounds(const BoundsReport& bounds) {
    std::printf("%-24s %-6s %14s %14s  %s\n", "check", "pass", "lhs", "rhs", "anchor");
    for (const auto& c : bounds.checks) {
        std::printf("%-24s %-6s %14.6e %14.6e  %s\n", c.name.c_str(),
                    c.applicable ? (c.pass ? "yes" : "NO") : "n/a", c.lhs, c.rhs,
                    c.anchor.c_str());
    }
}

int cmd_solve(const std::string& config_path, const std::string& out_path,
              std::optional<std::uint64_t> seed, std::optional<int> starts) {
    auto parsed = load_config_file(config_path);
    if (seed)
        parsed.config.flow.seed = *seed;
    if (starts)
        parsed.config.flow.n_starts = *starts;
    print_warnings(parsed.warnings);

    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report = solve_ground_state(parsed.config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_warnings(report.warnings);

    report.bound_checks = check_bounds(report, parsed.config);
    write_report_file(out_path, report, parsed.config, make_meta(parsed.config, wall));

    std::printf("energy=%.10g lambda1=%.10g lambda2=%.10g grad_residual=%.3e "
                "pohozaev_residual=%.3e iterations=%d start=%d -> %s\n",
                report.energy, report.lambda1, report.lambda2, report.grad_residual,
                report.pohozaev_residual, report.iterations, report.start_index,
                out_path.c_str());
    return report.bound_checks->all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_audit(const std::string& config_path) {
    auto parsed = load_config_file(config_path);
    AuditOptions opts;
    opts.box = parsed.config.verify.audit_box;
    opts.n_samples = parsed.config.verify.audit_samples;
    opts.axis_margin = parsed.config.verify.axis_margin;
    opts.seed = parsed.config.flow.seed;
    opts.envelope_eps = parsed.config.verify.envelope_eps;
    opts.envelope_q = parsed.config.verify.envelope_q;
    auto report = audit_hypotheses(parsed.config.model, opts);
    std::cout << format_audit_report(report);
    return report.any_fail() ? kExitCheckFailed : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& mu_values,
              const std::string& out_path) {
    auto parsed = load_config_file(config_path);
    print_warnings(parsed.warnings);
    auto sweep = sweep_mu(parsed.config, mu_values);
    for (const auto& w : sweep.warnings)
        std::cerr << "warning: " << w << "\n";
    write_sweep_csv(out_path, sweep);
    std::printf("%-10s %-14s %-14s %-14s %s\n", "mu", "energy", "lambda1", "lambda2", "flag");
    for (const auto& row : sweep.rows)
        std::printf("%-10.4g %-14.8g %-14.8g %-14.8g %s\n", row.mu, row.energy, row.lambda1,
                    row.lambda2, row.converged ? "" : "nonconverged");
    if (sweep.slope_valid)
        std::printf("slope=%.5f -> %s\n", sweep.slope, out_path.c_str());
    else
        std::printf("slope unavailable -> %s\n", out_path.c_str());
    return sweep.complete ? kExitOk : kExitNonConvergence;
}

int cmd_verify(const std::string& report_path) {
    auto loaded = read_report_file(report_path);
    auto bounds = check_bounds(loaded.report, loaded.config);
    print_bounds(bounds);
    return bounds.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_probe(const std::string& config_path, double K) {
    auto parsed = load_config_file(config_path);
    auto probe = geometry_probe(parsed.config, K, parsed.config.verify.probe_samples);
    std::printf("K=%.6g sup_at_K=%.6g inf_at_2K=%.6g j_star=%.6g samples=%d pass=%s\n",
                probe.K, probe.sup_at_K, probe.inf_at_2K, probe.j_star, probe.n_samples,
                probe.pass ? "yes" : "no");
    return probe.pass ? kExitOk : kExitCheckFailed;
}

int cmd_export(const std::string& report_path, const std::string& csv_path) {
    auto loaded = read_report_file(report_path);
    write_profile_csv(csv_path, loaded.report.state);
    std::printf("wrote %s\n", csv_path.c_str());
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"normalized ground states of planar coupled Schrodinger systems"};
    app.require_subcommand(1);

    std::string config_path, report_path, out_path, csv_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> starts;
    std::vector<double> mu_values;
    double K = 0.0;

    auto* solve = app.add_subcommand("solve", "compute a ground state and write a report");
    solve->add_option("config", config_path, "configuration file")->required();
    solve->add_option("--out", out_path, "report path")->default_val("report.json");
    solve->add_option("--seed", seed, "override the RNG seed");
    solve->add_option("--starts", starts, "override the number of starts");

    auto* audit = app.add_subcommand("audit", "audit the structure hypotheses of the model");
    audit->add_option("config", config_path, "configuration file")->required();

    auto* sweep = app.add_subcommand("sweep-mu", "ground-state levels along ascending mu");
    sweep->add_option("config", config_path, "configuration file")->required();
    sweep->add_option("--mu", mu_values, "ascending mu values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out_path, "CSV path")->default_val("sweep.csv");

    auto* verify = app.add_subcommand("verify", "re-run the bound checks of a stored report");
    verify->add_option("report", report_path, "report JSON")->required();

    auto* probe = app.add_subcommand("probe-geometry", "sample the low-energy separation");
    probe->add_option("config", config_path, "configuration file")->required();
    probe->add_option("--K", K, "kinetic level")->required();

    auto* exp = app.add_subcommand("export", "write the per-node profile as CSV");
    exp->add_option("report", report_path, "report JSON")->required();
    exp->add_option("--csv", csv_path, "output CSV path")->required();

    try {
        std::vector<const char*> argv;
        argv.push_back("gs2d");
        for (const auto& a : args)
            argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (solve->parsed())
            return cmd_solve(config_path, out_path, seed, starts);
        if (audit->parsed())
            return cmd_audit(config_path);
        if (sweep->parsed())
            return cmd_sweep(config_path, mu_values, out_path);
        if (verify->parsed())
            return cmd_verify(report_path);
        if (probe->parsed())
            return cmd_probe(config_path, K);
        if (exp->parsed())
            return cmd_export(report_path, csv_path);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NonConvergenceError& e) {
        std::cerr << "nonconvergence: " << e.what() << " (best residual "
                  << e.best().grad_residual << " after " << e.best().iterations
                  << " iterations)\n";
        return kExitNonConvergence;
    } catch (const OverflowError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace gs2d
