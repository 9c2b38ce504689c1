#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gs2d/cli.hpp"
#include "gs2d/config.hpp"
#include "gs2d/errors.hpp"
#include "gs2d/report.hpp"
#include "gs2d/verify.hpp"

using namespace gs2d;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "gs2d_cli_tests";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kFastSolveCfg = R"(
[model]
kind = pure_power
sigma = 6
mu = 1

[constraint]
a = 1
b = 1

[grid]
n = 256

[solver]
n_starts = 1
tol_pohozaev = 5e-3
)";

} // namespace

TEST_CASE("minimal config gets the documented defaults") {
    auto parsed = parse_config("model = pure_power\nsigma = 6\nmu = 1\na = 1\nb = 1\n");
    const auto& cfg = parsed.config;
    CHECK(cfg.grid.r == 12.0);
    CHECK(cfg.grid.n == 1024);
    CHECK(cfg.grid.spacing.kind == GridSpacing::Kind::Uniform);
    CHECK(cfg.flow.tol_grad == 1e-6);
    CHECK(cfg.model.kind() == ModelKind::PurePower);
    CHECK(cfg.model.theta() == 6.0);   // defaults to sigma
    CHECK(cfg.model.tau() == 5.0);     // defaults to sigma - 1
    CHECK(cfg.constraint.a == 1.0);
    CHECK(parsed.warnings.empty());

    // the canonical spelling works too
    auto parsed2 = parse_config("kind = pure_power\nsigma = 6\nmu = 1\na = 1\nb = 1\n");
    CHECK(parsed2.config.model.kind() == ModelKind::PurePower);
}

TEST_CASE("mass-window violation parses with a warning") {
    auto parsed = parse_config(
        "kind = coupled_exp\nsigma = 6\nmu = 1\ngamma0 = 1\na = 2\nb = 2\n");
    REQUIRE(parsed.warnings.size() == 1);
    CHECK(parsed.warnings[0].find("mass window") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their line number") {
    try {
        parse_config("kind = pure_power\nsgima = 6\nmu = 1\na = 1\nb = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("sgima") != std::string::npos);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("strict parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config("kind = pure_power\nsigma = six\nmu = 1\na = 1\nb = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("kind = nonsense\nsigma = 6\nmu = 1\na = 1\nb = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("[weird]\nkind = pure_power\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config("[grid]\nmu = 1\nkind = pure_power\nsigma = 6\na = 1\nb = 1\n"),
        ConfigError); // key under the wrong section
    CHECK_THROWS_AS(
        parse_config("kind = pure_power\nsigma = 6\nmu = 1\nmu = 2\na = 1\nb = 1\n"),
        ConfigError); // duplicate
    CHECK_THROWS_AS(parse_config("kind = pure_power\nsigma = 6\nmu = 1\na = 1\n"),
                    ConfigError); // missing b
    CHECK_THROWS_AS(parse_config("kind = pure_power\nsigma = 6\nmu = -1\na = 1\nb = 1\n"),
                    ConfigError); // mu must be positive
    CHECK_THROWS_AS(
        parse_config("kind = pure_power\nsigma = 6\nmu = 1\na = 1\nb = 1\nspacing = odd\n"),
        ConfigError);
}

TEST_CASE("geometric spacing parses") {
    auto parsed = parse_config(
        "kind = pure_power\nsigma = 6\nmu = 1\na = 1\nb = 1\nspacing = geometric:1.004\n");
    CHECK(parsed.config.grid.spacing.kind == GridSpacing::Kind::Geometric);
    CHECK(parsed.config.grid.spacing.ratio == 1.004);
}

TEST_CASE("rendered config re-parses to an identical configuration") {
    auto parsed = parse_config(kFastSolveCfg);
    auto& cfg = parsed.config;
    cfg.flow.seed = 987654321;
    cfg.verify.gn_cap = 0.95;
    auto again = parse_config(render_config(cfg)).config;
    CHECK(again.grid.r == cfg.grid.r);
    CHECK(again.grid.n == cfg.grid.n);
    CHECK(static_cast<int>(again.model.kind()) == static_cast<int>(cfg.model.kind()));
    CHECK(again.model.mu() == cfg.model.mu());
    CHECK(again.model.sigma() == cfg.model.sigma());
    CHECK(again.model.gamma0() == cfg.model.gamma0());
    CHECK(again.model.theta() == cfg.model.theta());
    CHECK(again.model.tau() == cfg.model.tau());
    CHECK(again.constraint.a == cfg.constraint.a);
    CHECK(again.constraint.b == cfg.constraint.b);
    CHECK(again.flow.dt0 == cfg.flow.dt0);
    CHECK(again.flow.tol_grad == cfg.flow.tol_grad);
    CHECK(again.flow.tol_pohozaev == cfg.flow.tol_pohozaev);
    CHECK(again.flow.max_iters == cfg.flow.max_iters);
    CHECK(again.flow.seed == cfg.flow.seed);
    CHECK(again.verify.gn_cap == cfg.verify.gn_cap);
}

TEST_CASE("report JSON round-trips losslessly") {
    auto cfg = parse_config(kFastSolveCfg).config;
    auto report = solve_ground_state(cfg);
    report.bound_checks = check_bounds(report, cfg);
    const auto meta = make_meta(cfg, 1.25);
    const std::string text = report_to_json(report, cfg, meta);
    auto loaded = report_from_json(text);

    CHECK(loaded.report.converged == report.converged);
    CHECK(loaded.report.energy == report.energy);
    CHECK(loaded.report.lambda1 == report.lambda1);
    CHECK(loaded.report.lambda2 == report.lambda2);
    CHECK(loaded.report.grad_residual == report.grad_residual);
    CHECK(loaded.report.pohozaev_residual == report.pohozaev_residual);
    CHECK(loaded.report.iterations == report.iterations);
    REQUIRE(loaded.report.trail.size() == report.trail.size());
    for (size_t i = 0; i < report.trail.size(); ++i)
        CHECK(loaded.report.trail[i].J == report.trail[i].J);
    for (int k = 0; k < report.state.u.size(); ++k) {
        CHECK(loaded.report.state.u[k] == report.state.u[k]);
        CHECK(loaded.report.state.v[k] == report.state.v[k]);
    }
    REQUIRE(loaded.report.bound_checks.has_value());
    REQUIRE(loaded.report.bound_checks->checks.size() == report.bound_checks->checks.size());
    for (size_t i = 0; i < report.bound_checks->checks.size(); ++i) {
        CHECK(loaded.report.bound_checks->checks[i].lhs == report.bound_checks->checks[i].lhs);
        CHECK(loaded.report.bound_checks->checks[i].pass ==
              report.bound_checks->checks[i].pass);
    }
    CHECK(loaded.meta.version == meta.version);
    CHECK(loaded.meta.grid_hash == meta.grid_hash);

    // a second serialization of the loaded report is byte-identical
    CHECK(report_to_json(loaded.report, loaded.config, meta) == text);
}

TEST_CASE("profile CSV reimports with exact masses") {
    auto cfg = parse_config(kFastSolveCfg).config;
    auto report = solve_ground_state(cfg);
    const auto dir = temp_dir();
    const auto csv = dir / "profile.csv";
    write_profile_csv(csv.string(), report.state);

    auto rows = read_profile_csv(csv.string());
    REQUIRE(static_cast<int>(rows.size()) == report.state.u.size());
    auto grid = report.state.grid();
    std::vector<double> u(rows.size()), v(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].r == grid->node(static_cast<int>(i)));
        u[i] = rows[i].u;
        v[i] = rows[i].v;
    }
    RadialFunction ru(grid, std::move(u)), rv(grid, std::move(v));
    CHECK(std::abs(mass(ru) - mass(report.state.u)) < 1e-10);
    CHECK(std::abs(mass(rv) - mass(report.state.v)) < 1e-10);
}

TEST_CASE("cli solve twice produces byte-identical result blocks") {
    const auto dir = temp_dir();
    const auto cfgp = dir / "solve.cfg";
    write_file(cfgp, kFastSolveCfg);
    const auto out1 = dir / "r1.json";
    const auto out2 = dir / "r2.json";
    CHECK(run_cli({"solve", cfgp.string(), "--out", out1.string()}) == 0);
    CHECK(run_cli({"solve", cfgp.string(), "--out", out2.string()}) == 0);

    auto j1 = nlohmann::json::parse(read_file(out1));
    auto j2 = nlohmann::json::parse(read_file(out2));
    j1.erase("meta");
    j2.erase("meta");
    CHECK(j1.dump() == j2.dump());
}

TEST_CASE("cli verify and export run on a stored report") {
    const auto dir = temp_dir();
    const auto cfgp = dir / "ve.cfg";
    write_file(cfgp, kFastSolveCfg);
    const auto out = dir / "ve.json";
    REQUIRE(run_cli({"solve", cfgp.string(), "--out", out.string()}) == 0);
    CHECK(run_cli({"verify", out.string()}) == 0);
    const auto csv = dir / "ve.csv";
    CHECK(run_cli({"export", out.string(), "--csv", csv.string()}) == 0);
    CHECK(fs::exists(csv));
    CHECK(read_file(csv).rfind("r,u,v\n", 0) == 0);
}

TEST_CASE("cli exit codes follow the error classes") {
    const auto dir = temp_dir();
    // configuration errors
    CHECK(run_cli({"solve", (dir / "missing.cfg").string()}) == 2);
    const auto bad = dir / "bad.cfg";
    write_file(bad, "kind = pure_power\nsgima = 6\nmu = 1\na = 1\nb = 1\n");
    CHECK(run_cli({"solve", bad.string()}) == 2);

    // nonconvergence
    const auto hard = dir / "hard.cfg";
    write_file(hard, "kind = pure_power\nsigma = 6\nmu = 1\na = 1\nb = 1\n"
                     "n = 256\nn_starts = 1\nmax_iters = 2\ntol_grad = 1e-30\n");
    CHECK(run_cli({"solve", hard.string(), "--out", (dir / "hard.json").string()}) == 3);

    // audit failure carries exit 1
    const auto additive = dir / "add.cfg";
    write_file(additive, "kind = additive_exp\nsigma = 6\nmu = 1\ngamma0 = 1\na = 1\nb = 1\n");
    CHECK(run_cli({"audit", additive.string()}) == 1);

    // audit of the coupled model passes off the axis margin
    const auto coupled = dir / "coup.cfg";
    write_file(coupled, "kind = coupled_exp\nsigma = 6\nmu = 1\ngamma0 = 1\na = 1\nb = 1\n");
    // H6 fails honestly at small amplitude, so the audit exit is 1 as well
    CHECK(run_cli({"audit", coupled.string()}) == 1);
}

TEST_CASE("cli sweep writes the CSV table with the slope footer") {
    const auto dir = temp_dir();
    const auto cfgp = dir / "sweep.cfg";
    write_file(cfgp, "kind = pure_power\nsigma = 6\nmu = 1\na = 1\nb = 1\n"
                     "n = 512\nn_starts = 1\ntol_pohozaev = 2e-2\n");
    const auto csv = dir / "sweep.csv";
    CHECK(run_cli({"sweep-mu", cfgp.string(), "--mu", "1,2,4,8", "--out", csv.string()}) == 0);
    const auto text = read_file(csv);
    CHECK(text.rfind("mu,energy,lambda1,lambda2\n", 0) == 0);
    CHECK(text.find("# slope,") != std::string::npos);
}

TEST_CASE("cli probe-geometry reports the separation verdict") {
    const auto dir = temp_dir();
    const auto cfgp = dir / "probe.cfg";
    write_file(cfgp, "kind = coupled_exp\nsigma = 6\nmu = 1\ngamma0 = 1\na = 0.5\nb = 0.5\n"
                     "n = 512\n");
    CHECK(run_cli({"probe-geometry", cfgp.string(), "--K", "0.28"}) == 0);
    CHECK(run_cli({"probe-geometry", cfgp.string(), "--K", "40.0"}) == 1);
}
