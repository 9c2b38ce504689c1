// Acceptance suite: one pass/fail line per criterion, exit 1 on any
// failure. Tolerances are pinned in code next to each check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gs2d/audit.hpp"
#include "gs2d/manifold.hpp"
#include "gs2d/solver.hpp"
#include "gs2d/verify.hpp"

using namespace gs2d;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome& out;
    void operator()(bool ok, const std::string& what) {
        if (!ok) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + what;
        }
    }
};

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

RadialFunction gauss(const GridPtr& g, double amp = 1.0, double beta = 0.5) {
    return RadialFunction::sample(g, [=](double r) { return amp * std::exp(-beta * r * r); });
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double lp_moment(const RadialFunction& f, double p) {
    std::vector<double> vals(f.values().size());
    for (size_t k = 0; k < vals.size(); ++k)
        vals[k] = std::pow(std::abs(f.values()[k]), p);
    return integrate(RadialFunction(f.grid(), std::move(vals)));
}

SolverConfig pure_cfg(int n = 1024, double R = 12.0) {
    SolverConfig cfg;
    cfg.grid = GridSpec{R, n, {}};
    cfg.model = NonlinearityModel(ModelKind::PurePower, 1.0, 6.0);
    cfg.constraint = MassConstraint(1.0, 1.0, 1.0);
    cfg.flow.n_starts = 2;
    return cfg;
}

SolverConfig coupled_cfg(int n = 1024, double R = 28.0) {
    SolverConfig cfg;
    cfg.grid = GridSpec{R, n, {}};
    cfg.model = NonlinearityModel(ModelKind::CoupledExp, 50.0, 6.0, 1.0);
    cfg.constraint = MassConstraint(1.0, 1.0, 1.0);
    cfg.flow.n_starts = 2;
    return cfg;
}

// ---------------------------------------------------------------- 1
Outcome criterion_gaussian_oracles() {
    Outcome out;
    Check check{out};
    const auto t0 = std::chrono::steady_clock::now();
    auto g = make_grid(12.0, 2048);
    auto u = gauss(g);
    check(rel_err(mass(u), kPi) < 1e-4, "mass off");
    check(rel_err(grad_norm_sq(u), kPi) < 1e-4, "kinetic off");
    for (double p : {2.0, 3.0, 4.0, 6.0})
        check(rel_err(lp_moment(u, p), 2.0 * kPi / p) < 1e-4,
              "L" + std::to_string(int(p)) + " moment off");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(secs < 1.0, "runtime " + std::to_string(secs) + "s");
    out.detail = "mass/kinetic/L^p within 1e-4 at (R=12, n=2048), " +
                 std::to_string(secs) + "s";
    return out;
}

// ---------------------------------------------------------------- 2
Outcome criterion_fiber_calculus() {
    Outcome out;
    Check check{out};
    const auto t0 = std::chrono::steady_clock::now();
    auto g = make_grid(12.0, 16384);
    StatePair w{gauss(g), gauss(g)};
    auto model = NonlinearityModel(ModelKind::PurePower, 1.0, 6.0);

    const double s_star = fiber_maximizer(w, model);
    check(std::abs(s_star - 0.5 * std::log(3.0 / 16.0)) < 1e-6, "maximizer location");
    check(std::abs(fiber_energy(w, model, s_star) - 3.0 * kPi / 32.0) < 1e-3, "fiber maximum");

    const double kin = grad_norm_sq(w.u) + grad_norm_sq(w.v);
    const double eps = 1e-5;
    for (double s = -2.0; s <= 2.0 + 1e-12; s += 0.2) {
        const double fd = (fiber_energy(w, model, s + eps, kin) -
                           fiber_energy(w, model, s - eps, kin)) /
                          (2.0 * eps);
        const double d = fiber_derivative(w, model, s, kin);
        check(std::abs(fd - d) <= 1e-5 * std::max(1.0, std::abs(d)),
              "derivative mismatch at s=" + std::to_string(s));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(secs < 5.0, "runtime");
    char buf[160];
    snprintf(buf, sizeof buf, "s*=%.8f (want %.8f), peak within 1e-3, FD within 1e-5, %.2fs",
             s_star, 0.5 * std::log(3.0 / 16.0), secs);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------- 3
Outcome criterion_scaling_identities() {
    Outcome out;
    Check check{out};
    // profiles whose dilations for |s| <= 2 keep a negligible tail at
    // the truncation boundary
    auto g = make_grid(12.0, 8192);
    StatePair w{gauss(g, 1.1, 4.0), gauss(g, 0.7, 3.5)};
    const double ku = grad_norm_sq(w.u), kv = grad_norm_sq(w.v);
    const double mu0 = mass(w.u), mv0 = mass(w.v);
    double worst = 0.0;
    for (double s : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        auto r = resample_scaled(w, s);
        worst = std::max(worst, rel_err(mass(r.u), mu0));
        worst = std::max(worst, rel_err(mass(r.v), mv0));
        worst = std::max(worst, rel_err(grad_norm_sq(r.u), std::exp(2.0 * s) * ku));
        worst = std::max(worst, rel_err(grad_norm_sq(r.v), std::exp(2.0 * s) * kv));
        for (double xi : {2.0, 4.0, 6.0}) {
            worst = std::max(worst, rel_err(lp_moment(r.u, xi),
                                            std::exp((xi - 2.0) * s) * lp_moment(w.u, xi)));
            worst = std::max(worst, rel_err(lp_moment(r.v, xi),
                                            std::exp((xi - 2.0) * s) * lp_moment(w.v, xi)));
        }
    }
    check(worst < 2e-3, "worst relative deviation " + std::to_string(worst));
    out.detail = "mass/kinetic/L^xi dilation laws within " + std::to_string(worst) +
                 " (budget 2e-3) for |s| <= 2";
    return out;
}

// ---------------------------------------------------------------- 4
Outcome criterion_solver_stationarity() {
    Outcome out;
    Check check{out};
    char buf[256];

    struct Case {
        const char* name;
        SolverConfig cfg;
    };
    std::vector<Case> cases{{"pure_power", pure_cfg()}, {"coupled_exp", coupled_cfg()}};

    for (auto& cs : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        auto rep = solve_ground_state(cs.cfg);
        auto rep2 = solve_ground_state(cs.cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        check(rep.converged, std::string(cs.name) + " not converged");
        check(rep.grad_residual <= 1e-6, std::string(cs.name) + " grad residual");
        check(std::abs(mass(rep.state.u) - 1.0) <= 1e-10, std::string(cs.name) + " mass u");
        check(std::abs(mass(rep.state.v) - 1.0) <= 1e-10, std::string(cs.name) + " mass v");
        check(rep.lambda1 > 0.0 && rep.lambda2 > 0.0, std::string(cs.name) + " multipliers");
        check(secs < 60.0, std::string(cs.name) + " runtime");

        bool identical = rep.energy == rep2.energy && rep.lambda1 == rep2.lambda1 &&
                         rep.iterations == rep2.iterations &&
                         rep.trail.size() == rep2.trail.size();
        for (int k = 0; identical && k < rep.state.u.size(); ++k)
            identical = rep.state.u[k] == rep2.state.u[k] && rep.state.v[k] == rep2.state.v[k];
        check(identical, std::string(cs.name) + " reruns not bitwise identical");

        // The Pohozaev functional carries an O(h^2) identity defect at
        // the discrete stationary state, so the 1e-6 budget needs a
        // finer grid; asserted below on n = 12289. The n = 1024 value
        // is reported here.
        snprintf(buf, sizeof buf, "%s n=1024: g=%.2e |P|/K=%.2e (1e-6 budget on refined grid) %.1fs; ",
                 cs.name, rep.grad_residual, rep.pohozaev_residual / rep.kinetic, secs);
        out.detail += buf;
    }

    for (auto base : {pure_cfg(16385), coupled_cfg(40961, 36.0)}) {
        const auto t0 = std::chrono::steady_clock::now();
        base.flow.tol_pohozaev = 1e-6;
        base.flow.n_starts = 2;
        auto rep = solve_ground_state(base);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check(rep.converged, "refined case not converged");
        check(rep.grad_residual <= 1e-6, "refined grad residual");
        check(rep.pohozaev_residual <= 1e-6 * rep.kinetic, "refined |P| budget");
        check(secs < 60.0, "refined runtime");
        snprintf(buf, sizeof buf, "refined n=%d: g=%.2e |P|/K=%.2e %.1fs; ",
                 base.grid.n, rep.grad_residual, rep.pohozaev_residual / rep.kinetic, secs);
        out.detail += buf;
    }
    return out;
}

// ---------------------------------------------------------------- 5
Outcome criterion_level_decay_rate() {
    Outcome out;
    Check check{out};
    const auto t0 = std::chrono::steady_clock::now();

    auto cfg6 = pure_cfg(2048, 20.0);
    auto sw6 = sweep_mu(cfg6, {1.0, 2.0, 4.0, 8.0});
    check(sw6.complete, "sigma=6 sweep incomplete");
    check(sw6.slope_valid && std::abs(sw6.slope - (-1.0)) <= 0.02,
          "sigma=6 slope " + std::to_string(sw6.slope));

    auto cfg8 = pure_cfg(2048, 16.0);
    cfg8.model = NonlinearityModel(ModelKind::PurePower, 1.0, 8.0);
    auto sw8 = sweep_mu(cfg8, {1.0, 2.0, 4.0, 8.0});
    check(sw8.complete, "sigma=8 sweep incomplete");
    check(sw8.slope_valid && std::abs(sw8.slope - (-0.5)) <= 0.05,
          "sigma=8 slope " + std::to_string(sw8.slope));

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(secs < 300.0, "runtime");
    char buf[160];
    snprintf(buf, sizeof buf, "slopes %.4f (want -1.00 +/- 0.02) and %.4f (want -0.50 +/- 0.05), %.1fs",
             sw6.slope, sw8.slope, secs);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------- 6
Outcome criterion_level_bounds() {
    Outcome out;
    Check check{out};
    const double slack = 1e-10;
    int n_reports = 0;
    for (auto cfg : {pure_cfg(), coupled_cfg()}) {
        auto rep = solve_ground_state(cfg);
        check(rep.converged, "matrix case not converged");
        if (!rep.converged)
            continue;
        ++n_reports;
        const auto fv = functional_values(rep.state, cfg.model);
        const double theta = cfg.model.theta();
        const double m_hat = rep.energy;
        const double a2 = 1.0, b2 = 1.0;
        check(fv.potential <= 2.0 * m_hat / (theta - 4.0) + slack, "potential bound");
        check(fv.kinetic <= 2.0 * (theta - 2.0) * m_hat / (theta - 4.0) + slack,
              "gradient bound");
        check(std::abs(-rep.lambda1 * a2 - rep.lambda2 * b2) <=
                  4.0 * (theta - 1.0) * m_hat / (theta - 4.0) + slack,
              "combined multiplier bound");
        if (cfg.model.exponential())
            check(fv.kinetic < 2.0 * kPi / cfg.model.gamma0() - a2 - b2 + slack,
                  "kinetic window");
    }
    out.detail = "bounds verified on " + std::to_string(n_reports) + " converged reports";
    return out;
}

// ---------------------------------------------------------------- 7
Outcome criterion_tm_integral() {
    Outcome out;
    Check check{out};
    auto g = make_grid(12.0, 2048);
    StatePair w{gauss(g), RadialFunction::zeros(g)};
    double series = 0.0, fact = 1.0;
    for (int k = 1; k <= 25; ++k) {
        fact *= k;
        series += 1.0 / (k * fact);
    }
    const double tm = tm_integral(w, 1.0);
    check(std::abs(tm - kPi * series) < 1e-3, "series value off");

    std::mt19937_64 rng(4242);
    auto gg = make_grid(12.0, 512);
    for (int i = 0; i < 20; ++i) {
        StatePair s{gauss(gg, uniform(rng, 0.3, 1.2), uniform(rng, 0.4, 2.0)),
                    gauss(gg, uniform(rng, 0.3, 1.2), uniform(rng, 0.4, 2.0))};
        const double g1 = uniform(rng, 0.1, 0.9);
        const double g2 = g1 + uniform(rng, 0.05, 0.8);
        check(tm_integral(s, g1) <= tm_integral(s, g2), "monotonicity violated");
    }
    char buf[120];
    snprintf(buf, sizeof buf, "unit-Gaussian value %.5f (want %.5f), monotone on 20 states",
             tm, kPi * series);
    out.detail = buf;
    return out;
}

// ---------------------------------------------------------------- 8
Outcome criterion_auditor() {
    Outcome out;
    Check check{out};

    auto additive = NonlinearityModel(ModelKind::AdditiveExp, 1.0, 6.0, 1.0);
    auto rep_add = audit_hypotheses(additive);
    const auto& h3 = rep_add.record(3);
    check(h3.verdict == Verdict::Fail, "additive H3 not flagged");
    if (h3.witness) {
        auto [hu, hv] = additive.eval_grad_H(h3.witness->u, h3.witness->v);
        check(std::abs(hu) + std::abs(hv) > 1e-8, "H3 witness does not verify");
    } else {
        check(false, "H3 witness missing");
    }

    auto pure = NonlinearityModel(ModelKind::PurePower, 1.0, 6.0);
    check(audit_hypotheses(pure).record(2).verdict == Verdict::Pass, "pure H2 not passing");

    auto coupled = NonlinearityModel(ModelKind::CoupledExp, 1.0, 6.0, 1.0);
    check(audit_hypotheses(coupled).record(5).verdict == Verdict::Pass,
          "coupled H5 not passing");

    // gradient consistency against central differences
    std::mt19937_64 rng(99);
    const double step = 1e-5;
    int tested = 0;
    bool grad_ok = true;
    while (tested < 1000) {
        const double u = uniform(rng, -2.0, 2.0);
        const double v = uniform(rng, -2.0, 2.0);
        if (std::min(std::abs(u), std::abs(v)) < 0.05)
            continue;
        ++tested;
        for (const auto& m : {pure, coupled, additive}) {
            const auto c = m.eval(u, v);
            const double fd_u = (m.eval_H(u + step, v) - m.eval_H(u - step, v)) / (2.0 * step);
            const double fd_v = (m.eval_H(u, v + step) - m.eval_H(u, v - step)) / (2.0 * step);
            const double scale = std::max({1e-8, std::abs(c.Hu), std::abs(c.Hv)});
            grad_ok = grad_ok && std::abs(fd_u - c.Hu) / scale < 1e-6 &&
                      std::abs(fd_v - c.Hv) / scale < 1e-6;
        }
    }
    check(grad_ok, "gradient/finite-difference consistency");
    out.detail = "additive_exp H3 FAIL with verified witness, pure H2 PASS, coupled H5 PASS, "
                 "FD consistency 1e-6 on 1000 points";
    return out;
}

// ---------------------------------------------------------------- 9
Outcome criterion_mountain_pass() {
    Outcome out;
    Check check{out};
    auto model = NonlinearityModel(ModelKind::PurePower, 1.0, 6.0);

    auto g = make_grid(12.0, 16384);
    StatePair w{gauss(g), gauss(g)};
    const double peak = mountain_pass_upper_bound(w, model, -3.0, 1.0, 1024);
    check(std::abs(peak - 3.0 * kPi / 32.0) < 1e-4, "closed-form path maximum");

    auto cfg = pure_cfg();
    auto rep = solve_ground_state(cfg);
    check(rep.converged, "solver case not converged");
    const double bound = mountain_pass_upper_bound(rep.state, cfg.model, -3.0, 1.0, 1024);
    check(bound >= rep.energy - 1e-6, "path bound below the converged level");
    char buf[160];
    snprintf(buf, sizeof buf, "path max %.8f (want %.8f), bound %.8f >= level %.8f - 1e-6",
             peak, 3.0 * kPi / 32.0, bound, rep.energy);
    out.detail = buf;
    return out;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"criterion-1-gaussian-oracles", criterion_gaussian_oracles},
        {"criterion-2-fiber-calculus", criterion_fiber_calculus},
        {"criterion-3-scaling-identities", criterion_scaling_identities},
        {"criterion-4-solver-stationarity", criterion_solver_stationarity},
        {"criterion-5-level-decay-rate", criterion_level_decay_rate},
        {"criterion-6-level-bounds", criterion_level_bounds},
        {"criterion-7-trudinger-moser", criterion_tm_integral},
        {"criterion-8-auditor", criterion_auditor},
        {"criterion-9-mountain-pass", criterion_mountain_pass},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass)
            ++failures;
    }
    return failures == 0 ? 0 : 1;
}
