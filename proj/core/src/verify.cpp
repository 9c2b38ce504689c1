#include "gs2d/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gs2d/errors.hpp"

namespace gs2d {

namespace {

constexpr double kExpGuard = 700.0;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

double tm_integral(const StatePair& w, double gamma) {
    if (!(gamma > 0.0))
        throw ConfigError("tm_integral needs gamma > 0", "gamma");
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const auto qw = g.weights();
    double acc = 0.0;
    for (size_t k = 0; k < qw.size(); ++k) {
        const double t = wu[k] * wu[k] + wv[k] * wv[k];
        if (gamma * t > kExpGuard)
            throw OverflowError("tm_integral exponent out of range");
        acc += qw[k] * std::expm1(gamma * t);
    }
    return acc;
}

double gn_check(const RadialFunction& u, double p) {
    if (!(p > 2.0))
        throw ConfigError("gn_check needs p > 2", "p");
    const double m2 = mass(u);
    if (!(m2 > 0.0))
        throw DegenerateStateError("gn_check needs a nonzero profile");
    const auto& g = *u.grid();
    const auto vals = u.values();
    const auto qw = g.weights();
    double mp = 0.0;
    for (size_t k = 0; k < qw.size(); ++k)
        mp += qw[k] * std::pow(std::abs(vals[k]), p);
    const double norm_p = std::pow(mp, 1.0 / p);
    const double d_p = 1.0 - 2.0 / p;
    const double grad = std::sqrt(grad_norm_sq(u));
    return norm_p / (std::pow(grad, d_p) * std::pow(std::sqrt(m2), 1.0 - d_p));
}

BoundsReport check_bounds(const SolveReport& report, const SolverConfig& config) {
    if (!report.converged)
        throw ConfigError("refusing to evaluate bounds on a nonconverged report");

    const auto& model = config.model;
    const auto& w = report.state;
    const auto& g = *w.grid();
    const double theta = model.theta();
    const double m_hat = report.energy;
    const double a2 = config.constraint.a * config.constraint.a;
    const double b2 = config.constraint.b * config.constraint.b;
    const double slack = 1e-10;

    const auto fv = functional_values(w, model);

    // pairing-form kinetic term, consistent with the multiplier rows
    double pairing_kinetic = 0.0;
    {
        std::vector<double> lap(static_cast<size_t>(g.size()));
        laplacian_samples(g, w.u.values(), lap);
        for (int k = 0; k < g.size(); ++k)
            pairing_kinetic += g.weight(k) * (-lap[static_cast<size_t>(k)]) * w.u[k];
        laplacian_samples(g, w.v.values(), lap);
        for (int k = 0; k < g.size(); ++k)
            pairing_kinetic += g.weight(k) * (-lap[static_cast<size_t>(k)]) * w.v[k];
    }

    BoundsReport out;
    auto le_check = [&](std::string name, double lhs, double rhs, std::string anchor,
                        bool applicable = true) {
        out.checks.push_back(
            {std::move(name), lhs, rhs, lhs <= rhs + slack, applicable, std::move(anchor)});
    };
    auto pos_check = [&](std::string name, double lhs, std::string anchor) {
        out.checks.push_back({std::move(name), lhs, 0.0, lhs > 0.0, true, std::move(anchor)});
    };

    le_check("potential_bound", fv.potential, 2.0 * m_hat / (theta - 4.0),
             "int H <= 2 m/(theta-4)");
    le_check("gradient_bound", fv.kinetic, 2.0 * (theta - 2.0) * m_hat / (theta - 4.0),
             "|grad w|^2 <= 2(theta-2) m/(theta-4)");
    le_check("tm_window", fv.kinetic,
             2.0 * std::numbers::pi / model.gamma0() - a2 - b2,
             "|grad w|^2 < 2 pi/gamma0 - a^2 - b^2", model.exponential());
    pos_check("multiplier_positive_1", report.lambda1, "lambda_1 > 0");
    pos_check("multiplier_positive_2", report.lambda2, "lambda_2 > 0");
    const double combined = -report.lambda1 * a2 - report.lambda2 * b2;
    le_check("multiplier_combined", std::abs(combined),
             4.0 * (theta - 1.0) * m_hat / (theta - 4.0),
             "|-l1 a^2 - l2 b^2| <= 4(theta-1) m/(theta-4)");
    {
        const double rhs = pairing_kinetic - fv.nl_pairing;
        const double scale = std::max({std::abs(combined), std::abs(rhs), 1e-30});
        out.checks.push_back({"stationarity_identity", combined, rhs,
                              std::abs(combined - rhs) <= 1e-6 * scale, true,
                              "-l1 a^2 - l2 b^2 = <-Delta w, w> - int grad H . w"});
    }
    le_check("admissibility", a2 + b2, 2.0 * std::numbers::pi / model.gamma0(),
             "a^2 + b^2 < 2 pi/gamma0", model.exponential());
    {
        double tm = 0.0;
        bool finite = true;
        try {
            tm = tm_integral(w, 0.9 * model.gamma0());
        } catch (const OverflowError&) {
            finite = false;
        }
        out.checks.push_back({"tm_integral_finite", tm, 0.0, finite && std::isfinite(tm),
                              model.exponential(),
                              "int (e^{0.9 gamma0 |w|^2} - 1) finite"});
    }
    le_check("gn_ratio_u", gn_check(w.u, 4.0), config.verify.gn_cap,
             "|u|_4 ratio below the empirical cap");
    le_check("gn_ratio_v", gn_check(w.v, 4.0), config.verify.gn_cap,
             "|v|_4 ratio below the empirical cap");

    return out;
}

GeometryProbeResult geometry_probe(const SolverConfig& config, double K, int n_samples) {
    if (!(K > 0.0))
        throw ConfigError("geometry probe needs K > 0", "K");
    if (n_samples < 4)
        throw ConfigError("geometry probe needs at least 4 samples", "probe_samples");
    config.validate();

    const GridPtr grid = config.grid.build();
    const auto& model = config.model;
    std::mt19937_64 rng(config.flow.seed ^ 0xa5a5a5a5a5a5a5a5ull);

    GeometryProbeResult out;
    out.K = K;
    out.n_samples = n_samples;
    out.sup_at_K = -std::numeric_limits<double>::infinity();
    out.inf_at_2K = std::numeric_limits<double>::infinity();
    out.j_star = std::numeric_limits<double>::infinity();

    for (int i = 0; i < n_samples; ++i) {
        auto bump = [&](double amp, double width) {
            return RadialFunction::sample(grid,
                                          [=](double r) { return amp * std::exp(-width * r * r); });
        };
        const double au = 0.5 + 1.5 * uniform01(rng);
        const double bu = 0.25 + 0.75 * uniform01(rng);
        const double av = 0.5 + 1.5 * uniform01(rng);
        const double bv = 0.25 + 0.75 * uniform01(rng);
        StatePair w = project_mass({bump(au, bu), bump(av, bv)}, config.constraint);
        const double kin = grad_norm_sq(w.u) + grad_norm_sq(w.v);
        // analytic dilation to each kinetic level: no resampling error,
        // the level is hit exactly
        auto j_at = [&](double level) {
            return fiber_energy(w, model, 0.5 * std::log(level / kin), kin);
        };
        out.sup_at_K = std::max(out.sup_at_K, j_at(K));
        out.inf_at_2K = std::min(out.inf_at_2K, j_at(2.0 * K));
        out.j_star = std::min(out.j_star, j_at(0.5 * K));
    }
    out.pass = out.sup_at_K < out.inf_at_2K && out.j_star > 0.0;
    return out;
}

} // namespace gs2d
