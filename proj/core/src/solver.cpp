#include "gs2d/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <cstdio>
#include <random>

#include "gs2d/errors.hpp"
#include "interp.hpp"

namespace gs2d {

FiberOptions SolverConfig::fiber_options() const {
    return {flow.s_range, flow.s_scan, 1e-10};
}

ProjectionOptions SolverConfig::projection_options() const {
    return {fiber_options(), flow.tol_pohozaev, 8, flow.s_max};
}

void SolverConfig::validate() const {
    if (!(flow.dt0 > 0.0))
        throw ConfigError("dt0 must be positive", "dt0");
    if (!(flow.tol_grad > 0.0))
        throw ConfigError("tol_grad must be positive", "tol_grad");
    if (!(flow.tol_pohozaev > 0.0))
        throw ConfigError("tol_pohozaev must be positive", "tol_pohozaev");
    if (flow.max_iters < 1)
        throw ConfigError("max_iters must be at least 1", "max_iters");
    if (flow.reproject_every < 1)
        throw ConfigError("reproject_every must be at least 1", "reproject_every");
    if (flow.n_starts < 1)
        throw ConfigError("n_starts must be at least 1", "n_starts");
    if (flow.trail_stride < 1)
        throw ConfigError("trail_stride must be at least 1", "trail_stride");
    if (!(flow.s_scan > 0.0) || !(flow.s_range > flow.s_scan))
        throw ConfigError("fiber scan needs 0 < s_scan < s_range", "s_scan");
    if (!(flow.s_max > 0.0))
        throw ConfigError("s_max must be positive", "s_max");
    grid.build(); // validates R, n, spacing
}

std::optional<std::string> SolverConfig::admissibility_warning() const {
    if (!model.exponential())
        return std::nullopt;
    MassConstraint c{constraint.a, constraint.b, model.gamma0()};
    if (c.admissible())
        return std::nullopt;
    return "mass window violated: a^2 + b^2 = " +
           std::to_string(c.a * c.a + c.b * c.b) + " is not below 2 pi / gamma0 = " +
           std::to_string(2.0 * std::numbers::pi / c.gamma0) +
           "; the compactness window does not apply";
}

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

struct RunResult {
    SolveReport report;
    bool failed_hard = false; // projection/overflow breakdown
    std::string failure;
};

// Damped Newton on the full stationarity system in (u, v, l1, l2):
// the two PDE rows (with a Dirichlet row at r = R) plus the two mass
// constraints. The Jacobian is block-tridiagonal with 2x2 blocks,
// bordered by the multiplier columns; block elimination plus a 2x2
// Schur complement solves it in O(n). Returns true when the residual
// reaches machine scale; inputs are updated only then.
bool newton_polish(const RadialGrid& g, const NonlinearityModel& model,
                   const MassConstraint& c, std::vector<double>& u_io,
                   std::vector<double>& v_io, double& l1_io, double& l2_io) {
    const size_t n = u_io.size();
    const auto r = g.nodes();
    const auto qw = g.weights();
    const double a2 = c.a * c.a;
    const double b2 = c.b * c.b;

    // stencil coefficients of the radial Laplacian
    std::vector<double> Lsub(n, 0.0), Ldia(n, 0.0), Lsup(n, 0.0);
    Ldia[0] = -4.0 / (r[1] * r[1]);
    Lsup[0] = 4.0 / (r[1] * r[1]);
    for (size_t k = 1; k + 1 < n; ++k) {
        const double hm = r[k] - r[k - 1];
        const double hp = r[k + 1] - r[k];
        const double denom = hm * hp * (hm + hp);
        Lsub[k] = (2.0 * hp - hp * hp / r[k]) / denom;
        Ldia[k] = (-2.0 * (hm + hp) + (hp * hp - hm * hm) / r[k]) / denom;
        Lsup[k] = (2.0 * hm + hm * hm / r[k]) / denom;
    }

    std::vector<double> u = u_io, v = v_io;
    double l1 = l1_io, l2 = l2_io;

    auto residual = [&](const std::vector<double>& uu, const std::vector<double>& vv,
                        double la, double lb, std::vector<double>& Fu,
                        std::vector<double>& Fv, double& Fm1, double& Fm2) {
        for (size_t k = 0; k < n; ++k) {
            const double lap_u = (k == 0 ? Ldia[0] * uu[0] + Lsup[0] * uu[1]
                                  : k + 1 == n
                                      ? 0.0
                                      : Lsub[k] * uu[k - 1] + Ldia[k] * uu[k] + Lsup[k] * uu[k + 1]);
            const double lap_v = (k == 0 ? Ldia[0] * vv[0] + Lsup[0] * vv[1]
                                  : k + 1 == n
                                      ? 0.0
                                      : Lsub[k] * vv[k - 1] + Ldia[k] * vv[k] + Lsup[k] * vv[k + 1]);
            const auto cv = model.eval(uu[k], vv[k]);
            Fu[k] = -lap_u + la * uu[k] - cv.Hu;
            Fv[k] = -lap_v + lb * vv[k] - cv.Hv;
        }
        Fu[n - 1] = uu[n - 1];
        Fv[n - 1] = vv[n - 1];
        double m_u = 0.0, m_v = 0.0;
        for (size_t k = 0; k < n; ++k) {
            m_u += qw[k] * uu[k] * uu[k];
            m_v += qw[k] * vv[k] * vv[k];
        }
        Fm1 = 0.5 * (m_u - a2);
        Fm2 = 0.5 * (m_v - b2);
    };
    auto err_of = [&](const std::vector<double>& Fu, const std::vector<double>& Fv,
                      double Fm1, double Fm2) {
        double e = std::max(std::abs(Fm1), std::abs(Fm2));
        for (size_t k = 0; k < n; ++k)
            e = std::max({e, std::abs(Fu[k]), std::abs(Fv[k])});
        return e;
    };

    std::vector<double> Fu(n), Fv(n), tFu(n), tFv(n);
    // block-Thomas storage: per node a 2x2 pivot-inverse and three rhs
    std::vector<double> piv(4 * n);
    std::vector<double> X0u(n), X0v(n), X1u(n), X1v(n), X2u(n), X2v(n);
    std::vector<double> tu(n), tv(n);

    double Fm1 = 0.0, Fm2 = 0.0;
    residual(u, v, l1, l2, Fu, Fv, Fm1, Fm2);
    double err = err_of(Fu, Fv, Fm1, Fm2);

    for (int it = 0; it < 50; ++it) {
        if (!(err > 1e-13))
            break;
        // forward elimination: rows are D_k x_k + sub_k x_{k-1} + sup_k x_{k+1}
        // with sub/sup = -L* I2 and border columns b1 = (u,0), b2 = (0,v)
        for (size_t k = 0; k < n; ++k) {
            double D00, D01, D10, D11;
            if (k + 1 == n) {
                D00 = 1.0; D01 = 0.0; D10 = 0.0; D11 = 1.0;
            } else {
                const auto cv = model.eval(u[k], v[k]);
                D00 = -Ldia[k] + l1 - cv.Huu;
                D01 = -cv.Huv;
                D10 = -cv.Huv;
                D11 = -Ldia[k] + l2 - cv.Hvv;
            }
            double b1u = k + 1 == n ? 0.0 : u[k];
            double b2v = k + 1 == n ? 0.0 : v[k];
            double r0u = Fu[k], r0v = Fv[k];
            double r1u = b1u, r1v = 0.0;
            double r2u = 0.0, r2v = b2v;
            if (k > 0) {
                const double sub = k + 1 == n ? 0.0 : -Lsub[k];
                // D_k -= sub * I2 * (piv_{k-1} applied to sup_{k-1} I2)
                // using stored transformed quantities
                D00 -= sub * piv[4 * (k - 1) + 0];
                D01 -= sub * piv[4 * (k - 1) + 1];
                D10 -= sub * piv[4 * (k - 1) + 2];
                D11 -= sub * piv[4 * (k - 1) + 3];
                r0u -= sub * X0u[k - 1];
                r0v -= sub * X0v[k - 1];
                r1u -= sub * X1u[k - 1];
                r1v -= sub * X1v[k - 1];
                r2u -= sub * X2u[k - 1];
                r2v -= sub * X2v[k - 1];
            }
            const double det = D00 * D11 - D01 * D10;
            if (det == 0.0 || !std::isfinite(det))
                return false;
            const double i00 = D11 / det, i01 = -D01 / det;
            const double i10 = -D10 / det, i11 = D00 / det;
            const double sup = k + 1 >= n ? 0.0 : -Lsup[k];
            // store piv = D^{-1} * sup (the quantity the next row needs)
            piv[4 * k + 0] = i00 * sup;
            piv[4 * k + 1] = i01 * sup;
            piv[4 * k + 2] = i10 * sup;
            piv[4 * k + 3] = i11 * sup;
            X0u[k] = i00 * r0u + i01 * r0v;
            X0v[k] = i10 * r0u + i11 * r0v;
            X1u[k] = i00 * r1u + i01 * r1v;
            X1v[k] = i10 * r1u + i11 * r1v;
            X2u[k] = i00 * r2u + i01 * r2v;
            X2v[k] = i10 * r2u + i11 * r2v;
        }
        // back substitution (sup coupling is diagonal, folded into piv)
        for (size_t k = n - 1; k-- > 0;) {
            X0u[k] -= piv[4 * k + 0] * X0u[k + 1] + piv[4 * k + 1] * X0v[k + 1];
            X0v[k] -= piv[4 * k + 2] * X0u[k + 1] + piv[4 * k + 3] * X0v[k + 1];
            X1u[k] -= piv[4 * k + 0] * X1u[k + 1] + piv[4 * k + 1] * X1v[k + 1];
            X1v[k] -= piv[4 * k + 2] * X1u[k + 1] + piv[4 * k + 3] * X1v[k + 1];
            X2u[k] -= piv[4 * k + 0] * X2u[k + 1] + piv[4 * k + 1] * X2v[k + 1];
            X2v[k] -= piv[4 * k + 2] * X2u[k + 1] + piv[4 * k + 3] * X2v[k + 1];
        }
        // Schur complement over the two mass rows (w u, 0) and (0, w v)
        double R1X0 = 0.0, R1X1 = 0.0, R1X2 = 0.0;
        double R2X0 = 0.0, R2X1 = 0.0, R2X2 = 0.0;
        for (size_t k = 0; k < n; ++k) {
            R1X0 += qw[k] * u[k] * X0u[k];
            R1X1 += qw[k] * u[k] * X1u[k];
            R1X2 += qw[k] * u[k] * X2u[k];
            R2X0 += qw[k] * v[k] * X0v[k];
            R2X1 += qw[k] * v[k] * X1v[k];
            R2X2 += qw[k] * v[k] * X2v[k];
        }
        const double S00 = -R1X1, S01 = -R1X2;
        const double S10 = -R2X1, S11 = -R2X2;
        const double rhs1 = Fm1 - R1X0;
        const double rhs2 = Fm2 - R2X0;
        const double sdet = S00 * S11 - S01 * S10;
        if (sdet == 0.0 || !std::isfinite(sdet))
            return false;
        const double dl1 = (rhs1 * S11 - rhs2 * S01) / sdet;
        const double dl2 = (rhs2 * S00 - rhs1 * S10) / sdet;

        // decrement and damped update
        double step = 1.0;
        bool stepped = false;
        while (step > 1e-7) {
            for (size_t k = 0; k < n; ++k) {
                tu[k] = u[k] - step * (X0u[k] - dl1 * X1u[k] - dl2 * X2u[k]);
                tv[k] = v[k] - step * (X0v[k] - dl1 * X1v[k] - dl2 * X2v[k]);
            }
            const double tl1 = l1 - step * dl1;
            const double tl2 = l2 - step * dl2;
            double tFm1, tFm2;
            bool ok = true;
            try {
                residual(tu, tv, tl1, tl2, tFu, tFv, tFm1, tFm2);
            } catch (const OverflowError&) {
                ok = false;
            }
            if (ok) {
                const double t_err = err_of(tFu, tFv, tFm1, tFm2);
                if (std::isfinite(t_err) && t_err <= (1.0 - 0.25 * step) * err) {
                    std::swap(u, tu);
                    std::swap(v, tv);
                    l1 = tl1;
                    l2 = tl2;
                    std::swap(Fu, tFu);
                    std::swap(Fv, tFv);
                    Fm1 = tFm1;
                    Fm2 = tFm2;
                    err = t_err;
                    stepped = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!stepped)
            break; // rounding floor reached; judge by the scale below
    }
    // success threshold scales with the rounding floor of the stiffest
    // residual rows (Laplacian magnitude times state amplitude)
    double amp = 1.0;
    for (size_t k = 0; k < n; ++k)
        amp = std::max({amp, std::abs(u[k]), std::abs(v[k])});
    const double h0 = r[1] - r[0];
    const double floor_scale = 4.0 / (h0 * h0) * amp;
    if (!(err <= std::max(1e-11, 1e-12 * floor_scale)))
        return false;
    u_io = std::move(u);
    v_io = std::move(v);
    l1_io = l1;
    l2_io = l2;
    return true;
}

// One projected-gradient-flow run. Deterministic given the initial
// state and parameters; all work buffers are local.
RunResult run_flow(const GridPtr& grid, const NonlinearityModel& model,
                   const MassConstraint& c, const FlowParams& p, StatePair w0,
                   int start_index, int initial_event = 0) {
    const auto& g = *grid;
    const size_t n = static_cast<size_t>(g.size());
    const auto qw = g.weights();
    const double a2 = c.a * c.a;
    const double b2 = c.b * c.b;

    std::vector<double> u(w0.u.values().begin(), w0.u.values().end());
    std::vector<double> v(w0.v.values().begin(), w0.v.values().end());
    std::vector<double> lap_u(n), lap_v(n), gu(n), gv(n), tu(n), tv(n), tgu(n), tgv(n);

    const ProjectionOptions proj{{p.s_range, p.s_scan, 1e-10}, p.tol_pohozaev, 8, p.s_max};

    const double dt_cap = 4.0;

    // Prefactored tridiagonal I - Delta_h for the smoothed descent
    // direction: the raw residual step is CFL-bound (dt ~ h^2), far too
    // slow at production grids, while the smoothed direction shares its
    // stationary points and admits O(1) steps.
    std::vector<double> m_sub(n), m_diag(n), m_super(n);
    {
        const auto r = g.nodes();
        m_diag[0] = 1.0 + 4.0 / (r[1] * r[1]);
        m_super[0] = -4.0 / (r[1] * r[1]);
        m_sub[0] = 0.0;
        for (size_t k = 1; k + 1 < n; ++k) {
            const double hm = r[k] - r[k - 1];
            const double hp = r[k + 1] - r[k];
            const double denom = hm * hp * (hm + hp);
            const double c_sub = (2.0 * hp - hp * hp / r[k]) / denom;
            const double c_diag = (-2.0 * (hm + hp) + (hp * hp - hm * hm) / r[k]) / denom;
            const double c_super = (2.0 * hm + hm * hm / r[k]) / denom;
            m_sub[k] = -c_sub;
            m_diag[k] = 1.0 - c_diag;
            m_super[k] = -c_super;
        }
        m_sub[n - 1] = 0.0;
        m_diag[n - 1] = 1.0; // Dirichlet row
        m_super[n - 1] = 0.0;
    }
    // Thomas prefactorization (no pivoting; rows are diagonally dominant)
    std::vector<double> th_c(n), th_inv(n);
    {
        th_inv[0] = 1.0 / m_diag[0];
        th_c[0] = m_super[0] * th_inv[0];
        for (size_t k = 1; k < n; ++k) {
            th_inv[k] = 1.0 / (m_diag[k] - m_sub[k] * th_c[k - 1]);
            th_c[k] = m_super[k] * th_inv[k];
        }
    }
    std::vector<double> du(n), dv(n), th_tmp(n);
    auto smooth_solve = [&](const std::vector<double>& rhs, std::vector<double>& out) {
        th_tmp[0] = rhs[0] * th_inv[0];
        for (size_t k = 1; k < n; ++k)
            th_tmp[k] = (rhs[k] - m_sub[k] * th_tmp[k - 1]) * th_inv[k];
        out[n - 1] = th_tmp[n - 1];
        for (size_t k = n - 1; k-- > 0;)
            out[k] = th_tmp[k] - th_c[k] * out[k + 1];
    };

    struct Diag {
        double J, P, kinetic, gnorm, l1, l2;
    };

    std::vector<double> dir_raw(n), dir_res(n), dir_mass(n), tan_u(n), tan_v(n);
    auto dot_w = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double acc = 0.0;
        for (size_t k = 0; k < n; ++k)
            acc += qw[k] * x[k] * y[k];
        return acc;
    };
    // Smoothed descent direction. Two pitfalls make the naive choice
    // (smooth the multiplier-corrected residual) freeze at spurious
    // fixed points: smoothing reintroduces a mass component that the
    // mass projection cancels, and the leftover can align with the
    // fiber tangent that the Pohozaev retraction cancels. So the
    // multipliers are recomputed in the smoothed pairing and the fiber
    // tangent is projected out. Equilibria of what remains satisfy the
    // full stationarity system: pairing the combined step with the
    // fiber tangent isolates the constraint multiplier, and the fiber
    // curvature is strictly negative there, so that multiplier is zero.
    auto build_directions = [&](const std::vector<double>& uu, const std::vector<double>& vv,
                                const Diag& dg) {
        auto one = [&](const std::vector<double>& comp, const std::vector<double>& resid_g,
                       double resid_lambda, std::vector<double>& out) {
            for (size_t k = 0; k < n; ++k)
                dir_raw[k] = resid_g[k] - resid_lambda * comp[k];
            smooth_solve(dir_raw, dir_res);
            smooth_solve(comp, dir_mass);
            const double lam = -dot_w(dir_res, comp) / dot_w(dir_mass, comp);
            for (size_t k = 0; k < n; ++k)
                out[k] = dir_res[k] + lam * dir_mass[k];
        };
        one(uu, gu, dg.l1, du);
        one(vv, gv, dg.l2, dv);

        // fiber tangent (u + r u', v + r v'), mass components removed
        const auto r = g.nodes();
        derivative_samples(g, uu, dir_raw);
        for (size_t k = 0; k < n; ++k)
            tan_u[k] = uu[k] + r[k] * dir_raw[k];
        derivative_samples(g, vv, dir_raw);
        for (size_t k = 0; k < n; ++k)
            tan_v[k] = vv[k] + r[k] * dir_raw[k];
        tan_u[n - 1] = 0.0;
        tan_v[n - 1] = 0.0;
        const double cu = dot_w(tan_u, uu) / (c.a * c.a);
        const double cv = dot_w(tan_v, vv) / (c.b * c.b);
        for (size_t k = 0; k < n; ++k) {
            tan_u[k] -= cu * uu[k];
            tan_v[k] -= cv * vv[k];
        }
        const double tt = dot_w(tan_u, tan_u) + dot_w(tan_v, tan_v);
        if (tt > 0.0) {
            const double beta = (dot_w(du, tan_u) + dot_w(dv, tan_v)) / tt;
            for (size_t k = 0; k < n; ++k) {
                du[k] -= beta * tan_u[k];
                dv[k] -= beta * tan_v[k];
            }
        }
    };

    RunResult out{SolveReport{StatePair{RadialFunction(grid, u), RadialFunction(grid, v)}},
                  false,
                  {}};
    SolveReport& rep = out.report;
    rep.start_index = start_index;

    // Residual, multipliers and functionals of (uu, vv); fills (ggu, ggv).
    auto diagnostics = [&](const std::vector<double>& uu, const std::vector<double>& vv,
                           std::vector<double>& ggu, std::vector<double>& ggv) {
        laplacian_samples(g, uu, lap_u);
        laplacian_samples(g, vv, lap_v);
        double pot = 0.0, tilde = 0.0, hu_u = 0.0, hv_v = 0.0, pair_u = 0.0, pair_v = 0.0;
        for (size_t k = 0; k < n; ++k) {
            const auto cv = model.eval(uu[k], vv[k]);
            ggu[k] = cv.Hu; // stash H_u pointwise
            ggv[k] = cv.Hv;
            pot += qw[k] * cv.H;
            tilde += qw[k] * cv.Ht;
            hu_u += qw[k] * cv.Hu * uu[k];
            hv_v += qw[k] * cv.Hv * vv[k];
            pair_u += qw[k] * (-lap_u[k]) * uu[k];
            pair_v += qw[k] * (-lap_v[k]) * vv[k];
        }
        Diag d;
        d.kinetic = grad_norm_sq_samples(g, uu) + grad_norm_sq_samples(g, vv);
        d.J = 0.5 * d.kinetic - pot;
        d.P = d.kinetic - tilde;
        d.l1 = -(pair_u - hu_u) / a2;
        d.l2 = -(pair_v - hv_v) / b2;
        double gnorm2 = 0.0;
        for (size_t k = 0; k < n; ++k) {
            ggu[k] = -lap_u[k] + d.l1 * uu[k] - ggu[k];
            ggv[k] = -lap_v[k] + d.l2 * vv[k] - ggv[k];
        }
        ggu[n - 1] = 0.0;
        ggv[n - 1] = 0.0;
        for (size_t k = 0; k < n; ++k)
            gnorm2 += qw[k] * (ggu[k] * ggu[k] + ggv[k] * ggv[k]);
        d.gnorm = std::sqrt(gnorm2);
        if (!std::isfinite(d.J) || !std::isfinite(d.gnorm))
            throw DegenerateStateError("flow produced non-finite values");
        return d;
    };

    // Pull (tu, tv) back to the Pohozaev set along the discrete fiber
    // tangent (u + r u', v + r v') with Newton steps on P. Unlike the
    // resample-based projection this is smooth in the state, so the
    // flow's inner loop injects no interpolation noise.
    std::vector<double> ret_tu(n), ret_tv(n), ret_d(n);
    auto retract_to_pohozaev = [&]() {
        const auto r = g.nodes();
        for (int round = 0; round < 8; ++round) {
            double pot = 0.0, tilde = 0.0, grad_tilde = 0.0;
            for (size_t k = 0; k < n; ++k) {
                const auto cv = model.eval(tu[k], tv[k]);
                pot += qw[k] * cv.H;
                tilde += qw[k] * cv.Ht;
                grad_tilde += qw[k] * cv.grad_Ht_dot_w;
            }
            const double kin = grad_norm_sq_samples(g, tu) + grad_norm_sq_samples(g, tv);
            const double P = kin - tilde;
            if (std::abs(P) <= p.tol_pohozaev * kin)
                return true;
            // slope of P along the fiber tangent at s = 0
            const double slope = 2.0 * kin + 2.0 * tilde - grad_tilde;
            if (!(slope < 0.0))
                return false;
            double alpha = std::clamp(-P / slope, -0.25, 0.25);
            derivative_samples(g, tu, ret_d);
            for (size_t k = 0; k < n; ++k)
                ret_tu[k] = tu[k] + alpha * (tu[k] + r[k] * ret_d[k]);
            derivative_samples(g, tv, ret_d);
            for (size_t k = 0; k < n; ++k)
                ret_tv[k] = tv[k] + alpha * (tv[k] + r[k] * ret_d[k]);
            ret_tu[n - 1] = 0.0;
            ret_tv[n - 1] = 0.0;
            double m_u = 0.0, m_v = 0.0;
            for (size_t k = 0; k < n; ++k) {
                m_u += qw[k] * ret_tu[k] * ret_tu[k];
                m_v += qw[k] * ret_tv[k] * ret_tv[k];
            }
            if (!(m_u > 0.0) || !(m_v > 0.0))
                return false;
            const double su = c.a / std::sqrt(m_u);
            const double sv = c.b / std::sqrt(m_v);
            for (size_t k = 0; k < n; ++k) {
                tu[k] = su * ret_tu[k];
                tv[k] = sv * ret_tv[k];
            }
        }
        double tilde = 0.0;
        for (size_t k = 0; k < n; ++k)
            tilde += qw[k] * model.eval(tu[k], tv[k]).Ht;
        const double kin = grad_norm_sq_samples(g, tu) + grad_norm_sq_samples(g, tv);
        return std::abs(kin - tilde) <= p.tol_pohozaev * kin;
    };

    // (u,v) - dt (du,dv), mass-projected into (tu, tv); optionally
    // pulled back to the Pohozaev set so candidate steps are compared
    // where the energy is bounded below
    auto trial_state = [&](double dt, bool pohozaev_projection) {
        for (size_t k = 0; k < n; ++k) {
            tu[k] = u[k] - dt * du[k];
            tv[k] = v[k] - dt * dv[k];
        }
        double m_u = 0.0, m_v = 0.0;
        for (size_t k = 0; k < n; ++k) {
            m_u += qw[k] * tu[k] * tu[k];
            m_v += qw[k] * tv[k] * tv[k];
        }
        if (!(m_u > 0.0) || !(m_v > 0.0))
            throw DegenerateStateError("flow step collapsed a component");
        const double su = c.a / std::sqrt(m_u);
        const double sv = c.b / std::sqrt(m_v);
        for (size_t k = 0; k < n; ++k) {
            tu[k] *= su;
            tv[k] *= sv;
        }
        if (pohozaev_projection && !retract_to_pohozaev())
            throw ProjectionError("tangent retraction did not reach tolerance");
    };

    auto reproject = [&]() {
        StatePair cur{RadialFunction(grid, u), RadialFunction(grid, v)};
        StatePair proj_state = project_pohozaev(cur, model, proj);
        std::copy(proj_state.u.values().begin(), proj_state.u.values().end(), u.begin());
        std::copy(proj_state.v.values().begin(), proj_state.v.values().end(), v.begin());
    };

    double dt = std::min(p.dt0, dt_cap);
    try {
        reproject(); // start on the constraint set
        Diag d = diagnostics(u, v, gu, gv);
        build_directions(u, v, d);
        double gnorm_window = d.gnorm;
        int last_newton_iter = -100;
        if (d.gnorm <= 0.5)
            last_newton_iter = -25; // prolonged/warm starts: try Newton at once
        int next_event = initial_event;
        for (int iter = 0;; ++iter) {
            if (iter % p.trail_stride == 0)
                rep.trail.push_back({d.J, std::abs(d.P), d.gnorm, d.kinetic, next_event});
            next_event = 0;

            rep.iterations = iter;
            rep.energy = d.J;
            rep.pohozaev_residual = std::abs(d.P);
            rep.grad_residual = d.gnorm;
            rep.kinetic = d.kinetic;
            rep.lambda1 = d.l1;
            rep.lambda2 = d.l2;

            if (d.gnorm <= p.tol_grad && std::abs(d.P) <= p.tol_pohozaev * d.kinetic) {
                rep.converged = true;
                break;
            }
            if (iter >= p.max_iters)
                break;

            // Hand over to the Newton endgame near stationarity or when
            // the flow stagnates: the constrained ground state is a
            // saddle of J on the torus, and descent alone cannot push
            // the residual to machine scale.
            bool attempt_newton = d.gnorm <= 1e-3 && iter >= last_newton_iter + 5;
            if (!attempt_newton && d.gnorm <= 0.5 && iter >= last_newton_iter + 25)
                attempt_newton = true;
            if (!attempt_newton && iter >= 25 && iter >= last_newton_iter + 25 &&
                iter % 25 == 0) {
                attempt_newton = d.gnorm > 0.92 * gnorm_window;
                gnorm_window = d.gnorm;
            }
            if (attempt_newton) {
                last_newton_iter = iter;
                std::vector<double> nu = u, nv = v;
                double nl1 = d.l1, nl2 = d.l2;
                if (newton_polish(g, model, c, nu, nv, nl1, nl2)) {
                    u = std::move(nu);
                    v = std::move(nv);
                    // pin the masses exactly; Newton leaves them at
                    // machine-residual level
                    double m_u = 0.0, m_v = 0.0;
                    for (size_t k = 0; k < n; ++k) {
                        m_u += qw[k] * u[k] * u[k];
                        m_v += qw[k] * v[k] * v[k];
                    }
                    const double su = c.a / std::sqrt(m_u);
                    const double sv = c.b / std::sqrt(m_v);
                    for (size_t k = 0; k < n; ++k) {
                        u[k] *= su;
                        v[k] *= sv;
                    }
                    d = diagnostics(u, v, gu, gv);
                    build_directions(u, v, d);
                    next_event = 1;
                    if (d.gnorm <= p.tol_grad && std::abs(d.P) > p.tol_pohozaev * d.kinetic) {
                        // stationary to machine precision, but the
                        // identity defect of this grid exceeds the
                        // requested tolerance; flowing on cannot fix
                        // that, so stop honestly
                        rep.iterations = iter + 1;
                        rep.energy = d.J;
                        rep.pohozaev_residual = std::abs(d.P);
                        rep.grad_residual = d.gnorm;
                        rep.kinetic = d.kinetic;
                        rep.lambda1 = d.l1;
                        rep.lambda2 = d.l2;
                        rep.warnings.push_back(
                            "stationary state reached but |P| exceeds tol_pohozaev * kinetic; "
                            "the Pohozaev identity defect is grid-limited (refine n or enlarge r)");
                        break;
                    }
                    continue;
                }
            }

            // smoothed descent step; backtrack on the projected energy
            // plus a residual-growth guard against instability
            const bool project_this_iter = (iter + 1) % p.reproject_every == 0;
            // displacement cap: one step moves the state by at most a
            // quarter of its norm, whatever the raw direction size
            double dir_norm2 = 0.0;
            for (size_t k = 0; k < n; ++k)
                dir_norm2 += qw[k] * (du[k] * du[k] + dv[k] * dv[k]);
            const double dt_len =
                0.25 * std::sqrt(a2 + b2) / (std::sqrt(dir_norm2) + 1e-30);
            double dt_try = std::min({2.0 * dt, dt_cap, dt_len});
            bool accepted = false;
            Diag d_try{};
            while (dt_try >= 1e-16) {
                try {
                    trial_state(dt_try, project_this_iter);
                    d_try = diagnostics(tu, tv, tgu, tgv);
                } catch (const OverflowError&) {
                    dt_try *= 0.5; // guard tripped: clamp the step
                    continue;
                } catch (const DegenerateStateError&) {
                    dt_try *= 0.5;
                    continue;
                } catch (const NoMaximizerError&) {
                    dt_try *= 0.5; // candidate left the projectable region
                    continue;
                } catch (const ProjectionError&) {
                    dt_try *= 0.5;
                    continue;
                }
                const bool energy_ok = d_try.J <= d.J + 1e-12;
                const bool growth_ok = d_try.gnorm <= 1.25 * d.gnorm + 1e-9;
                if (energy_ok && growth_ok) {
                    accepted = true;
                    break;
                }
                dt_try *= 0.5;
            }
            if (!accepted) {
                // last resort before giving up: the stall state is the
                // flow's best approach to the saddle
                std::vector<double> nu = u, nv = v;
                double nl1 = d.l1, nl2 = d.l2;
                if (newton_polish(g, model, c, nu, nv, nl1, nl2)) {
                    u = std::move(nu);
                    v = std::move(nv);
                    double m_u = 0.0, m_v = 0.0;
                    for (size_t k = 0; k < n; ++k) {
                        m_u += qw[k] * u[k] * u[k];
                        m_v += qw[k] * v[k] * v[k];
                    }
                    const double su = c.a / std::sqrt(m_u);
                    const double sv = c.b / std::sqrt(m_v);
                    for (size_t k = 0; k < n; ++k) {
                        u[k] *= su;
                        v[k] *= sv;
                    }
                    d = diagnostics(u, v, gu, gv);
                    build_directions(u, v, d);
                    next_event = 1;
                    dt = dt_cap * 0.25;
                    continue;
                }
                break; // stalled; report the residual reached
            }
            std::swap(u, tu);
            std::swap(v, tv);
            std::swap(gu, tgu);
            std::swap(gv, tgv);
            d = d_try;
            dt = dt_try;
            build_directions(u, v, d);
        }
    } catch (const std::exception& e) {
        out.failed_hard = true;
        out.failure = e.what();
        rep.converged = false;
    }

    // nontriviality: projection pins the masses, so only degenerate
    // breakdowns can zero a component
    double max_u = 0.0, max_v = 0.0;
    for (size_t k = 0; k < n; ++k) {
        max_u = std::max(max_u, std::abs(u[k]));
        max_v = std::max(max_v, std::abs(v[k]));
    }
    if (!(max_u > 0.0) || !(max_v > 0.0))
        rep.converged = false;

    rep.state = StatePair{RadialFunction(grid, std::move(u)), RadialFunction(grid, std::move(v))};
    return out;
}

StatePair gaussian_start(const GridPtr& grid, const MassConstraint& c, std::uint64_t seed,
                         int start_index) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(start_index + 1)));
    const auto& g = *grid;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double au = uniform(rng, 0.5, 2.0);
        const double bu = uniform(rng, 0.25, 1.0);
        const double av = uniform(rng, 0.5, 2.0);
        const double bv = uniform(rng, 0.25, 1.0);
        std::vector<double> u(static_cast<size_t>(g.size())), v(static_cast<size_t>(g.size()));
        for (int k = 0; k < g.size(); ++k) {
            const double r = g.node(k);
            u[static_cast<size_t>(k)] = au * std::exp(-bu * r * r);
            v[static_cast<size_t>(k)] = av * std::exp(-bv * r * r);
        }
        u.back() = 0.0;
        v.back() = 0.0;
        StatePair w{RadialFunction(grid, std::move(u)), RadialFunction(grid, std::move(v))};
        if (mass(w.u) > 0.0 && mass(w.v) > 0.0)
            return project_mass(w, c);
        // degenerate draw: redraw with fresh parameters
    }
    throw DegenerateStateError("could not draw a nondegenerate start");
}

// Fraction of the total mass sitting in the outer 10% of the ball; a
// noticeable value means the truncation radius is clipping the state.
double tail_mass_fraction(const StatePair& w) {
    const auto& g = *w.grid();
    const double r_cut = 0.9 * g.R();
    double outer = 0.0, total = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        const double cell =
            g.weight(k) * (w.u[k] * w.u[k] + w.v[k] * w.v[k]);
        total += cell;
        if (g.node(k) >= r_cut)
            outer += cell;
    }
    return total > 0.0 ? outer / total : 0.0;
}

void append_tail_diagnostic(SolveReport& rep) {
    const double frac = tail_mass_fraction(rep.state);
    if (frac > 1e-6) {
        char buf[128];
        snprintf(buf, sizeof buf,
                 "tail-mass diagnostic: %.3e of the mass lies in the outer 10%% of the "
                 "ball; consider enlarging r",
                 frac);
        rep.warnings.push_back(buf);
    }
}

} // namespace

SolveReport solve_from_state(const SolverConfig& config, const StatePair& initial,
                             int start_index) {
    config.validate();
    auto out = run_flow(initial.grid(), config.model, config.constraint, config.flow,
                        project_mass(initial, config.constraint), start_index);
    if (out.failed_hard)
        out.report.warnings.push_back("run aborted: " + out.failure);
    if (auto warn = config.admissibility_warning())
        out.report.warnings.push_back(*warn);
    append_tail_diagnostic(out.report);
    return std::move(out.report);
}

namespace {

// PCHIP prolongation of a state onto a finer grid of the same radius.
StatePair prolong_state(const StatePair& w, const GridPtr& fine) {
    const auto rc = w.grid()->nodes();
    const auto rf = fine->nodes();
    detail::PchipInterpolant iu(rc, w.u.values());
    detail::PchipInterpolant iv(rc, w.v.values());
    std::vector<double> fu(rf.size()), fv(rf.size());
    for (size_t k = 0; k < rf.size(); ++k) {
        fu[k] = iu(rf[k]);
        fv[k] = iv(rf[k]);
    }
    fu.back() = 0.0;
    fv.back() = 0.0;
    return {RadialFunction(fine, std::move(fu)), RadialFunction(fine, std::move(fv))};
}

// Nested iteration: the flow runs on a coarse grid where it is cheap
// and reliable; each finer level starts from the prolonged state and
// is finished by the Newton endgame.
RunResult run_hierarchical(const SolverConfig& config, const GridPtr& target, int start_index) {
    std::vector<int> ladder{config.grid.n};
    while (ladder.back() > 321)
        ladder.push_back(ladder.back() / 2 + 1);
    std::reverse(ladder.begin(), ladder.end());

    GridPtr level_grid =
        ladder.size() == 1 ? target
                           : make_grid(config.grid.r, ladder.front(), config.grid.spacing);
    auto w0 = gaussian_start(level_grid, config.constraint, config.flow.seed, start_index);
    FlowParams coarse_flow = config.flow;
    coarse_flow.max_iters = std::min(config.flow.max_iters, 20000);
    coarse_flow.tol_pohozaev = std::max(config.flow.tol_pohozaev, 1e-2);
    RunResult result = run_flow(level_grid, config.model, config.constraint,
                                ladder.size() == 1 ? config.flow : coarse_flow,
                                std::move(w0), start_index);

    for (size_t li = 1; li < ladder.size(); ++li) {
        const bool last = li + 1 == ladder.size();
        GridPtr next = last ? target
                            : make_grid(config.grid.r, ladder[li], config.grid.spacing);
        StatePair guess =
            project_mass(prolong_state(result.report.state, next), config.constraint);
        FlowParams fp = config.flow;
        if (!last) {
            fp.max_iters = std::min(config.flow.max_iters, 20000);
            fp.tol_pohozaev = std::max(config.flow.tol_pohozaev, 1e-2);
        }
        auto trail = std::move(result.report.trail);
        result = run_flow(next, config.model, config.constraint, fp, std::move(guess),
                          start_index, 2);
        trail.insert(trail.end(), result.report.trail.begin(), result.report.trail.end());
        result.report.trail = std::move(trail);
    }
    return result;
}

} // namespace

SolveReport solve_ground_state(const SolverConfig& config) {
    config.validate();
    const GridPtr grid = config.grid.build();

    const int n_starts = config.flow.n_starts;
    std::vector<std::future<RunResult>> futures;
    futures.reserve(static_cast<size_t>(n_starts));
    for (int i = 0; i < n_starts; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
            return run_hierarchical(config, grid, i);
        }));
    }
    std::vector<RunResult> results;
    results.reserve(static_cast<size_t>(n_starts));
    for (auto& f : futures)
        results.push_back(f.get());

    // winner: converged run of least energy; ties to the lowest index
    int winner = -1;
    for (int i = 0; i < n_starts; ++i) {
        if (!results[static_cast<size_t>(i)].report.converged)
            continue;
        if (winner < 0 ||
            results[static_cast<size_t>(i)].report.energy <
                results[static_cast<size_t>(winner)].report.energy - 1e-10)
            winner = i;
    }
    if (winner < 0) {
        int best = 0;
        for (int i = 1; i < n_starts; ++i)
            if (results[static_cast<size_t>(i)].report.grad_residual <
                results[static_cast<size_t>(best)].report.grad_residual)
                best = i;
        throw NonConvergenceError("no start converged within max_iters",
                                  std::move(results[static_cast<size_t>(best)].report));
    }

    SolveReport rep = std::move(results[static_cast<size_t>(winner)].report);
    if (auto warn = config.admissibility_warning())
        rep.warnings.push_back(*warn);
    append_tail_diagnostic(rep);
    return rep;
}

double mountain_pass_upper_bound(const StatePair& w0, const NonlinearityModel& model,
                                 double s1, double s2, int m) {
    if (m < 16)
        throw ConfigError("path resolution must be at least 16", "m");
    const double kinetic = grad_norm_sq(w0.u) + grad_norm_sq(w0.v);
    const double e1 = fiber_energy(w0, model, s1, kinetic);
    const double e2 = fiber_energy(w0, model, s2, kinetic);
    if (!(e1 > 0.0))
        throw InvalidPathError("path start must have positive energy");
    if (!(e2 < 0.0))
        throw InvalidPathError("path end must have negative energy");

    double peak = std::max(e1, e2);
    for (int i = 1; i < m; ++i) {
        const double t = static_cast<double>(i) / m;
        peak = std::max(peak, fiber_energy(w0, model, (1.0 - t) * s1 + t * s2, kinetic));
    }
    return peak;
}

SweepResult sweep_mu(const SolverConfig& config, const std::vector<double>& mu_values) {
    if (mu_values.size() < 4)
        throw ConfigError("sweep needs at least 4 mu values", "mu");
    for (size_t i = 0; i < mu_values.size(); ++i) {
        if (!(mu_values[i] > 0.0))
            throw ConfigError("mu values must be positive", "mu");
        if (i > 0 && !(mu_values[i] > mu_values[i - 1]))
            throw ConfigError("mu values must be strictly ascending", "mu");
    }

    SweepResult out;
    if (mu_values.back() / mu_values.front() < 8.0)
        out.warnings.push_back("mu span below one decade; the fitted slope may be noisy");

    std::optional<StatePair> prev;
    for (double mu : mu_values) {
        SolverConfig cfg = config;
        cfg.model = config.model.with_mu(mu);
        SweepRow row;
        row.mu = mu;
        try {
            SolveReport rep = prev ? solve_from_state(cfg, *prev)
                                   : solve_ground_state(cfg);
            if (!rep.converged && prev)
                rep = solve_ground_state(cfg); // warm start failed; retry cold
            if (!rep.converged)
                throw NonConvergenceError("sweep entry did not converge", rep);
            row.energy = rep.energy;
            row.lambda1 = rep.lambda1;
            row.lambda2 = rep.lambda2;
            row.converged = true;
            prev = rep.state;
        } catch (const NonConvergenceError& e) {
            row.energy = e.best().energy;
            row.lambda1 = e.best().lambda1;
            row.lambda2 = e.best().lambda2;
            row.converged = false;
        }
        out.rows.push_back(row);
    }

    // log-log least squares over the converged rows
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& row : out.rows) {
        if (!row.converged || !(row.energy > 0.0))
            continue;
        const double x = std::log(row.mu);
        const double y = std::log(row.energy);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double denom = cnt * sxx - sx * sx;
        if (denom > 0.0) {
            out.slope = (cnt * sxy - sx * sy) / denom;
            out.slope_valid = true;
        }
    }
    out.complete = std::all_of(out.rows.begin(), out.rows.end(),
                               [](const SweepRow& r) { return r.converged; });
    return out;
}

} // namespace gs2d
