#include "gs2d/functional.hpp"

#include <cmath>
#include <vector>

#include "gs2d/errors.hpp"
#include "interp.hpp"

namespace gs2d {

StatePair::StatePair(RadialFunction u_, RadialFunction v_)
    : u(std::move(u_)), v(std::move(v_)) {
    if (u.grid() != v.grid())
        throw ConfigError("state components must share one grid");
}

FunctionalValues functional_values(const StatePair& w, const NonlinearityModel& model) {
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const auto qw = g.weights();

    double pot = 0.0, tilde = 0.0;
    for (size_t k = 0; k < qw.size(); ++k) {
        const auto c = model.eval(wu[k], wv[k]);
        pot += qw[k] * c.H;
        tilde += qw[k] * c.Ht;
    }

    FunctionalValues out;
    out.kinetic = grad_norm_sq_samples(g, wu) + grad_norm_sq_samples(g, wv);
    out.potential = pot;
    // pairing = int (H~ + 2H); keeps the P identity exact in the stored
    // fields even where the raw pairing integral is ill-conditioned.
    out.nl_pairing = tilde + 2.0 * pot;
    out.J = 0.5 * out.kinetic - pot;
    out.P = out.kinetic - tilde;
    return out;
}

double energy(const StatePair& w, const NonlinearityModel& model) {
    return functional_values(w, model).J;
}

double pohozaev(const StatePair& w, const NonlinearityModel& model) {
    return functional_values(w, model).P;
}

StatePair energy_gradient(const StatePair& w, const NonlinearityModel& model) {
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const size_t n = wu.size();

    std::vector<double> gu(n), gv(n);
    laplacian_samples(g, wu, gu);
    laplacian_samples(g, wv, gv);
    for (size_t k = 0; k < n; ++k) {
        const auto c = model.eval(wu[k], wv[k]);
        gu[k] = -gu[k] - c.Hu;
        gv[k] = -gv[k] - c.Hv;
    }
    // Dirichlet row: the truncation boundary never moves.
    gu[n - 1] = 0.0;
    gv[n - 1] = 0.0;
    return {RadialFunction(w.grid(), std::move(gu)), RadialFunction(w.grid(), std::move(gv))};
}

std::pair<double, double> lagrange_multipliers(const StatePair& w,
                                               const NonlinearityModel& model) {
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const auto qw = g.weights();
    const size_t n = wu.size();

    const double mu_mass = mass(w.u);
    const double mv_mass = mass(w.v);
    if (mu_mass <= 0.0 || mv_mass <= 0.0)
        throw DegenerateStateError("zero-mass component has no multiplier");

    // Discrete pairing <-Delta u, u> rather than |grad u|^2: the two
    // agree only to quadrature consistency, and the multiplier must
    // orthogonalize the residual in the same inner product the flow
    // uses.
    static thread_local std::vector<double> lap;
    lap.resize(n);
    laplacian_samples(g, wu, lap);
    double pair_u = 0.0, hu_u = 0.0;
    for (size_t k = 0; k < n; ++k)
        pair_u += -lap[k] * wu[k] * qw[k];
    laplacian_samples(g, wv, lap);
    double pair_v = 0.0, hv_v = 0.0;
    for (size_t k = 0; k < n; ++k)
        pair_v += -lap[k] * wv[k] * qw[k];
    for (size_t k = 0; k < n; ++k) {
        const auto c = model.eval(wu[k], wv[k]);
        hu_u += qw[k] * c.Hu * wu[k];
        hv_v += qw[k] * c.Hv * wv[k];
    }

    return {-(pair_u - hu_u) / mu_mass, -(pair_v - hv_v) / mv_mass};
}

double fiber_energy(const StatePair& w, const NonlinearityModel& model, double s) {
    return fiber_energy(w, model, s, grad_norm_sq(w.u) + grad_norm_sq(w.v));
}

double fiber_energy(const StatePair& w, const NonlinearityModel& model, double s,
                    double kinetic) {
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const auto qw = g.weights();
    const double es = std::exp(s);
    double pot = 0.0;
    for (size_t k = 0; k < qw.size(); ++k)
        pot += qw[k] * model.eval(es * wu[k], es * wv[k]).H;
    return 0.5 * std::exp(2.0 * s) * kinetic - std::exp(-2.0 * s) * pot;
}

double fiber_derivative(const StatePair& w, const NonlinearityModel& model, double s) {
    return fiber_derivative(w, model, s, grad_norm_sq(w.u) + grad_norm_sq(w.v));
}

double fiber_derivative(const StatePair& w, const NonlinearityModel& model, double s,
                        double kinetic) {
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const auto qw = g.weights();
    const double es = std::exp(s);
    double tilde = 0.0;
    for (size_t k = 0; k < qw.size(); ++k)
        tilde += qw[k] * model.eval(es * wu[k], es * wv[k]).Ht;
    return std::exp(2.0 * s) * kinetic - std::exp(-2.0 * s) * tilde;
}

double fiber_second_derivative(const StatePair& w, const NonlinearityModel& model, double s) {
    const auto& g = *w.grid();
    const auto wu = w.u.values();
    const auto wv = w.v.values();
    const auto qw = g.weights();
    const double kinetic = grad_norm_sq(w.u) + grad_norm_sq(w.v);
    const double es = std::exp(s);
    double tilde = 0.0, grad_tilde = 0.0;
    for (size_t k = 0; k < qw.size(); ++k) {
        const auto c = model.eval(es * wu[k], es * wv[k]);
        tilde += qw[k] * c.Ht;
        grad_tilde += qw[k] * c.grad_Ht_dot_w;
    }
    return 2.0 * std::exp(2.0 * s) * kinetic +
           std::exp(-2.0 * s) * (2.0 * tilde - grad_tilde);
}

StatePair resample_scaled(const StatePair& w, double s, double s_max) {
    if (std::abs(s) > s_max)
        throw ConfigError("dilation parameter exceeds s_max; resampling accuracy degrades",
                          "s_max");
    const auto& g = *w.grid();
    const auto r = g.nodes();
    const double es = std::exp(s);
    const size_t n = r.size();

    auto scale_one = [&](const RadialFunction& f) {
        detail::PchipInterpolant interp(r, f.values());
        std::vector<double> out(n);
        for (size_t k = 0; k < n; ++k)
            out[k] = es * interp(es * r[k]); // 0 past R by the interpolant
        // the truncation boundary stays Dirichlet after materialization
        out[n - 1] = 0.0;
        return RadialFunction(w.grid(), std::move(out));
    };
    return {scale_one(w.u), scale_one(w.v)};
}

} // namespace gs2d
