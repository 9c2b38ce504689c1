#include "gs2d/nonlinearity.hpp"

#include <cmath>
#include <string>

#include "gs2d/errors.hpp"

namespace gs2d {

namespace {

constexpr double kExpGuard = 700.0;

// x^k by repeated squaring; used when the exponent is a small integer.
double powi(double x, int k) {
    double acc = 1.0;
    double base = x;
    while (k > 0) {
        if (k & 1)
            acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

int as_small_int(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12 && r >= 1.0 && r <= 64.0)
        return static_cast<int>(r);
    return -1;
}

} // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::PurePower: return "pure_power";
    case ModelKind::CoupledExp: return "coupled_exp";
    case ModelKind::AdditiveExp: return "additive_exp";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "pure_power") return ModelKind::PurePower;
    if (name == "coupled_exp") return ModelKind::CoupledExp;
    if (name == "additive_exp") return ModelKind::AdditiveExp;
    throw ConfigError("unknown model kind '" + std::string(name) + "'", "kind");
}

NonlinearityModel::NonlinearityModel(ModelKind kind, double mu, double sigma, double gamma0,
                                     std::optional<double> theta, std::optional<double> tau)
    : kind_(kind), mu_(mu), sigma_(sigma), gamma0_(gamma0),
      theta_(theta.value_or(sigma)), tau_(tau.value_or(sigma - 1.0)) {
    if (!(mu_ >= 0.0) || !std::isfinite(mu_))
        throw ConfigError("mu must be nonnegative", "mu");
    if (!(sigma_ > 4.0))
        throw ConfigError("sigma must exceed 4", "sigma");
    if (!(gamma0_ > 0.0))
        throw ConfigError("gamma0 must be positive", "gamma0");
    if (!(theta_ > 4.0))
        throw ConfigError("theta must exceed 4", "theta");
    if (!(tau_ > 3.0))
        throw ConfigError("tau must exceed 3", "tau");
    half_sigma_int_ = as_small_int(0.5 * sigma_);
    sigma_int_ = as_small_int(sigma_);
}

CouplingValues NonlinearityModel::eval(double u, double v) const {
    CouplingValues c;
    const double t = u * u + v * v;
    if (t == 0.0)
        return c;

    switch (kind_) {
    case ModelKind::PurePower: {
        // H = mu t^{sigma/2}; grad H . w = sigma H.
        const double tp = half_sigma_int_ > 0 ? powi(t, half_sigma_int_)
                                              : std::pow(t, 0.5 * sigma_);
        c.H = mu_ * tp;
        const double common = sigma_ * c.H / t;
        c.Hu = common * u;
        c.Hv = common * v;
        c.Ht = (sigma_ - 2.0) * c.H;
        c.grad_Ht_dot_w = sigma_ * (sigma_ - 2.0) * c.H;
        const double cross = (sigma_ - 2.0) * common / t;
        c.Huu = cross * u * u + common;
        c.Hvv = cross * v * v + common;
        c.Huv = cross * u * v;
        return c;
    }
    case ModelKind::CoupledExp: {
        if (gamma0_ * t > kExpGuard)
            throw OverflowError("nonlinearity exponent out of range");
        const double E = std::exp(gamma0_ * t);
        const double au = std::abs(u), av = std::abs(v);
        const double mu_pow = half_sigma_int_ > 0 ? powi(au, half_sigma_int_)
                                                  : std::pow(au, 0.5 * sigma_);
        const double mv_pow = half_sigma_int_ > 0 ? powi(av, half_sigma_int_)
                                                  : std::pow(av, 0.5 * sigma_);
        c.H = mu_ * mu_pow * mv_pow * E;
        // d|u|^{s/2}/du = (s/2)|u|^{s/2}/u away from u = 0 and -> 0 at it.
        const double du = u != 0.0 ? 0.5 * sigma_ * mu_pow / u : 0.0;
        const double dv = v != 0.0 ? 0.5 * sigma_ * mv_pow / v : 0.0;
        c.Hu = mu_ * E * du * mv_pow + 2.0 * gamma0_ * u * c.H;
        c.Hv = mu_ * E * mu_pow * dv + 2.0 * gamma0_ * v * c.H;
        // logarithmic-derivative form: H_u = H (s/(2u) + 2 g0 u), so
        // H_uu = H [(s/(2u) + 2 g0 u)^2 - s/(2u^2) + 2 g0]; the axis
        // limits vanish for sigma > 4.
        const double lu = u != 0.0 ? 0.5 * sigma_ / u + 2.0 * gamma0_ * u : 0.0;
        const double lv = v != 0.0 ? 0.5 * sigma_ / v + 2.0 * gamma0_ * v : 0.0;
        if (u != 0.0)
            c.Huu = c.H * (lu * lu - 0.5 * sigma_ / (u * u) + 2.0 * gamma0_);
        if (v != 0.0)
            c.Hvv = c.H * (lv * lv - 0.5 * sigma_ / (v * v) + 2.0 * gamma0_);
        c.Huv = c.H * lu * lv;
        break;
    }
    case ModelKind::AdditiveExp: {
        if (gamma0_ * t > kExpGuard)
            throw OverflowError("nonlinearity exponent out of range");
        const double E = std::exp(gamma0_ * t);
        const double au = std::abs(u), av = std::abs(v);
        const double pu = sigma_int_ > 0 ? powi(au, sigma_int_) : std::pow(au, sigma_);
        const double pv = sigma_int_ > 0 ? powi(av, sigma_int_) : std::pow(av, sigma_);
        c.H = mu_ * (pu + pv) * E;
        const double du = u != 0.0 ? sigma_ * pu / u : 0.0;
        const double dv = v != 0.0 ? sigma_ * pv / v : 0.0;
        const double Au = mu_ * E * du; // pure-power part of H_u
        const double Av = mu_ * E * dv;
        c.Hu = Au + 2.0 * gamma0_ * u * c.H;
        c.Hv = Av + 2.0 * gamma0_ * v * c.H;
        const double d2u = u != 0.0 ? mu_ * sigma_ * (sigma_ - 1.0) * pu / (u * u) * E : 0.0;
        const double d2v = v != 0.0 ? mu_ * sigma_ * (sigma_ - 1.0) * pv / (v * v) * E : 0.0;
        c.Huu = d2u + 2.0 * gamma0_ * u * Au + 2.0 * gamma0_ * c.H + 2.0 * gamma0_ * u * c.Hu;
        c.Hvv = d2v + 2.0 * gamma0_ * v * Av + 2.0 * gamma0_ * c.H + 2.0 * gamma0_ * v * c.Hv;
        c.Huv = 2.0 * gamma0_ * v * Au + 2.0 * gamma0_ * u * Av +
                4.0 * gamma0_ * gamma0_ * u * v * c.H;
        break;
    }
    }

    // Shared tail for both exponential models: grad H . w =
    // (sigma + 2 gamma0 t) H, hence the factored H~ below.
    const double phi = sigma_ - 2.0 + 2.0 * gamma0_ * t;
    c.Ht = phi * c.H;
    c.grad_Ht_dot_w = (4.0 * gamma0_ * t + phi * (sigma_ + 2.0 * gamma0_ * t)) * c.H;
    return c;
}

} // namespace gs2d
