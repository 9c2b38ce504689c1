#pragma once

#include <optional>
#include <string_view>
#include <utility>

namespace gs2d {

/// Built-in couplings H(u, v).
///
///   PurePower    H = mu (u^2+v^2)^{sigma/2}
///                  homogeneous; closed-form oracles for everything
///                  downstream; polynomial (subcritical) growth. Axis
///                  derivatives do not vanish (the audit reports the
///                  axis condition failed) and the coercivity bound
///                  H >= mu |w|^sigma holds with equality.
///   CoupledExp   H = mu |uv|^{sigma/2} e^{gamma0 (u^2+v^2)}
///                  exponential-critical coupling; vanishes on the
///                  coordinate axes together with its gradient. The
///                  coercivity bound fails with the model's own mu at
///                  small amplitude and near the axes; the audit
///                  reports that honestly.
///   AdditiveExp  H = mu (|u|^sigma + |v|^sigma) e^{gamma0 (u^2+v^2)}
///                  exponential-critical with nonvanishing axis
///                  derivatives; the auditor's designated negative
///                  control for the axis condition.
enum class ModelKind { PurePower, CoupledExp, AdditiveExp };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Pointwise coupling values. Evaluated together so the exponential
/// models share a single exp() per point.
struct CouplingValues {
    double H = 0.0;
    double Hu = 0.0;
    double Hv = 0.0;
    /// H~ = grad H . w - 2 H, from the factored closed form
    /// ((sigma-2) H for pure powers, (sigma-2+2 gamma0 |w|^2) H for the
    /// exponential models); never formed by subtraction.
    double Ht = 0.0;
    /// grad H~ . w, for curvature diagnostics and the superquadraticity
    /// check on H~.
    double grad_Ht_dot_w = 0.0;
    /// second derivatives (Newton linearizations)
    double Huu = 0.0;
    double Huv = 0.0;
    double Hvv = 0.0;
};

/// Parameterized coupling with the constants the variational setup
/// depends on: mu (coercivity), sigma (its homogeneity exponent),
/// gamma0 (exponential growth rate; ignored by PurePower), theta
/// (superlinearity constant, default sigma) and tau (small-amplitude
/// exponent, default sigma - 1).
class NonlinearityModel {
public:
    NonlinearityModel(ModelKind kind, double mu, double sigma, double gamma0 = 1.0,
                      std::optional<double> theta = std::nullopt,
                      std::optional<double> tau = std::nullopt);

    ModelKind kind() const noexcept { return kind_; }
    double mu() const noexcept { return mu_; }
    double sigma() const noexcept { return sigma_; }
    double gamma0() const noexcept { return gamma0_; }
    double theta() const noexcept { return theta_; }
    double tau() const noexcept { return tau_; }
    bool exponential() const noexcept { return kind_ != ModelKind::PurePower; }

    /// All pointwise quantities at (u, v). Throws OverflowError when
    /// gamma0 (u^2+v^2) > 700 for the exponential models; callers in
    /// flow loops treat that as a step-size signal.
    CouplingValues eval(double u, double v) const;

    /// Same coupling with a different coercivity constant.
    NonlinearityModel with_mu(double new_mu) const {
        return {kind_, new_mu, sigma_, gamma0_, theta_, tau_};
    }

    double eval_H(double u, double v) const { return eval(u, v).H; }
    std::pair<double, double> eval_grad_H(double u, double v) const {
        auto c = eval(u, v);
        return {c.Hu, c.Hv};
    }
    double eval_tilde_H(double u, double v) const { return eval(u, v).Ht; }

private:
    ModelKind kind_;
    double mu_;
    double sigma_;
    double gamma0_;
    double theta_;
    double tau_;
    // fast paths for integer exponents
    int half_sigma_int_ = -1; // sigma/2 when integral, else -1
    int sigma_int_ = -1;      // sigma when integral, else -1
};

} // namespace gs2d
