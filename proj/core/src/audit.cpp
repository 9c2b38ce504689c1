#include "gs2d/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gs2d/errors.hpp"

namespace gs2d {

namespace {

double halton(std::uint64_t index, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

struct Sample {
    double u, v;
};

std::vector<Sample> halton_box(double box, int n, std::uint64_t seed) {
    std::vector<Sample> out;
    out.reserve(static_cast<size_t>(n));
    const std::uint64_t offset = 1 + (seed % 65536);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t idx = offset + static_cast<std::uint64_t>(i);
        out.push_back({box * (2.0 * halton(idx, 2) - 1.0),
                       box * (2.0 * halton(idx, 3) - 1.0)});
    }
    return out;
}

HypothesisRecord pass_record(std::string name, std::string note) {
    return {std::move(name), Verdict::Pass, std::nullopt, std::move(note)};
}

HypothesisRecord fail_record(std::string name, AuditWitness w, std::string note) {
    return {std::move(name), Verdict::Fail, w, std::move(note)};
}

} // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotApplicable: return "N/A";
    }
    return "?";
}

bool AuditReport::any_fail() const {
    return std::any_of(hypotheses.begin(), hypotheses.end(),
                       [](const auto& h) { return h.verdict == Verdict::Fail; });
}

AuditReport audit_hypotheses(const NonlinearityModel& model, const AuditOptions& opts) {
    if (!(opts.box > 0.0))
        throw ConfigError("audit box must be positive", "audit_box");
    if (opts.n_samples < 1000)
        throw ConfigError("audit needs at least 1000 samples", "audit_samples");
    if (!(opts.axis_margin >= 0.0) || opts.axis_margin >= opts.box)
        throw ConfigError("axis margin must lie in [0, box)", "axis_margin");

    const double M = opts.box;
    const double delta = opts.axis_margin;
    const bool strict_axis = delta == 0.0;
    const double sigma = model.sigma();
    const double theta = model.theta();
    const double tau = model.tau();
    const double gamma0 = model.gamma0();

    AuditReport report;
    {
        std::ostringstream os;
        os << "box [-" << M << "," << M << "]^2, " << opts.n_samples
           << " Halton samples (seed " << opts.seed << "), axis margin " << delta;
        report.domain = os.str();
    }
    report.notes.push_back(
        "axis condition tested as the literal identities H_u(u,0)=0 for all u "
        "and H_v(0,v)=0 for all v");
    report.notes.push_back(
        "H1 verdict asserts bounded, non-growing |grad H|/|w|^tau on shrinking shells");

    const auto samples = halton_box(M, opts.n_samples, opts.seed);

    // Axis probe points; unit points lead so a failing model is
    // witnessed at (1,0) / (0,1) whenever they fit the box.
    std::vector<double> axis_ts;
    if (M >= 1.0) {
        axis_ts.push_back(1.0);
        axis_ts.push_back(-1.0);
    }
    for (int k = 1; k <= 16; ++k) {
        axis_ts.push_back(M * k / 16.0);
        axis_ts.push_back(-M * k / 16.0);
    }

    const double slack = 1e-12;

    // --- H2: 0 < theta H <= grad H . w on box samples ---
    {
        std::optional<AuditWitness> witness;
        for (const auto& s : samples) {
            if (s.u == 0.0 && s.v == 0.0)
                continue;
            const auto c = model.eval(s.u, s.v);
            const double pairing = s.u * c.Hu + s.v * c.Hv;
            const double lhs = theta * c.H;
            if (!(c.H > 0.0) || lhs > pairing * (1.0 + slack) + slack) {
                witness = AuditWitness{s.u, s.v, lhs, pairing};
                break;
            }
        }
        report.hypotheses[1] =
            witness ? fail_record("H2", *witness, "theta H <= grad H . w violated")
                    : pass_record("H2", "0 < theta H <= grad H . w on all samples");
    }

    // --- H4 / H6: margin-filtered pointwise checks ---
    {
        // Axis points lead under strict testing so axis failures are
        // witnessed on the axis itself.
        std::vector<Sample> pts;
        if (strict_axis)
            for (double t : axis_ts) {
                pts.push_back({t, 0.0});
                pts.push_back({0.0, t});
            }
        size_t n_kept = 0;
        for (const auto& s : samples)
            if (std::min(std::abs(s.u), std::abs(s.v)) > delta) {
                pts.push_back(s);
                ++n_kept;
            }
        if (n_kept == 0)
            throw ConfigError("axis margin filtered out every sample", "axis_margin");

        std::optional<AuditWitness> w4, w6;
        for (const auto& s : pts) {
            const auto c = model.eval(s.u, s.v);
            if (!w4) {
                const double pu = c.Hu * s.u;
                const double pv = c.Hv * s.v;
                if (!(pu > 0.0) || !(pv > 0.0))
                    w4 = AuditWitness{s.u, s.v, std::min(pu, pv), 0.0};
            }
            if (!w6) {
                const double t = s.u * s.u + s.v * s.v;
                const double rhs = model.mu() * std::pow(t, 0.5 * sigma);
                if (c.H < rhs * (1.0 - slack) - slack)
                    w6 = AuditWitness{s.u, s.v, c.H, rhs};
            }
        }
        const char* where = strict_axis ? " (axes included)" : " (off the axis margin)";
        report.hypotheses[3] =
            w4 ? fail_record("H4", *w4, std::string("H_u u > 0, H_v v > 0 violated") + where)
               : pass_record("H4", std::string("H_u u > 0 and H_v v > 0") + where);
        report.hypotheses[5] =
            w6 ? fail_record("H6", *w6, std::string("H >= mu |w|^sigma violated") + where)
               : pass_record("H6", std::string("H >= mu |w|^sigma") + where);
    }

    // --- H5: grad H~ . w >= 4 H~ on box samples ---
    {
        std::optional<AuditWitness> witness;
        for (const auto& s : samples) {
            const auto c = model.eval(s.u, s.v);
            if (c.grad_Ht_dot_w < 4.0 * c.Ht * (1.0 - slack) - slack) {
                witness = AuditWitness{s.u, s.v, c.grad_Ht_dot_w, 4.0 * c.Ht};
                break;
            }
        }
        report.hypotheses[4] =
            witness ? fail_record("H5", *witness, "grad H~ . w >= 4 H~ violated")
                    : pass_record("H5", "grad H~ . w >= 4 H~ on all samples");
    }

    // --- H3: exact axis points ---
    {
        std::optional<AuditWitness> witness;
        for (double t : axis_ts) {
            const auto cu = model.eval(t, 0.0);
            if (std::abs(cu.Hu) > 1e-12) {
                witness = AuditWitness{t, 0.0, std::abs(cu.Hu), 0.0};
                break;
            }
            const auto cv = model.eval(0.0, t);
            if (std::abs(cv.Hv) > 1e-12) {
                witness = AuditWitness{0.0, t, std::abs(cv.Hv), 0.0};
                break;
            }
        }
        report.hypotheses[2] =
            witness ? fail_record("H3", *witness, "axis derivative does not vanish")
                    : pass_record("H3", "H_u(u,0) = 0 and H_v(0,v) = 0 on the axes");
    }

    // --- H1: |grad H|/|w|^tau on shrinking shells ---
    {
        const int n_shells = 16;
        const int n_angles = 64;
        const double two_pi = 2.0 * std::acos(-1.0);
        double prev = -1.0;
        std::optional<AuditWitness> witness;
        for (int j = 0; j < n_shells && !witness; ++j) {
            const double rho = M * std::pow(2.0, -j);
            double shell_max = 0.0;
            Sample arg{rho, 0.0};
            for (int a = 0; a < n_angles; ++a) {
                const double phi = (a + 0.5) * two_pi / n_angles;
                const double u = rho * std::cos(phi);
                const double v = rho * std::sin(phi);
                const auto c = model.eval(u, v);
                const double ratio = std::hypot(c.Hu, c.Hv) / std::pow(rho, tau);
                if (ratio > shell_max) {
                    shell_max = ratio;
                    arg = {u, v};
                }
            }
            if (prev >= 0.0 && shell_max > prev * (1.0 + 1e-9) + slack)
                witness = AuditWitness{arg.u, arg.v, shell_max, prev};
            prev = shell_max;
        }
        report.hypotheses[0] =
            witness ? fail_record("H1", *witness,
                                  "|grad H|/|w|^tau grows as |w| -> 0 (shell max vs previous)")
                    : pass_record("H1", "|grad H|/|w|^tau bounded and non-growing as |w| -> 0");
    }

    // --- H7: exponential criticality on growing shells ---
    if (!model.exponential()) {
        report.hypotheses[6] = {"H7", Verdict::NotApplicable, std::nullopt,
                                "no exponential factor; growth is polynomial (subcritical)"};
    } else {
        const double gamma_hi = gamma0 + 0.2;
        const double gamma_lo = gamma0 > 0.2 ? gamma0 - 0.2 : 0.5 * gamma0;
        const int n_shells = 8;
        const int n_angles = 32;
        const double two_pi = 2.0 * std::acos(-1.0);
        const double rho0 = 2.0;
        const double rho_max = std::sqrt(600.0 / gamma_hi);
        std::vector<double> up(n_shells), lo(n_shells), rhos(n_shells);
        for (int j = 0; j < n_shells; ++j) {
            const double rho =
                rho0 * std::pow(rho_max / rho0, static_cast<double>(j) / (n_shells - 1));
            rhos[static_cast<size_t>(j)] = rho;
            double m = 0.0;
            for (int a = 0; a < n_angles; ++a) {
                const double phi = (a + 0.5) * two_pi / n_angles;
                const auto c = model.eval(rho * std::cos(phi), rho * std::sin(phi));
                m = std::max(m, std::hypot(c.Hu, c.Hv));
            }
            up[static_cast<size_t>(j)] = m * std::exp(-gamma_hi * rho * rho);
            lo[static_cast<size_t>(j)] = m * std::exp(-gamma_lo * rho * rho);
        }
        // The criticality statement is asymptotic; polynomial prefactors
        // may push the ratios the wrong way on the first shells, so the
        // verdict compares the ends of the shell range.
        std::optional<AuditWitness> witness;
        std::string note;
        if (up.back() > 1e-2 * up.front()) {
            witness = AuditWitness{rhos.back(), 0.0, up.back(), 1e-2 * up.front()};
            note = "|grad H| e^{-gamma |w|^2} fails to decay for gamma above gamma0";
        } else if (lo.back() < 1e2 * lo.front()) {
            witness = AuditWitness{rhos.back(), 0.0, lo.back(), 1e2 * lo.front()};
            note = "|grad H| e^{-gamma |w|^2} fails to grow for gamma below gamma0";
        }
        report.hypotheses[6] = witness
                                   ? fail_record("H7", *witness, note)
                                   : pass_record("H7", "gamma0-critical growth corroborated");
    }

    // --- envelope fit ---
    {
        EnvelopeFit fit;
        fit.eps = opts.envelope_eps;
        fit.q = opts.envelope_q;
        fit.gamma = opts.envelope_gamma_factor * gamma0;
        fit.tau = tau;
        double kappa = 0.0;
        for (const auto& s : samples) {
            const double t = s.u * s.u + s.v * s.v;
            const double norm = std::sqrt(t);
            if (norm < 1e-8)
                continue;
            const auto c = model.eval(s.u, s.v);
            const double excess = std::hypot(c.Hu, c.Hv) - fit.eps * std::pow(norm, tau);
            if (excess <= 0.0)
                continue;
            const double denom = std::pow(norm, fit.q - 1.0) * std::expm1(fit.gamma * t);
            kappa = std::max(kappa, excess / denom);
        }
        fit.kappa = kappa;
        report.envelope = fit;
    }

    return report;
}

std::string format_audit_report(const AuditReport& report) {
    std::ostringstream os;
    os << "hypothesis audit over " << report.domain << "\n";
    for (const auto& h : report.hypotheses) {
        os << "  " << h.name << "  " << to_string(h.verdict);
        if (h.witness)
            os << "  witness (u,v)=(" << h.witness->u << "," << h.witness->v
               << ") lhs=" << h.witness->lhs << " rhs=" << h.witness->rhs;
        if (!h.note.empty())
            os << "  [" << h.note << "]";
        os << "\n";
    }
    os << "  envelope: eps=" << report.envelope.eps << " q=" << report.envelope.q
       << " gamma=" << report.envelope.gamma << " tau=" << report.envelope.tau
       << " kappa=" << report.envelope.kappa << "\n";
    for (const auto& n : report.notes)
        os << "  note: " << n << "\n";
    return os.str();
}

} // namespace gs2d
