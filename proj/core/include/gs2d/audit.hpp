#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gs2d/nonlinearity.hpp"

namespace gs2d {

enum class Verdict { Pass, Fail, NotApplicable };

std::string_view to_string(Verdict v);

/// A point where a sampled inequality failed, with both sides of the
/// inequality as evaluated there.
struct AuditWitness {
    double u = 0.0;
    double v = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct HypothesisRecord {
    std::string name;
    Verdict verdict = Verdict::NotApplicable;
    std::optional<AuditWitness> witness; // present on every Fail
    std::string note;
};

/// Fitted constant kappa for the two-term growth envelope
///   |grad H(w)| <= eps |w|^tau + kappa |w|^{q-1} (e^{gamma |w|^2} - 1),
/// taken as the max over samples of the required ratio, so the
/// inequality holds at every sampled point by construction.
struct EnvelopeFit {
    double eps = 0.0;
    double q = 0.0;
    double gamma = 0.0;
    double tau = 0.0;
    double kappa = 0.0;
};

struct AuditOptions {
    double box = 3.0;            // sample domain [-box, box]^2
    int n_samples = 4096;        // >= 1000
    double axis_margin = 0.05;   // delta; 0 requests strict axis testing
    std::uint64_t seed = 12345;  // offsets the low-discrepancy stream
    double envelope_eps = 0.1;
    double envelope_q = 4.0;
    double envelope_gamma_factor = 1.1; // gamma = factor * gamma0
};

struct AuditReport {
    std::array<HypothesisRecord, 7> hypotheses; // H1..H7 in order
    EnvelopeFit envelope;
    std::string domain; // sampled-domain descriptor
    std::vector<std::string> notes;

    const HypothesisRecord& record(int index1) const { // 1-based, H1..H7
        return hypotheses[static_cast<size_t>(index1 - 1)];
    }
    bool any_fail() const;
};

/// Sampled falsification/corroboration of the structure hypotheses on
/// the coupling:
///   H1  |grad H| / |w|^tau stays bounded on shrinking shells
///   H2  0 < theta H <= grad H . w
///   H3  H_u(u,0) = 0 for all u and H_v(0,v) = 0 for all v (exact axis
///       points)
///   H4  H_u u > 0 and H_v v > 0 (off the axis margin; includes exact
///       axis points when axis_margin = 0)
///   H5  grad H~ . w >= 4 H~
///   H6  H >= mu |w|^sigma (margin-filtered like H4)
///   H7  |grad H| e^{-gamma |w|^2} -> 0 for gamma above gamma0 and
///       -> infinity below it, on growing shells; NotApplicable for
///       models without an exponential factor
/// Sampling is a deterministic Halton stream offset by the seed.
AuditReport audit_hypotheses(const NonlinearityModel& model, const AuditOptions& opts = {});

/// Render the report as the aligned table the CLI prints.
std::string format_audit_report(const AuditReport& report);

} // namespace gs2d
