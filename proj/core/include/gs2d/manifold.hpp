#pragma once

#include "gs2d/functional.hpp"

namespace gs2d {

/// Prescribed component masses |u|_2 = a, |v|_2 = b, plus the model's
/// critical exponent for the admissibility window a^2 + b^2 < 2 pi /
/// gamma0. Violating the window is a warning, never an error.
struct MassConstraint {
    double a;
    double b;
    double gamma0 = 1.0;

    MassConstraint(double a_, double b_, double gamma0_ = 1.0);

    bool admissible() const noexcept;
    /// 2 pi / gamma0 - a^2 - b^2; positive inside the window.
    double admissibility_margin() const noexcept;
};

/// Rescale each component to its target mass: (a/|u|_2 u, b/|v|_2 v).
/// Exact by construction; throws DegenerateStateError on a zero-mass
/// component.
StatePair project_mass(const StatePair& w, const MassConstraint& c);

struct FiberOptions {
    double s_range = 8.0;     // scan interval [-s_range, s_range]
    double s_scan = 0.05;     // scan resolution
    double tol_fiber = 1e-10; // |J~'(s)| <= tol * e^{2s} * kinetic at the root
};

/// The unique dilation parameter maximizing the fiber energy, located
/// by a +/- sign-change scan of the fiber derivative and bisection.
///
/// States that are already close to the constraint set short-circuit
/// through a local bracket around s = 0; the multiple-bracket
/// diagnostic applies to the full scan. Throws NoMaximizerError when
/// no sign change lies in the scan range and NonUniqueMaximizerError
/// when several do (the coupling then violates the strict fiber
/// concavity the projection relies on).
double fiber_maximizer(const StatePair& w, const NonlinearityModel& model,
                       const FiberOptions& opts = {});

struct ProjectionOptions {
    FiberOptions fiber{};
    double tol_pohozaev = 1e-6; // |P| <= tol * kinetic on the output
    int max_passes = 8;
    double s_max = 5.0; // per-resample dilation guard
    // full scan re-verifies maximizer uniqueness; the default expanding
    // bracket search trusts it (cheap enough for flow inner loops)
    bool full_scan = false;
};

/// Dilate w to its fiber maximum and materialize the result on the
/// grid, renormalizing masses to absorb interpolation drift. Repeats
/// until the Pohozaev residual is within tolerance (the first
/// materialization carries interpolation error that one or two cheap
/// corrector passes remove).
StatePair project_pohozaev(const StatePair& w, const NonlinearityModel& model,
                           const ProjectionOptions& opts = {});

} // namespace gs2d
