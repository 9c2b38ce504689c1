#pragma once

#include "gs2d/bounds_report.hpp"
#include "gs2d/solver.hpp"

namespace gs2d {

/// integrate(e^{gamma |w|^2} - 1), evaluated pointwise with expm1 so
/// small-argument regions keep full relative accuracy. Throws
/// OverflowError past the exponent guard, ConfigError for gamma <= 0.
double tm_integral(const StatePair& w, double gamma);

/// Interpolation ratio |u|_p / (|grad u|_2^{d_p} |u|_2^{1-d_p}) with
/// d_p = 1 - 2/p. Invariant under amplitude scaling and dilation;
/// bounded by an empirical cap for each p (1.0 covers p = 4).
double gn_check(const RadialFunction& u, double p);

/// Quantitative bounds evaluated on a converged solve, with m taken as
/// the converged energy and theta from the model:
///   potential_bound         int H <= 2 m/(theta-4)
///   gradient_bound          |grad w|^2 <= 2(theta-2) m/(theta-4)
///   tm_window               |grad w|^2 < 2 pi/gamma0 - a^2 - b^2
///   multiplier_positive_*   lambda_i > 0
///   multiplier_combined     |-l1 a^2 - l2 b^2| <= 4(theta-1) m/(theta-4)
///   stationarity_identity   -l1 a^2 - l2 b^2 = <-Delta w, w> - int grad H . w
///   admissibility           a^2 + b^2 < 2 pi/gamma0
///   tm_integral_finite      int (e^{0.9 gamma0 |w|^2} - 1) finite
///   gn_ratio_*              p=4 interpolation ratio below the cap
/// The identity row is evaluated in the same discrete pairing that
/// defines the multipliers; the node-derivative kinetic value differs
/// from that pairing by the quadrature-consistency gap and would make
/// the row meaningless at tight tolerances.
/// Exponential-window rows are marked not applicable for polynomial
/// couplings. Refuses nonconverged reports.
BoundsReport check_bounds(const SolveReport& report, const SolverConfig& config);

struct GeometryProbeResult {
    double K = 0.0;
    double sup_at_K = 0.0;  // sup J over the kinetic-level-K cloud
    double inf_at_2K = 0.0; // inf J over the kinetic-level-2K cloud
    double j_star = 0.0;    // inf J over the K/2 sphere cloud
    int n_samples = 0;
    bool pass = false;      // sup_at_K < inf_at_2K and j_star > 0
};

/// Sample random states on the mass torus, dilate them analytically to
/// kinetic levels K, 2K and K/2, and compare the energy clouds. A
/// passing probe corroborates the low-energy separation between the
/// kinetic ball and the 2K sphere.
GeometryProbeResult geometry_probe(const SolverConfig& config, double K, int n_samples);

} // namespace gs2d
