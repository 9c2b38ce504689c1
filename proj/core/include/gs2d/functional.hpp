#pragma once

#include <utility>

#include "gs2d/nonlinearity.hpp"
#include "gs2d/radial_grid.hpp"

namespace gs2d {

/// A pair (u, v) of radial profiles on one shared grid; the unknown of
/// the coupled system.
struct StatePair {
    RadialFunction u;
    RadialFunction v;

    StatePair(RadialFunction u_, RadialFunction v_);
    const GridPtr& grid() const noexcept { return u.grid(); }
};

/// The scalar functionals evaluated together from one pass:
///   J = kinetic/2 - potential
///   P = kinetic + 2 potential - nl_pairing
/// with kinetic = |grad w|_2^2, potential = int H(w),
/// nl_pairing = int grad H(w) . w.
struct FunctionalValues {
    double J = 0.0;
    double P = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double nl_pairing = 0.0;
};

FunctionalValues functional_values(const StatePair& w, const NonlinearityModel& model);

/// J(w) = (1/2) |grad w|_2^2 - int H(w).
double energy(const StatePair& w, const NonlinearityModel& model);

/// P(w) = |grad w|_2^2 - int H~(w).
double pohozaev(const StatePair& w, const NonlinearityModel& model);

/// Unconstrained L2 gradient (-Delta u - H_u, -Delta v - H_v) with a
/// zeroed Dirichlet row at r = R.
StatePair energy_gradient(const StatePair& w, const NonlinearityModel& model);

/// Multipliers making the full residual
///   g = (-Delta u + l1 u - H_u, -Delta v + l2 v - H_v)
/// orthogonal to (u,0) and (0,v) in the discrete L2 pairing. Requires
/// both components to carry positive mass.
std::pair<double, double> lagrange_multipliers(const StatePair& w,
                                               const NonlinearityModel& model);

// --- fiber map: the mass-preserving dilation (e^s u(e^s x), e^s v(e^s x)) ---
//
// Fiber quantities are evaluated analytically on the unscaled grid via
// the change-of-variables form; resampling never enters these.

/// J along the fiber: e^{2s} kinetic/2 - e^{-2s} int H(e^s u, e^s v).
double fiber_energy(const StatePair& w, const NonlinearityModel& model, double s);
double fiber_energy(const StatePair& w, const NonlinearityModel& model, double s,
                    double kinetic);

/// d/ds of fiber_energy, which is P along the fiber.
double fiber_derivative(const StatePair& w, const NonlinearityModel& model, double s);
double fiber_derivative(const StatePair& w, const NonlinearityModel& model, double s,
                        double kinetic);

/// Second derivative along the fiber; strictly negative at the fiber
/// maximum for couplings with superquadratic H~.
double fiber_second_derivative(const StatePair& w, const NonlinearityModel& model, double s);

/// Materialize the dilated state on the original grid by monotone
/// cubic interpolation (values past R are zero). |s| above s_max is
/// rejected: resampling accuracy degrades with extreme dilations.
StatePair resample_scaled(const StatePair& w, double s, double s_max = 5.0);

} // namespace gs2d
