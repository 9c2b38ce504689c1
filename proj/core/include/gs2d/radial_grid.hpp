#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace gs2d {

/// How node spacing is generated: uniform steps, or steps growing by a
/// constant factor per cell (finer near the origin for ratio > 1).
struct GridSpacing {
    enum class Kind { Uniform, Geometric };
    Kind kind = Kind::Uniform;
    double ratio = 1.0;

    static GridSpacing uniform() { return {}; }
    static GridSpacing geometric(double ratio) { return {Kind::Geometric, ratio}; }
};

/// Discretization of [0, R] for radial profiles on the plane.
///
/// Quadrature weights carry the 2*pi*r area factor, so
/// sum_k w_k f(r_k) approximates the planar integral of the radial
/// function f. Uniform grids use an endpoint-corrected trapezoid rule
/// (positive weights, constants integrate to the exact disc area);
/// graded grids fall back to the plain trapezoid rule.
///
/// Immutable after construction; share freely across threads.
class RadialGrid {
public:
    double R() const noexcept { return R_; }
    int size() const noexcept { return static_cast<int>(nodes_.size()); }
    const GridSpacing& spacing() const noexcept { return spacing_; }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double node(int k) const { return nodes_[static_cast<size_t>(k)]; }
    double weight(int k) const { return weights_[static_cast<size_t>(k)]; }

    /// Spacing of the ghost cell past r = R (used by the Dirichlet row).
    double ghost_spacing() const noexcept { return ghost_h_; }

    /// FNV-1a over the grid descriptor and node bits; stable across runs.
    std::uint64_t hash() const noexcept { return hash_; }

private:
    friend std::shared_ptr<const RadialGrid> make_grid(double, int, GridSpacing);
    RadialGrid() = default;

    double R_ = 0.0;
    GridSpacing spacing_{};
    std::vector<double> nodes_;
    std::vector<double> weights_;
    double ghost_h_ = 0.0;
    std::uint64_t hash_ = 0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Build a grid on [0, R] with n nodes (n >= 16, R > 0).
/// Throws ConfigError on bad parameters.
GridPtr make_grid(double R, int n, GridSpacing spacing = {});

/// Samples of a radial profile on a fixed grid. Values are validated
/// to be finite and of matching length on construction.
class RadialFunction {
public:
    RadialFunction(GridPtr grid, std::vector<double> values);

    static RadialFunction zeros(GridPtr grid);
    static RadialFunction sample(GridPtr grid, const std::function<double(double)>& f);

    const GridPtr& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](int k) const { return values_[static_cast<size_t>(k)]; }
    int size() const noexcept { return static_cast<int>(values_.size()); }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

// --- low-level kernels on raw samples (hot paths avoid re-validation) ---

double integrate_samples(const RadialGrid& g, std::span<const double> f);

/// First derivative at every node: centered differences in the
/// interior, one-sided at both ends.
void derivative_samples(const RadialGrid& g, std::span<const double> u, std::span<double> out);

double grad_norm_sq_samples(const RadialGrid& g, std::span<const double> u);

/// u'' + u'/r with the regular-center stencil at r = 0 and a
/// homogeneous Dirichlet ghost value past r = R.
void laplacian_samples(const RadialGrid& g, std::span<const double> u, std::span<double> out);

// --- named operations on whole profiles ---

/// Planar integral of a radial profile, 2*pi * int f(r) r dr.
double integrate(const RadialFunction& f);

/// Squared L2 norm, integrate(u^2).
double mass(const RadialFunction& u);

/// Squared L2 norm of the gradient, 2*pi * int u'(r)^2 r dr.
double grad_norm_sq(const RadialFunction& u);

RadialFunction radial_laplacian(const RadialFunction& u);

} // namespace gs2d
