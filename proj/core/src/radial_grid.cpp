#include "gs2d/radial_grid.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "gs2d/errors.hpp"

namespace gs2d {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t fnv1a(const void* data, size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t hash_double(double x, std::uint64_t h) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return fnv1a(&bits, sizeof bits, h);
}

} // namespace

GridPtr make_grid(double R, int n, GridSpacing spacing) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw ConfigError("grid radius must be positive and finite", "r");
    if (n < 16)
        throw ConfigError("grid too coarse: need at least 16 nodes", "n");
    if (spacing.kind == GridSpacing::Kind::Geometric &&
        (!(spacing.ratio > 0.0) || !std::isfinite(spacing.ratio)))
        throw ConfigError("geometric spacing ratio must be positive", "spacing");

    auto grid = std::shared_ptr<RadialGrid>(new RadialGrid());
    grid->R_ = R;
    grid->spacing_ = spacing;

    const size_t nn = static_cast<size_t>(n);
    auto& r = grid->nodes_;
    r.resize(nn);

    const bool geometric = spacing.kind == GridSpacing::Kind::Geometric &&
                           std::abs(spacing.ratio - 1.0) > 1e-12;
    if (geometric) {
        // r_k = R (g^k - 1) / (g^{n-1} - 1); cell widths grow by g per step.
        const double g = spacing.ratio;
        const double denom = std::pow(g, n - 1) - 1.0;
        for (size_t k = 0; k < nn; ++k)
            r[k] = R * (std::pow(g, static_cast<double>(k)) - 1.0) / denom;
        grid->ghost_h_ = (r[nn - 1] - r[nn - 2]) * g;
    } else {
        const double h = R / static_cast<double>(n - 1);
        for (size_t k = 0; k < nn; ++k)
            r[k] = h * static_cast<double>(k);
        grid->ghost_h_ = h;
    }
    r[0] = 0.0;
    r[nn - 1] = R;

    // Base trapezoid coefficients for int_0^R g(r) dr.
    std::vector<double> c(nn, 0.0);
    for (size_t k = 0; k + 1 < nn; ++k) {
        const double h = r[k + 1] - r[k];
        c[k] += 0.5 * h;
        c[k + 1] += 0.5 * h;
    }
    if (!geometric) {
        // Gregory end correction (degree of exactness 3). The plain
        // trapezoid error is dominated by the boundary term of the
        // 2*pi*r-weighted integrand at r = 0.
        const double h = R / static_cast<double>(n - 1);
        const double w0 = 3.0 / 8.0, w1 = 7.0 / 6.0, w2 = 23.0 / 24.0;
        c[0] = w0 * h;
        c[1] = w1 * h;
        c[2] = w2 * h;
        c[nn - 1] = w0 * h;
        c[nn - 2] = w1 * h;
        c[nn - 3] = w2 * h;
    }

    auto& w = grid->weights_;
    w.resize(nn);
    double area = 0.0;
    for (size_t k = 0; k < nn; ++k) {
        w[k] = 2.0 * kPi * r[k] * c[k];
        area += w[k];
    }
    // Pin constants to the exact disc area.
    const double scale = kPi * R * R / area;
    for (auto& wk : w)
        wk *= scale;

    std::uint64_t h = 0xcbf29ce484222325ull;
    h = hash_double(R, h);
    h = fnv1a(&n, sizeof n, h);
    const int kind = static_cast<int>(spacing.kind);
    h = fnv1a(&kind, sizeof kind, h);
    h = hash_double(spacing.ratio, h);
    for (double x : r)
        h = hash_double(x, h);
    grid->hash_ = h;

    return grid;
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_)
        throw ConfigError("radial function requires a grid");
    if (values_.size() != static_cast<size_t>(grid_->size()))
        throw ConfigError("radial function length does not match grid node count");
    for (double v : values_)
        if (!std::isfinite(v))
            throw DegenerateStateError("radial function has non-finite samples");
}

RadialFunction RadialFunction::zeros(GridPtr grid) {
    std::vector<double> v(static_cast<size_t>(grid->size()), 0.0);
    return RadialFunction(std::move(grid), std::move(v));
}

RadialFunction RadialFunction::sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<size_t>(grid->size()));
    for (int k = 0; k < grid->size(); ++k)
        v[static_cast<size_t>(k)] = f(grid->node(k));
    return RadialFunction(std::move(grid), std::move(v));
}

double integrate_samples(const RadialGrid& g, std::span<const double> f) {
    const auto w = g.weights();
    double acc = 0.0;
    for (size_t k = 0; k < w.size(); ++k)
        acc += w[k] * f[k];
    return acc;
}

void derivative_samples(const RadialGrid& g, std::span<const double> u, std::span<double> out) {
    const auto r = g.nodes();
    const size_t n = r.size();
    out[0] = (u[1] - u[0]) / (r[1] - r[0]);
    for (size_t k = 1; k + 1 < n; ++k) {
        const double hm = r[k] - r[k - 1];
        const double hp = r[k + 1] - r[k];
        out[k] = (-hp / (hm * (hm + hp))) * u[k - 1] +
                 ((hp - hm) / (hm * hp)) * u[k] +
                 (hm / (hp * (hm + hp))) * u[k + 1];
    }
    out[n - 1] = (u[n - 1] - u[n - 2]) / (r[n - 1] - r[n - 2]);
}

double grad_norm_sq_samples(const RadialGrid& g, std::span<const double> u) {
    // d holds u' at nodes; the integrand is d^2.
    static thread_local std::vector<double> d;
    d.resize(u.size());
    derivative_samples(g, u, d);
    const auto w = g.weights();
    double acc = 0.0;
    for (size_t k = 0; k < u.size(); ++k)
        acc += w[k] * d[k] * d[k];
    return acc;
}

void laplacian_samples(const RadialGrid& g, std::span<const double> u, std::span<double> out) {
    const auto r = g.nodes();
    const size_t n = r.size();

    // Regular center: Delta u(0) = 2 u''(0) with u'(0) = 0.
    out[0] = 4.0 * (u[1] - u[0]) / (r[1] * r[1]);

    auto row = [&](size_t k, double up, double hp) {
        const double hm = r[k] - r[k - 1];
        const double denom = hm * hp * (hm + hp);
        const double d2 = 2.0 * (hp * u[k - 1] - (hm + hp) * u[k] + hm * up) / denom;
        const double d1 = (-hp * hp * u[k - 1] + (hp * hp - hm * hm) * u[k] + hm * hm * up) / denom;
        return d2 + d1 / r[k];
    };

    for (size_t k = 1; k + 1 < n; ++k)
        out[k] = row(k, u[k + 1], r[k + 1] - r[k]);
    // Homogeneous Dirichlet ghost value past r = R.
    out[n - 1] = row(n - 1, 0.0, g.ghost_spacing());
}

double integrate(const RadialFunction& f) {
    return integrate_samples(*f.grid(), f.values());
}

double mass(const RadialFunction& u) {
    const auto w = u.grid()->weights();
    const auto v = u.values();
    double acc = 0.0;
    for (size_t k = 0; k < v.size(); ++k)
        acc += w[k] * v[k] * v[k];
    return acc;
}

double grad_norm_sq(const RadialFunction& u) {
    return grad_norm_sq_samples(*u.grid(), u.values());
}

RadialFunction radial_laplacian(const RadialFunction& u) {
    std::vector<double> out(static_cast<size_t>(u.size()));
    laplacian_samples(*u.grid(), u.values(), out);
    return RadialFunction(u.grid(), std::move(out));
}

} // namespace gs2d
