#pragma once

#include <span>
#include <vector>

namespace gs2d::detail {

/// Fritsch-Carlson monotone cubic (PCHIP) interpolant. Shape-preserving:
/// no overshoot between data points, which matters near the origin where
/// the r-weighted integrands are small.
class PchipInterpolant {
public:
    PchipInterpolant(std::span<const double> x, std::span<const double> y);

    /// Evaluate at t; returns 0 outside [x.front(), x.back()].
    double operator()(double t) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_; // node slopes
};

} // namespace gs2d::detail
