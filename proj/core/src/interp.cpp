#include "interp.hpp"

#include <algorithm>
#include <cmath>

namespace gs2d::detail {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Standard PCHIP endpoint slope: three-point one-sided estimate with
// the Fritsch-Carlson shape clamps.
double endpoint_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (sign(d) != sign(s0))
        return 0.0;
    if (sign(s0) != sign(s1) && std::abs(d) > 3.0 * std::abs(s0))
        return 3.0 * s0;
    return d;
}

} // namespace

PchipInterpolant::PchipInterpolant(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const size_t n = x_.size();
    d_.assign(n, 0.0);
    if (n < 2)
        return;

    std::vector<double> h(n - 1), s(n - 1);
    for (size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        s[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    if (n == 2) {
        d_[0] = d_[1] = s[0];
        return;
    }

    d_[0] = endpoint_slope(h[0], h[1], s[0], s[1]);
    d_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    for (size_t k = 1; k + 1 < n; ++k) {
        if (s[k - 1] * s[k] <= 0.0) {
            d_[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / s[k - 1] + w2 / s[k]);
        }
    }
}

double PchipInterpolant::operator()(double t) const {
    if (x_.empty() || t < x_.front() || t > x_.back())
        return 0.0;
    // interval index: largest k with x_[k] <= t
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    size_t k = static_cast<size_t>(it - x_.begin());
    if (k > 0)
        --k;
    if (k + 1 >= x_.size())
        k = x_.size() - 2;

    const double h = x_[k + 1] - x_[k];
    const double z = (t - x_[k]) / h;
    const double z2 = z * z;
    const double z3 = z2 * z;
    const double h00 = 2.0 * z3 - 3.0 * z2 + 1.0;
    const double h10 = z3 - 2.0 * z2 + z;
    const double h01 = -2.0 * z3 + 3.0 * z2;
    const double h11 = z3 - z2;
    return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

} // namespace gs2d::detail
