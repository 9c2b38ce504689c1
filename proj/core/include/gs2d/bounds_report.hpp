#pragma once

#include <string>
#include <vector>

namespace gs2d {

/// One verified inequality: lhs <= rhs (+1e-10 slack) for bound-type
/// checks, lhs > 0 for positivity-type checks. The anchor names the
/// inequality itself so stored reports stay self-describing.
struct BoundCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    bool applicable = true;
    std::string anchor;
};

struct BoundsReport {
    std::vector<BoundCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (c.applicable && !c.pass)
                return false;
        return true;
    }
};

} // namespace gs2d
