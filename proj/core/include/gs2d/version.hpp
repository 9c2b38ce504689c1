#pragma once

#include <string_view>

namespace gs2d {

inline constexpr std::string_view kVersion = "0.1.0";

} // namespace gs2d
