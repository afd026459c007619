#pragma once

#include <string_view>

namespace fqt {

inline constexpr std::string_view version = "1.0.0";

} // namespace fqt
