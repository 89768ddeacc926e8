#pragma once

#include <string_view>

namespace bhi {

inline constexpr std::string_view kToolName = "bhi";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace bhi
