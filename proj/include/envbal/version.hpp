#pragma once

namespace envbal {

inline constexpr const char* kToolName = "envbal";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace envbal
