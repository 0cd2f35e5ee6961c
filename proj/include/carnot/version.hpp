#pragma once

namespace carnot {

inline constexpr const char* kToolName = "carnot";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace carnot
