#pragma once

namespace cvt {

inline constexpr const char* kToolName = "cvt";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace cvt
