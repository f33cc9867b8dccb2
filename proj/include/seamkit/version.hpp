#pragma once

namespace seamkit {

inline constexpr const char* kToolName = "seamkit";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace seamkit
