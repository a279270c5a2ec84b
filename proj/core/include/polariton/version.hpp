#pragma once

namespace polariton {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "polariton-echo";

}  // namespace polariton
