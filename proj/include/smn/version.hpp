#pragma once

namespace smn {

inline constexpr const char* kToolName = "smnsim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace smn
