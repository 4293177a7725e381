#pragma once

namespace vulnmap {
inline constexpr const char* kToolName = "vulnmap";
inline constexpr const char* kVersion = "0.1.0";
}  // namespace vulnmap
