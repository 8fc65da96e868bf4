#pragma once

namespace dind {

// Keep in sync with the version declared in the top-level CMakeLists.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace dind
