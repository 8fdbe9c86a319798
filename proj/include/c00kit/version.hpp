#pragma once

namespace c00 {

inline constexpr const char* kVersion = "0.1.0";

} // namespace c00
