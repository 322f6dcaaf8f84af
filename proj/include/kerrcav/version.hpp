#pragma once

namespace kerrcav {
inline constexpr const char* kVersion = "0.1.0";
}
