#pragma once

namespace mbg {
inline constexpr const char* kVersion = "0.1.0";
}
