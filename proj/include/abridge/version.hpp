#pragma once

namespace abridge {
inline constexpr const char* kVersion = "0.1.0";
}
