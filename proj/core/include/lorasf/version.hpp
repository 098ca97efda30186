#pragma once

namespace lorasf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lorasf
