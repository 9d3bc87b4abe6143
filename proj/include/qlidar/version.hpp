#pragma once

namespace qlidar {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace qlidar
