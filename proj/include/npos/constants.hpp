#pragma once

namespace npos {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

}  // namespace npos
