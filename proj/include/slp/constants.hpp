#pragma once

namespace slp {

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = 3.14159265358979323846;

} // namespace slp
