#pragma once

#include <numbers>

namespace cqed {

// canonical units: angular frequency in rad/us, time in us.
// configuration files carry linear frequencies in MHz; convert on ingestion.
inline constexpr double pi = std::numbers::pi;

inline constexpr double mhz_to_rad_us(double f_mhz) { return 2.0 * pi * f_mhz; }
inline constexpr double rad_us_to_mhz(double w) { return w / (2.0 * pi); }

}  // namespace cqed
