#pragma once

#include <cmath>
#include <numbers>

namespace mmwbeam::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0; // m/s

constexpr double deg(double degrees) { return degrees * pi / 180.0; }
constexpr double to_deg(double radians) { return radians * 180.0 / pi; }

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

// dBm -> W, and dBm/Hz -> W/Hz.
inline double dbm_to_watts(double dbm) { return from_db(dbm - 30.0); }
inline double watts_to_dbm(double watts) { return to_db(watts) + 30.0; }

inline double wavelength(double carrier_hz) { return speed_of_light / carrier_hz; }

} // namespace mmwbeam::units
