#pragma once

// Gaussian main-lobe antenna with a constant side-lobe floor, azimuth only.
//
//   G(theta) = (1.6162 / sin(phi/2))^2 * exp(-k1 * 4 ln2 * (theta/phi)^2)   |theta| <= 1.3 phi
//   G(theta) = exp(-2.437) * phi^-0.094                                     otherwise
//
// phi is the half-power beamwidth in radians. The law is piecewise and is
// allowed to jump at |theta| = 1.3 phi.

#include <cmath>
#include <numbers>

#include "mmwbeam/error.hpp"
#include "mmwbeam/units.hpp"

namespace mmwbeam {

inline constexpr double peak_gain_constant = 1.6162;
inline constexpr double side_lobe_log_gain = -2.437;
inline constexpr double side_lobe_exponent = -0.094;
inline constexpr double main_lobe_factor = 1.3; // half of phi_ML = 2.6 phi

enum class Lobe { Main, Side };

struct AntennaPattern {
    double hpbw = units::deg(10.0); // radians, (0, 2pi]
    double k1 = 1.0;

    bool valid() const noexcept {
        return std::isfinite(hpbw) && hpbw > 0.0 && hpbw <= 2.0 * units::pi && std::isfinite(k1) &&
               k1 > 0.0;
    }

    void validate() const {
        if (!valid()) throw precondition_error("antenna pattern: hpbw must be in (0, 2pi] and k1 > 0");
    }

    /// Coefficient of (theta/phi)^2 in the main-lobe exponent.
    double gain_exponent() const noexcept { return k1 * 4.0 * std::numbers::ln2; }
};

/// Folds any finite angle onto [0, pi].
inline double fold_angle(double theta) {
    double t = std::fmod(std::abs(theta), 2.0 * units::pi);
    return t > units::pi ? 2.0 * units::pi - t : t;
}

inline double main_lobe_half_width(const AntennaPattern& pattern) {
    pattern.validate();
    return main_lobe_factor * pattern.hpbw;
}

inline Lobe lobe_of(const AntennaPattern& pattern, double theta) {
    return fold_angle(theta) <= main_lobe_half_width(pattern) ? Lobe::Main : Lobe::Side;
}

inline double boresight_gain(const AntennaPattern& pattern) {
    pattern.validate();
    const double s = peak_gain_constant / std::sin(pattern.hpbw / 2.0);
    return s * s;
}

/// Main-lobe law evaluated at theta regardless of the lobe boundary.
inline double main_lobe_gain(const AntennaPattern& pattern, double theta) {
    const double x = fold_angle(theta) / pattern.hpbw;
    return boresight_gain(pattern) * std::exp(-pattern.gain_exponent() * x * x);
}

inline double side_lobe_gain(const AntennaPattern& pattern) {
    pattern.validate();
    return std::exp(side_lobe_log_gain) * std::pow(pattern.hpbw, side_lobe_exponent);
}

/// Linear power gain at misalignment theta (radians).
inline double gain(const AntennaPattern& pattern, double theta) {
    pattern.validate();
    if (!std::isfinite(theta)) throw precondition_error("antenna gain: theta must be finite");
    return lobe_of(pattern, theta) == Lobe::Main ? main_lobe_gain(pattern, theta) : side_lobe_gain(pattern);
}

inline double gain_db(const AntennaPattern& pattern, double theta) { return units::to_db(gain(pattern, theta)); }

/// True when the main lobe still covers the worst pointing error.
inline bool link_available(const AntennaPattern& pattern, double theta_max) {
    detail::require(theta_max >= 0.0, "link_available: theta_max must be >= 0");
    return main_lobe_half_width(pattern) >= theta_max;
}

} // namespace mmwbeam
