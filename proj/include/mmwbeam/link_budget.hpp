#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmwbeam/antenna.hpp"
#include "mmwbeam/error.hpp"
#include "mmwbeam/units.hpp"

namespace mmwbeam {

/// Friis link between one Tx and one Rx. SI units throughout.
struct LinkBudget {
    double p_t = 10e-3;                                     // W
    double lambda = units::wavelength(60e9);                // m
    double d = 5.0;                                         // m
    double alpha = 2.0;                                     // path-loss exponent
    double n0 = units::dbm_to_watts(-174.0);                // W/Hz, one-sided
    double w = 2.16e9;                                      // Hz

    void validate() const {
        const bool positive = p_t > 0.0 && lambda > 0.0 && d > 0.0 && alpha > 0.0 && n0 > 0.0 && w > 0.0;
        const bool finite = std::isfinite(p_t) && std::isfinite(lambda) && std::isfinite(d) &&
                            std::isfinite(alpha) && std::isfinite(n0) && std::isfinite(w);
        if (!positive || !finite) throw precondition_error("link budget: all fields must be finite and > 0");
        if (!(d > lambda)) throw precondition_error("link budget: distance must exceed the wavelength");
    }

    /// G0 = (lambda / (4 pi d))^alpha.
    double path_gain() const { return std::pow(lambda / (4.0 * units::pi * d), alpha); }

    /// P_t G0 / (N0 W): the SNR with unit antenna gains.
    double reference_snr() const { return p_t * path_gain() / (n0 * w); }
};

/// Two-stage (sector, then beam) training schedule inside one allocated slot.
struct TrainingConfig {
    double omega_t = units::deg(90.0); // sector width, rad
    double omega_r = units::deg(90.0);
    double t_p = 15.6e-6; // s per probe
    double t_s = 10e-3;   // s per slot

    void validate() const {
        const double full = 2.0 * units::pi;
        if (!(omega_t > 0.0 && omega_t <= full && omega_r > 0.0 && omega_r <= full))
            throw precondition_error("training config: sector widths must lie in (0, 2pi]");
        if (!(t_p > 0.0 && t_s > 0.0 && std::isfinite(t_p) && std::isfinite(t_s)))
            throw precondition_error("training config: probe and slot durations must be > 0");
    }

    /// Time spent on the sector sweep, independent of the beam widths.
    double sector_sweep_time() const { return (2.0 * units::pi / omega_t + 2.0 * units::pi / omega_r) * t_p; }
};

enum class Regime { MainLobe, SideLobe, Infeasible };

struct CapacityResult {
    double rate = 0.0; // bits/slot/Hz
    double eta = 0.0;  // data fraction of the slot, clamped to [0, 1]
    Regime regime = Regime::Infeasible;
};

namespace detail {

inline void check_beams(const TrainingConfig& cfg, double phi_t, double phi_r) {
    if (!(phi_t > 0.0 && phi_t <= cfg.omega_t)) throw precondition_error("phi_t must lie in (0, omega_t]");
    if (!(phi_r > 0.0 && phi_r <= cfg.omega_r)) throw precondition_error("phi_r must lie in (0, omega_r]");
}

inline double training_time_unchecked(const TrainingConfig& cfg, double phi_t, double phi_r) {
    return cfg.sector_sweep_time() + (cfg.omega_t / phi_t + cfg.omega_r / phi_r) * cfg.t_p;
}

/// 1 - T_B/T_s without clamping; <= 0 means the slot is used up by training.
inline double eta_unclamped(const TrainingConfig& cfg, double phi_t, double phi_r) {
    return 1.0 - training_time_unchecked(cfg, phi_t, phi_r) / cfg.t_s;
}

inline double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

} // namespace detail

/// Beam-training time T_B for the given fine beamwidths.
inline double training_time(const TrainingConfig& cfg, double phi_t, double phi_r) {
    cfg.validate();
    detail::check_beams(cfg, phi_t, phi_r);
    return detail::training_time_unchecked(cfg, phi_t, phi_r);
}

/// Fraction of the slot left for data, clamped at 0.
inline double eta(const TrainingConfig& cfg, double phi_t, double phi_r) {
    return std::max(0.0, 1.0 - training_time(cfg, phi_t, phi_r) / cfg.t_s);
}

/// Boresight SNR with both main lobes: G0 P_t/(N0 W) * 1.6162^4 / (sin^2(phi_r/2) sin^2(phi_t/2)).
inline double c1(const LinkBudget& budget, double phi_t, double phi_r) {
    budget.validate();
    detail::require(phi_t > 0.0 && phi_r > 0.0, "c1: beamwidths must be > 0");
    const double st = std::sin(phi_t / 2.0);
    const double sr = std::sin(phi_r / 2.0);
    const double k2 = peak_gain_constant * peak_gain_constant;
    return budget.reference_snr() * (k2 * k2) / (sr * sr * st * st);
}

/// Achievable rate for beams `tx`, `rx` pointed theta_t, theta_r off boresight.
inline CapacityResult rate(const LinkBudget& budget, const TrainingConfig& cfg, const AntennaPattern& tx,
                           const AntennaPattern& rx, double theta_t, double theta_r) {
    budget.validate();
    cfg.validate();
    tx.validate();
    rx.validate();
    detail::check_beams(cfg, tx.hpbw, rx.hpbw);

    const double e = detail::eta_unclamped(cfg, tx.hpbw, rx.hpbw);
    const bool side = lobe_of(tx, theta_t) == Lobe::Side || lobe_of(rx, theta_r) == Lobe::Side;
    if (e <= 0.0) return {0.0, 0.0, Regime::Infeasible};

    const double snr = gain(tx, theta_t) * gain(rx, theta_r) * budget.reference_snr();
    return {e * detail::log2_1p(snr), e, side ? Regime::SideLobe : Regime::MainLobe};
}

inline CapacityResult rate(const LinkBudget& budget, const TrainingConfig& cfg, double phi_t, double phi_r,
                           double theta_t, double theta_r, double k1 = 1.0) {
    return rate(budget, cfg, AntennaPattern{phi_t, k1}, AntennaPattern{phi_r, k1}, theta_t, theta_r);
}

} // namespace mmwbeam
