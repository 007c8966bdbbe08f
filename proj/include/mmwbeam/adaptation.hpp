#pragma once

// RSSI-threshold beam widening over consecutive slots.
//
// Each slot draws a pointing error theta (held for the slot) that applies to
// both ends. If the slot's RSSI falls below the main-lobe-average threshold of
// the current pair, both beams widen by delta_phi for the next slot. The first
// slot that clears the threshold stops adaptation for good, unless `rearm`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mmwbeam/antenna.hpp"
#include "mmwbeam/error.hpp"
#include "mmwbeam/link_budget.hpp"
#include "mmwbeam/optimizer.hpp"
#include "mmwbeam/rng.hpp"
#include "mmwbeam/units.hpp"

namespace mmwbeam {

struct MainLobeAverage {};
struct CustomThreshold {
    double watts = 0.0;
};
using ThresholdMode = std::variant<MainLobeAverage, CustomThreshold>;

struct AdaptationConfig {
    double delta_phi = units::deg(1.0);
    double delta_theta = units::deg(2.0);
    ThresholdMode threshold = MainLobeAverage{};
    std::size_t max_slots = 10;
    std::uint64_t seed = 42;
    bool enabled = true;
    bool rearm = false;           // keep checking after the first stop
    std::size_t draws_per_slot = 1;
    double k1 = 1.0;

    void validate() const {
        if (!(delta_phi > 0.0)) throw precondition_error("adaptation: delta_phi must be > 0");
        if (!(delta_theta > 0.0)) throw precondition_error("adaptation: delta_theta must be > 0");
        if (max_slots < 1) throw precondition_error("adaptation: max_slots must be >= 1");
        if (draws_per_slot < 1) throw precondition_error("adaptation: draws_per_slot must be >= 1");
        if (const auto* c = std::get_if<CustomThreshold>(&threshold); c && !(c->watts > 0.0))
            throw precondition_error("adaptation: custom threshold must be > 0 W");
    }
};

struct SlotTrace {
    std::size_t slot_index = 0;
    double phi_t = 0.0;
    double phi_r = 0.0;
    double theta_drawn = 0.0; // first draw of the slot
    double mean_rssi = 0.0;   // W
    double threshold = 0.0;   // W
    double capacity = 0.0;    // bits/slot/Hz
    bool adapted = false;     // mean_rssi < threshold
    bool widened = false;     // beams widened after this slot
};

struct AdaptationRun {
    std::vector<SlotTrace> trace;
    std::optional<std::size_t> stabilized_at; // 1-based slot of the first threshold pass
    bool clamped = false;                     // hit the sector width; adaptation ended there
    std::size_t retrips = 0;                  // threshold misses after the first pass

    double mean_capacity() const {
        double s = 0.0;
        for (const auto& t : trace) s += t.capacity;
        return trace.empty() ? 0.0 : s / static_cast<double>(trace.size());
    }
};

/// Received power G_t(theta) G_r(theta) G0 P_t with the full antenna law.
inline double rssi(const LinkBudget& budget, const BeamPair& pair, double theta, double k1 = 1.0) {
    return gain({pair.phi_t, k1}, theta) * gain({pair.phi_r, k1}, theta) * budget.path_gain() * budget.p_t;
}

/// Mean main-lobe RSSI over theta = k * step, |theta| <= 1.3 phi, where phi is
/// the narrower beam of the pair and step = min(delta_theta, 1.3 phi). The cap
/// keeps at least the two edges and boresight in the sample.
inline double rssi_threshold(const LinkBudget& budget, const BeamPair& pair, double delta_theta, double k1 = 1.0) {
    budget.validate();
    detail::require(delta_theta > 0.0, "rssi_threshold: delta_theta must be > 0");
    const AntennaPattern tx{pair.phi_t, k1};
    const AntennaPattern rx{pair.phi_r, k1};
    tx.validate();
    rx.validate();
    const double half = main_lobe_factor * std::min(pair.phi_t, pair.phi_r);
    const double step = std::min(delta_theta, half);
    const auto k_max = static_cast<long>(std::floor(half / step * (1.0 + 1e-12)));
    double sum = 0.0;
    for (long k = -k_max; k <= k_max; ++k) {
        const double theta = std::min(static_cast<double>(k) * step, half);
        sum += main_lobe_gain(tx, theta) * main_lobe_gain(rx, theta);
    }
    return sum / static_cast<double>(2 * k_max + 1) * budget.path_gain() * budget.p_t;
}

inline AdaptationRun run_adaptation(const LinkBudget& budget, const TrainingConfig& cfg, const AdaptationConfig& adapt,
                                    const MisalignmentModel& mis, const BeamPair& initial) {
    budget.validate();
    cfg.validate();
    adapt.validate();
    mis.validate();
    detail::check_beams(cfg, initial.phi_t, initial.phi_r);

    auto threshold_for = [&](const BeamPair& p) {
        if (const auto* c = std::get_if<CustomThreshold>(&adapt.threshold)) return c->watts;
        return rssi_threshold(budget, p, adapt.delta_theta, adapt.k1);
    };

    AdaptationRun run;
    run.trace.reserve(adapt.max_slots);
    CounterRng rng(adapt.seed);
    BeamPair pair = initial;
    bool active = adapt.enabled;
    double threshold = threshold_for(pair);

    for (std::size_t slot = 0; slot < adapt.max_slots; ++slot) {
        SlotTrace t;
        t.slot_index = slot;
        t.phi_t = pair.phi_t;
        t.phi_r = pair.phi_r;
        double power = 0.0;
        double capacity = 0.0;
        for (std::size_t j = 0; j < adapt.draws_per_slot; ++j) {
            const double theta = rng.uniform(-mis.theta_m, mis.theta_m);
            if (j == 0) t.theta_drawn = theta;
            power += rssi(budget, pair, theta, adapt.k1);
            capacity += rate(budget, cfg, pair.phi_t, pair.phi_r, theta, theta, adapt.k1).rate;
        }
        const auto draws = static_cast<double>(adapt.draws_per_slot);
        t.mean_rssi = power / draws;
        t.capacity = capacity / draws;
        t.threshold = threshold;
        t.adapted = t.mean_rssi < t.threshold;

        if (t.adapted && run.stabilized_at) ++run.retrips;
        if (active) {
            if (t.adapted) {
                const BeamPair wider{std::min(pair.phi_t + adapt.delta_phi, cfg.omega_t),
                                     std::min(pair.phi_r + adapt.delta_phi, cfg.omega_r)};
                t.widened = wider != pair;
                pair = wider;
                threshold = threshold_for(pair);
                if (pair.phi_t == cfg.omega_t && pair.phi_r == cfg.omega_r) {
                    run.clamped = true;
                    active = false;
                }
            } else {
                if (!run.stabilized_at) run.stabilized_at = slot + 1;
                active = adapt.rearm;
            }
        }
        run.trace.push_back(t);
    }
    return run;
}

/// Aggregate of paired runs (same seeds, adaptation on and off).
struct AdaptationSummary {
    std::size_t runs = 0;
    double mean_capacity_adaptive = 0.0;
    double mean_capacity_static = 0.0;
    double improvement_ratio = 0.0;
    double mean_slots_to_stabilize = 0.0; // runs that never stabilize count as max_slots
    std::size_t stabilized_runs = 0;
    std::size_t adaptive_wins = 0;       // runs whose adaptive mean >= static mean
    std::size_t runs_with_retrips = 0;
    bool rearm = false;
};

inline AdaptationSummary summarize_adaptation(const LinkBudget& budget, const TrainingConfig& cfg,
                                              const AdaptationConfig& adapt, const MisalignmentModel& mis,
                                              const BeamPair& initial, std::size_t runs) {
    detail::require(runs >= 1, "summarize_adaptation: runs must be >= 1");
    AdaptationSummary s;
    s.runs = runs;
    s.rearm = adapt.rearm;
    double stabilize_sum = 0.0;
    for (std::size_t i = 0; i < runs; ++i) {
        AdaptationConfig on = adapt;
        on.seed = adapt.seed + i;
        on.enabled = true;
        AdaptationConfig off = on;
        off.enabled = false;
        const auto a = run_adaptation(budget, cfg, on, mis, initial);
        const auto b = run_adaptation(budget, cfg, off, mis, initial);
        const double ma = a.mean_capacity();
        const double mb = b.mean_capacity();
        s.mean_capacity_adaptive += ma;
        s.mean_capacity_static += mb;
        if (ma >= mb) ++s.adaptive_wins;
        if (a.stabilized_at) {
            ++s.stabilized_runs;
            stabilize_sum += static_cast<double>(*a.stabilized_at);
        } else {
            stabilize_sum += static_cast<double>(adapt.max_slots);
        }
        if (a.retrips > 0) ++s.runs_with_retrips;
    }
    const auto n = static_cast<double>(runs);
    s.mean_capacity_adaptive /= n;
    s.mean_capacity_static /= n;
    s.improvement_ratio = s.mean_capacity_static > 0.0 ? s.mean_capacity_adaptive / s.mean_capacity_static : 0.0;
    s.mean_slots_to_stabilize = stabilize_sum / n;
    return s;
}

} // namespace mmwbeam
