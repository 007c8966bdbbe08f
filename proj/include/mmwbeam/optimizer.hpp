#pragma once

// Capacity-maximizing beamwidths under uniform pointing error.
//
// Two robustness measures are available:
//   * Jensen  - the smooth surrogate that replaces theta^2 by E[theta^2] inside
//               the exponential; maximized by projected gradient ascent.
//   * WorstCase - the rate at |theta| = theta_m on both ends with the full
//               antenna law (side lobes included); discontinuous, so it is
//               maximized on the grid only.
// Every optimization can be checked against an exhaustive grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mmwbeam/antenna.hpp"
#include "mmwbeam/error.hpp"
#include "mmwbeam/link_budget.hpp"
#include "mmwbeam/units.hpp"

namespace mmwbeam {

/// Pointing error uniform on [-theta_m, theta_m].
struct MisalignmentModel {
    double theta_m = 0.0; // rad

    void validate() const {
        if (!(theta_m >= 0.0 && std::isfinite(theta_m)))
            throw precondition_error("misalignment: theta_m must be finite and >= 0");
    }

    double pdf(double theta) const {
        if (theta_m == 0.0) return 0.0; // point mass, no density
        return std::abs(theta) <= theta_m ? 1.0 / (2.0 * theta_m) : 0.0;
    }

    double mean_square() const { return theta_m * theta_m / 3.0; }
};

struct BeamPair {
    double phi_t = 0.0; // rad
    double phi_r = 0.0; // rad

    friend bool operator==(const BeamPair&, const BeamPair&) = default;
};

/// Box limits for the search. A lower limit of 0 means "down to feasibility".
struct BeamBounds {
    double phi_t_min = 0.0;
    double phi_t_max = 0.0;
    double phi_r_min = 0.0;
    double phi_r_max = 0.0;

    /// Tx pinned at its sector width, Rx free.
    static BeamBounds sector_tx(const TrainingConfig& cfg) { return {cfg.omega_t, cfg.omega_t, 0.0, cfg.omega_r}; }

    /// Both ends free to form pencil beams.
    static BeamBounds pencil_pair(const TrainingConfig& cfg) { return {0.0, cfg.omega_t, 0.0, cfg.omega_r}; }
};

enum class ExponentConvention {
    Derived, // theta_m^2 / (3 phi^2), from E[theta^2] = theta_m^2/3
    Printed, // theta_m^2 / (9 phi^2), the (theta_m / 3phi)^2 variant
};

enum class Objective { Jensen, WorstCase };

struct SurrogateOptions {
    ExponentConvention exponent = ExponentConvention::Derived;
};

/// Partial derivatives of the surrogate, bits/slot/Hz per radian.
struct Gradient {
    double d_phi_r = 0.0;
    double d_phi_t = 0.0;
};

namespace detail {

inline double exponent_numerator(const MisalignmentModel& mis, ExponentConvention convention) {
    const double sq = mis.theta_m * mis.theta_m;
    return convention == ExponentConvention::Derived ? sq / 3.0 : sq / 9.0;
}

struct SurrogateTerms {
    double eta;       // unclamped
    double snr;       // c1 * exp(-a/phi_r^2 - a/phi_t^2)
    double a;         // exponent numerator
};

inline SurrogateTerms surrogate_terms(const LinkBudget& budget, const TrainingConfig& cfg,
                                      const MisalignmentModel& mis, const BeamPair& pair,
                                      const SurrogateOptions& opts) {
    const double a = exponent_numerator(mis, opts.exponent);
    const double e = eta_unclamped(cfg, pair.phi_t, pair.phi_r);
    const double st = std::sin(pair.phi_t / 2.0);
    const double sr = std::sin(pair.phi_r / 2.0);
    const double k2 = peak_gain_constant * peak_gain_constant;
    const double c = budget.reference_snr() * (k2 * k2) / (sr * sr * st * st);
    const double snr = c * std::exp(-a / (pair.phi_r * pair.phi_r) - a / (pair.phi_t * pair.phi_t));
    return {e, snr, a};
}

inline double surrogate_value_unchecked(const LinkBudget& budget, const TrainingConfig& cfg,
                                        const MisalignmentModel& mis, const BeamPair& pair,
                                        const SurrogateOptions& opts) {
    const auto t = surrogate_terms(budget, cfg, mis, pair, opts);
    return t.eta <= 0.0 ? 0.0 : t.eta * log2_1p(t.snr);
}

// Gain term:     eta * s/(1+s) * (2a/phi^3 - cot(phi/2)) / ln2
// Overhead term: Omega T_p / (T_s phi^2) * log2(1 + s)
inline Gradient surrogate_gradient_unchecked(const LinkBudget& budget, const TrainingConfig& cfg,
                                             const MisalignmentModel& mis, const BeamPair& pair,
                                             const SurrogateOptions& opts) {
    const auto t = surrogate_terms(budget, cfg, mis, pair, opts);
    const double share = t.snr / (1.0 + t.snr);
    const double level = log2_1p(t.snr);
    auto partial = [&](double phi, double omega) {
        const double gain_term =
            t.eta * share * (2.0 * t.a / (phi * phi * phi) - 1.0 / std::tan(phi / 2.0)) / std::numbers::ln2;
        const double overhead_term = omega * cfg.t_p / (cfg.t_s * phi * phi) * level;
        return gain_term + overhead_term;
    };
    return {partial(pair.phi_r, cfg.omega_r), partial(pair.phi_t, cfg.omega_t)};
}

inline void check_surrogate_inputs(const LinkBudget& budget, const TrainingConfig& cfg,
                                   const MisalignmentModel& mis, const BeamPair& pair) {
    budget.validate();
    cfg.validate();
    mis.validate();
    check_beams(cfg, pair.phi_t, pair.phi_r);
}

} // namespace detail

/// Jensen surrogate eta * log2(1 + c1 exp(-E[theta^2]/phi_r^2 - E[theta^2]/phi_t^2)).
/// The exponent omits the 4 ln2 k1 factor of the antenna law, matching the
/// gradient below exactly.
inline CapacityResult surrogate_objective(const LinkBudget& budget, const TrainingConfig& cfg,
                                          const MisalignmentModel& mis, const BeamPair& pair,
                                          const SurrogateOptions& opts = {}) {
    detail::check_surrogate_inputs(budget, cfg, mis, pair);
    const auto t = detail::surrogate_terms(budget, cfg, mis, pair, opts);
    if (t.eta <= 0.0) return {0.0, 0.0, Regime::Infeasible};
    return {t.eta * detail::log2_1p(t.snr), t.eta, Regime::MainLobe};
}

/// Analytic gradient of surrogate_objective. Requires a strictly interior,
/// feasible pair.
inline Gradient surrogate_gradient(const LinkBudget& budget, const TrainingConfig& cfg, const MisalignmentModel& mis,
                                   const BeamPair& pair, const SurrogateOptions& opts = {}) {
    detail::check_surrogate_inputs(budget, cfg, mis, pair);
    if (!(pair.phi_t < cfg.omega_t && pair.phi_r < cfg.omega_r))
        throw precondition_error("surrogate_gradient: pair must be strictly inside (0, omega)");
    if (detail::eta_unclamped(cfg, pair.phi_t, pair.phi_r) <= 0.0)
        throw precondition_error("surrogate_gradient: pair is infeasible (eta <= 0)");
    return detail::surrogate_gradient_unchecked(budget, cfg, mis, pair, opts);
}

/// Rate when both ends sit at the edge of the error interval.
inline CapacityResult worst_case_objective(const LinkBudget& budget, const TrainingConfig& cfg,
                                           const MisalignmentModel& mis, const BeamPair& pair, double k1 = 1.0) {
    mis.validate();
    return rate(budget, cfg, pair.phi_t, pair.phi_r, mis.theta_m, mis.theta_m, k1);
}

/// Smallest common beamwidth phi (both ends) with eta(phi, phi) >= 0.
inline double min_feasible_beamwidth(const TrainingConfig& cfg) {
    cfg.validate();
    const double ratio = cfg.t_p / cfg.t_s;
    const double denom = 1.0 - (2.0 * units::pi / cfg.omega_t + 2.0 * units::pi / cfg.omega_r) * ratio;
    if (denom <= 0.0) throw infeasible_error("sector sweep alone exceeds the slot");
    if (detail::eta_unclamped(cfg, cfg.omega_t, cfg.omega_r) <= 0.0)
        throw infeasible_error("no beamwidth pair leaves time for data in the slot");
    return (cfg.omega_t + cfg.omega_r) * ratio / denom;
}

enum class Side { Tx, Rx };

/// Smallest beamwidth on `side` with eta >= 0 when the other end uses `other_phi`.
inline double min_feasible_beamwidth(const TrainingConfig& cfg, Side side, double other_phi) {
    cfg.validate();
    detail::require(other_phi > 0.0, "min_feasible_beamwidth: other_phi must be > 0");
    const double other_omega = side == Side::Tx ? cfg.omega_r : cfg.omega_t;
    const double own_omega = side == Side::Tx ? cfg.omega_t : cfg.omega_r;
    const double budget = cfg.t_s - cfg.sector_sweep_time() - other_omega / other_phi * cfg.t_p;
    if (budget <= 0.0) throw infeasible_error("no time left for this side's beam probes");
    return own_omega * cfg.t_p / budget;
}

/// Number of local maxima of a sampled curve. A run of equal samples counts
/// once, and only if it is strictly above both neighbouring samples (or the
/// curve ends there).
inline std::size_t count_local_maxima(std::span<const double> values) {
    std::size_t count = 0;
    std::size_t i = 0;
    const std::size_t n = values.size();
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) ++j;
        const bool left_ok = i == 0 || values[i - 1] < values[i];
        const bool right_ok = j + 1 == n || values[j + 1] < values[i];
        if (left_ok && right_ok) ++count;
        i = j + 1;
    }
    return count;
}

/// Points lo, lo+step, ... up to hi, always ending exactly at hi.
inline std::vector<double> grid_axis(double lo, double hi, double step) {
    detail::require(step > 0.0, "grid_axis: step must be > 0");
    detail::require(lo <= hi, "grid_axis: lo must not exceed hi");
    std::vector<double> axis;
    for (std::size_t k = 0;; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        if (x > hi - 1e-9 * step) break;
        axis.push_back(x);
    }
    axis.push_back(hi);
    return axis;
}

struct GridResult {
    BeamPair pair;
    double objective = -std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

/// Exhaustive argmax over axis_t x axis_r. Ties go to the lowest (t, r) index,
/// so the answer does not depend on the number of workers.
inline GridResult grid_search(const std::function<double(const BeamPair&)>& objective,
                              std::span<const double> axis_t, std::span<const double> axis_r,
                              unsigned workers = 1) {
    detail::require(!axis_t.empty() && !axis_r.empty(), "grid_search: axes must be non-empty");
    struct RowBest {
        double value = -std::numeric_limits<double>::infinity();
        std::size_t r = 0;
    };
    std::vector<RowBest> rows(axis_t.size());
    auto scan = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            RowBest best;
            for (std::size_t r = 0; r < axis_r.size(); ++r) {
                const double v = objective({axis_t[t], axis_r[r]});
                if (v > best.value) best = {v, r};
            }
            rows[t] = best;
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(axis_t.size())));
    if (workers == 1) {
        scan(0, axis_t.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (axis_t.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(axis_t.size(), b + chunk);
            if (b < e) pool.emplace_back(scan, b, e);
        }
    }
    GridResult result;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].value > result.objective) {
            result.objective = rows[t].value;
            result.pair = {axis_t[t], axis_r[rows[t].r]};
        }
    }
    result.evaluations = axis_t.size() * axis_r.size();
    return result;
}

struct OptimizerOptions {
    Objective objective = Objective::Jensen;
    ExponentConvention exponent = ExponentConvention::Derived;
    double k1 = 1.0;                      // antenna law, WorstCase only
    double grid_step = units::deg(0.1);   // oracle resolution
    int max_iterations = 10000;
    double tolerance = 1e-9;              // scaled projected gradient
    double armijo = 1e-4;
    bool verify_with_grid = true;
    bool fallback_to_grid = true;
    unsigned workers = 1;
};

struct OptimizationResult {
    BeamPair pair;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool used_grid_fallback = false;
    bool grid_checked = false;
    bool grid_check_pass = false;
    BeamPair grid_pair;
    double grid_objective = 0.0;
    double scaled_gradient = 0.0; // max |phi_i dF/dphi_i| / max(1, F) over free coordinates
};

class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, BeamPair best, double objective)
        : std::runtime_error(what), best_(best), objective_(objective) {}

    BeamPair best() const noexcept { return best_; }
    double objective() const noexcept { return objective_; }

private:
    BeamPair best_;
    double objective_;
};

/// Search box actually used: the user's limits intersected with eta > 0.
inline BeamBounds effective_bounds(const TrainingConfig& cfg, const BeamBounds& bounds) {
    cfg.validate();
    detail::require(bounds.phi_t_min >= 0.0 && bounds.phi_r_min >= 0.0, "bounds: lower limits must be >= 0");
    detail::require(bounds.phi_t_max > 0.0 && bounds.phi_t_max <= cfg.omega_t, "bounds: phi_t_max must lie in (0, omega_t]");
    detail::require(bounds.phi_r_max > 0.0 && bounds.phi_r_max <= cfg.omega_r, "bounds: phi_r_max must lie in (0, omega_r]");
    detail::require(bounds.phi_t_min <= bounds.phi_t_max && bounds.phi_r_min <= bounds.phi_r_max,
                    "bounds: lower limit exceeds upper limit");

    constexpr double margin = 1.0 + 1e-9;
    BeamBounds box = bounds;
    box.phi_t_min = std::max(bounds.phi_t_min, min_feasible_beamwidth(cfg, Side::Tx, bounds.phi_r_max) * margin);
    box.phi_r_min = std::max(bounds.phi_r_min, min_feasible_beamwidth(cfg, Side::Rx, bounds.phi_t_max) * margin);
    if (box.phi_t_min > box.phi_t_max || box.phi_r_min > box.phi_r_max)
        throw infeasible_error("no feasible beam pair inside the requested bounds");
    return box;
}

namespace detail {

struct AscentState {
    BeamPair x;
    double f = 0.0;
    Gradient g;
};

inline double projected_component(double x, double g, double lo, double hi) {
    if (lo == hi) return 0.0;
    if (x <= lo && g < 0.0) return 0.0;
    if (x >= hi && g > 0.0) return 0.0;
    return g;
}

inline double scaled_measure(const AscentState& s, const BeamBounds& box) {
    const double pt = projected_component(s.x.phi_t, s.g.d_phi_t, box.phi_t_min, box.phi_t_max);
    const double pr = projected_component(s.x.phi_r, s.g.d_phi_r, box.phi_r_min, box.phi_r_max);
    return std::max(std::abs(pt * s.x.phi_t), std::abs(pr * s.x.phi_r)) / std::max(1.0, std::abs(s.f));
}

} // namespace detail

inline OptimizationResult optimize_beamwidths(const LinkBudget& budget, const TrainingConfig& cfg,
                                              const MisalignmentModel& mis, const BeamBounds& bounds,
                                              const OptimizerOptions& opts = {}) {
    budget.validate();
    mis.validate();
    const BeamBounds box = effective_bounds(cfg, bounds);
    const SurrogateOptions sopts{opts.exponent};

    std::function<double(const BeamPair&)> objective;
    if (opts.objective == Objective::Jensen) {
        objective = [&](const BeamPair& p) { return detail::surrogate_value_unchecked(budget, cfg, mis, p, sopts); };
    } else {
        objective = [&](const BeamPair& p) { return worst_case_objective(budget, cfg, mis, p, opts.k1).rate; };
    }

    OptimizationResult result;
    auto run_grid = [&] {
        const auto axis_t = grid_axis(box.phi_t_min, box.phi_t_max, opts.grid_step);
        const auto axis_r = grid_axis(box.phi_r_min, box.phi_r_max, opts.grid_step);
        const auto g = grid_search(objective, axis_t, axis_r, opts.workers);
        result.grid_checked = true;
        result.grid_pair = g.pair;
        result.grid_objective = g.objective;
    };

    if (opts.objective == Objective::WorstCase) {
        run_grid();
        result.pair = result.grid_pair;
        result.objective = result.grid_objective;
        result.converged = true;
        result.grid_check_pass = true;
        return result;
    }

    auto project = [&](BeamPair p) {
        return BeamPair{std::clamp(p.phi_t, box.phi_t_min, box.phi_t_max),
                        std::clamp(p.phi_r, box.phi_r_min, box.phi_r_max)};
    };
    auto evaluate = [&](const BeamPair& p) {
        detail::AscentState s{p, objective(p), detail::surrogate_gradient_unchecked(budget, cfg, mis, p, sopts)};
        if (box.phi_t_min == box.phi_t_max) s.g.d_phi_t = 0.0;
        if (box.phi_r_min == box.phi_r_max) s.g.d_phi_r = 0.0;
        return s;
    };

    detail::AscentState cur = evaluate(project({cfg.omega_t / 4.0, cfg.omega_r / 4.0}));
    if (cur.f <= 0.0) cur = evaluate({box.phi_t_max, box.phi_r_max});

    const double gmax = std::max(std::abs(cur.g.d_phi_t), std::abs(cur.g.d_phi_r));
    double step = gmax > 0.0 ? 0.1 * std::min(cur.x.phi_t, cur.x.phi_r) / gmax : 1.0;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (detail::scaled_measure(cur, box) < opts.tolerance) {
            result.converged = true;
            break;
        }
        bool accepted = false;
        detail::AscentState next;
        for (int halvings = 0; halvings < 200; ++halvings, step *= 0.5) {
            const BeamPair trial = project({cur.x.phi_t + step * cur.g.d_phi_t, cur.x.phi_r + step * cur.g.d_phi_r});
            if (trial == cur.x) break;
            next = evaluate(trial);
            const double ascent = cur.g.d_phi_t * (trial.phi_t - cur.x.phi_t) + cur.g.d_phi_r * (trial.phi_r - cur.x.phi_r);
            const bool armijo = next.f >= cur.f + opts.armijo * ascent;
            // Below the resolution of f, progress is judged by the gradient.
            const bool flat = next.f > 0.0 && std::abs(next.f - cur.f) <= 1e-14 * std::abs(cur.f) &&
                              detail::scaled_measure(next, box) < detail::scaled_measure(cur, box);
            if (armijo || flat) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        // Barzilai-Borwein guess for the next trial step.
        const double st = next.x.phi_t - cur.x.phi_t;
        const double sr = next.x.phi_r - cur.x.phi_r;
        const double yt = cur.g.d_phi_t - next.g.d_phi_t;
        const double yr = cur.g.d_phi_r - next.g.d_phi_r;
        const double sy = st * yt + sr * yr;
        const double ss = st * st + sr * sr;
        step = sy > 0.0 ? ss / sy : step * 4.0;
        step = std::clamp(step, 1e-30, 1e30);
        cur = next;
    }
    result.iterations = it;
    result.pair = cur.x;
    result.objective = cur.f;
    result.scaled_gradient = detail::scaled_measure(cur, box);

    if (opts.verify_with_grid || (!result.converged && opts.fallback_to_grid)) run_grid();

    if (!result.converged) {
        if (!opts.fallback_to_grid)
            throw convergence_error("beamwidth optimization did not converge", cur.x, cur.f);
        if (result.grid_objective > result.objective) {
            result.pair = result.grid_pair;
            result.objective = result.grid_objective;
            result.used_grid_fallback = true;
        }
    }

    if (result.grid_checked) {
        const double cell = opts.grid_step * (1.0 + 1e-9);
        result.grid_check_pass = std::abs(result.pair.phi_t - result.grid_pair.phi_t) <= cell &&
                                 std::abs(result.pair.phi_r - result.grid_pair.phi_r) <= cell &&
                                 result.objective >= result.grid_objective - 1e-9;
    }
    return result;
}

} // namespace mmwbeam
