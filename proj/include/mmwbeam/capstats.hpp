#pragma once

// Expected rate when only the receiver is misaligned (theta_t = 0,
// theta_r = theta ~ U[-theta_m, theta_m]).
//
// Inside the main lobe the rate is g(theta) = eta log2(1 + c1 exp(-kappa theta^2/phi_r^2))
// with kappa = 4 ln2 k1. g is even and decreasing in |theta|, so both signs of
// theta map onto the same r and
//
//   E[R] = -(1/theta_e) [ r g^-1(r) - \int g~^-1(r) dr ]  from g(theta_e) to g(0)
//
// where g~^-1 drops the "-1" inside the log to make the integral closed-form.
// Past the main lobe the side-lobe rate is mixed in with probability
// 1 - 1.3 phi_r / theta_m.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "mmwbeam/antenna.hpp"
#include "mmwbeam/error.hpp"
#include "mmwbeam/link_budget.hpp"
#include "mmwbeam/optimizer.hpp"
#include "mmwbeam/rng.hpp"

namespace mmwbeam {

enum class CapacityMethod { ClosedFormMainLobe, ClosedFormMixture, MonteCarlo };

struct ExpectedCapacity {
    double value = 0.0; // bits/slot/Hz
    CapacityMethod method = CapacityMethod::ClosedFormMainLobe;
    double p_mm = 1.0; // both ends in their main lobes
    double p_ms = 0.0; // Rx in its side lobe

    // Smallest 2^(r/eta) over the main-lobe integration range; the closed
    // form's approximate inverse is trustworthy when this is >= 1e3.
    double approximation_guard = std::numeric_limits<double>::infinity();

    // Monte Carlo only.
    double std_error = 0.0;
    std::size_t samples = 0;
    double sample_min = 0.0;
    double sample_max = 0.0;

    bool guard_holds() const { return approximation_guard >= approximation_guard_threshold; }

    static constexpr double approximation_guard_threshold = 1e3;
};

/// Forward map for the receiver-only misalignment case.
class RxMisalignmentMap {
public:
    RxMisalignmentMap(const LinkBudget& budget, const TrainingConfig& cfg, const BeamPair& pair, double k1 = 1.0)
        : budget_(budget), tx_{pair.phi_t, k1}, rx_{pair.phi_r, k1} {
        budget.validate();
        cfg.validate();
        tx_.validate();
        rx_.validate();
        detail::check_beams(cfg, pair.phi_t, pair.phi_r);
        eta_ = detail::eta_unclamped(cfg, pair.phi_t, pair.phi_r);
        c1_ = mmwbeam::c1(budget, pair.phi_t, pair.phi_r);
        kappa_ = rx_.gain_exponent();
    }

    bool feasible() const { return eta_ > 0.0; }
    double eta() const { return eta_; }
    double c1() const { return c1_; }
    double kappa() const { return kappa_; }
    double phi_r() const { return rx_.hpbw; }
    double main_lobe_edge() const { return main_lobe_factor * rx_.hpbw; }

    /// g(theta) on the main lobe.
    double forward(double theta) const {
        const double x = theta / rx_.hpbw;
        return eta_ * detail::log2_1p(c1_ * std::exp(-kappa_ * x * x));
    }

    /// Exact inverse of forward on [0, edge]: phi_r/sqrt(kappa) * sqrt(ln(c1 / (2^(r/eta) - 1))).
    double inverse(double r) const {
        const double excess = std::expm1(r / eta_ * std::numbers::ln2); // 2^(r/eta) - 1
        return rx_.hpbw / std::sqrt(kappa_) * std::sqrt(std::max(0.0, std::log(c1_ / excess)));
    }

    /// Inverse with 2^(r/eta) - 1 replaced by 2^(r/eta).
    double inverse_approx(double r) const {
        return rx_.hpbw / std::sqrt(kappa_) * std::sqrt(std::max(0.0, log_ratio(r)));
    }

    /// An antiderivative of inverse_approx.
    double inverse_approx_integral(double r) const {
        const double u = std::max(0.0, log_ratio(r));
        return -rx_.hpbw / std::sqrt(kappa_) * (2.0 * eta_ / (3.0 * std::numbers::ln2)) * u * std::sqrt(u);
    }

    /// Conditional mean of g over |theta| <= edge, by the transformed-variable form.
    double closed_form_mean(double edge) const {
        auto primitive = [&](double r) { return r * inverse(r) - inverse_approx_integral(r); };
        const double hi = forward(0.0);
        const double lo = forward(edge);
        return -(primitive(hi) - primitive(lo)) / edge;
    }

    double guard(double edge) const { return std::exp2(forward(edge) / eta_); }

    /// Rate with Tx at boresight and Rx in its side lobe.
    double side_lobe_rate() const {
        return eta_ * detail::log2_1p(boresight_gain(tx_) * side_lobe_gain(rx_) * budget_.reference_snr());
    }

private:
    // ln(c1 / 2^(r/eta))
    double log_ratio(double r) const { return std::log(c1_) - r / eta_ * std::numbers::ln2; }

    LinkBudget budget_;
    AntennaPattern tx_;
    AntennaPattern rx_;
    double eta_ = 0.0;
    double c1_ = 0.0;
    double kappa_ = 0.0;
};

/// Misalignment angle at which the main-lobe rate equals r. Requires
/// r in the open interval (g(theta_m), g(0)).
inline double g_inverse(const LinkBudget& budget, const TrainingConfig& cfg, const BeamPair& pair,
                        const MisalignmentModel& mis, double r, double k1 = 1.0) {
    mis.validate();
    const RxMisalignmentMap map(budget, cfg, pair, k1);
    if (!map.feasible()) throw domain_error("g_inverse: link is infeasible (eta <= 0)");
    if (mis.theta_m > map.main_lobe_edge()) throw domain_error("g_inverse: theta_m beyond the main lobe");
    if (!(r > map.forward(mis.theta_m) && r < map.forward(0.0)))
        throw domain_error("g_inverse: r outside (g(theta_m), g(0))");
    return map.inverse(r);
}

/// Expected rate when theta_m stays inside the Rx main lobe.
inline ExpectedCapacity expected_capacity_main_lobe(const LinkBudget& budget, const TrainingConfig& cfg,
                                                    const BeamPair& pair, const MisalignmentModel& mis,
                                                    double k1 = 1.0) {
    mis.validate();
    const RxMisalignmentMap map(budget, cfg, pair, k1);
    if (mis.theta_m > map.main_lobe_edge())
        throw precondition_error("expected_capacity_main_lobe: theta_m exceeds 1.3 phi_r, use the mixture form");

    ExpectedCapacity out;
    out.method = CapacityMethod::ClosedFormMainLobe;
    if (!map.feasible()) return out;
    if (mis.theta_m < 1e-12) {
        out.value = map.forward(0.0);
        return out;
    }
    out.value = map.closed_form_mean(mis.theta_m);
    out.approximation_guard = map.guard(mis.theta_m);
    return out;
}

/// Expected rate when theta_m reaches past the Rx main lobe.
inline ExpectedCapacity expected_capacity_mixture(const LinkBudget& budget, const TrainingConfig& cfg,
                                                  const BeamPair& pair, const MisalignmentModel& mis,
                                                  double k1 = 1.0) {
    mis.validate();
    const RxMisalignmentMap map(budget, cfg, pair, k1);
    const double edge = map.main_lobe_edge();
    if (mis.theta_m < edge)
        throw precondition_error("expected_capacity_mixture: theta_m is inside the main lobe, use the main-lobe form");

    ExpectedCapacity out;
    out.method = CapacityMethod::ClosedFormMixture;
    out.p_mm = std::min(1.0, edge / mis.theta_m);
    out.p_ms = 1.0 - out.p_mm;
    if (!map.feasible()) return out;
    out.value = out.p_mm * map.closed_form_mean(edge) + out.p_ms * map.side_lobe_rate();
    out.approximation_guard = map.guard(edge);
    return out;
}

/// Picks the main-lobe or mixture form from theta_m.
inline ExpectedCapacity expected_capacity(const LinkBudget& budget, const TrainingConfig& cfg, const BeamPair& pair,
                                          const MisalignmentModel& mis, double k1 = 1.0) {
    mis.validate();
    const double edge = main_lobe_factor * pair.phi_r;
    return mis.theta_m <= edge ? expected_capacity_main_lobe(budget, cfg, pair, mis, k1)
                               : expected_capacity_mixture(budget, cfg, pair, mis, k1);
}

struct MonteCarloOptions {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 42;
    unsigned workers = 1;
    std::size_t block = 4096; // samples per RNG stream
};

namespace detail {

struct BlockStats {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0; // sum of squared deviations
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x) {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
        min = std::min(min, x);
        max = std::max(max, x);
    }
};

// Pairwise merge in index order; the tree shape depends only on the count.
inline BlockStats reduce_blocks(const std::vector<BlockStats>& blocks, std::size_t begin, std::size_t end) {
    if (end - begin == 1) return blocks[begin];
    const std::size_t mid = begin + (end - begin) / 2;
    const BlockStats a = reduce_blocks(blocks, begin, mid);
    const BlockStats b = reduce_blocks(blocks, mid, end);
    BlockStats m;
    m.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    m.mean = a.mean + delta * (b.count / m.count);
    m.m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / m.count);
    m.min = std::min(a.min, b.min);
    m.max = std::max(a.max, b.max);
    return m;
}

} // namespace detail

/// Sample mean of the exact rate (full antenna law, both lobes) over theta_r ~ U[-theta_m, theta_m].
/// Output is bit-identical for any worker count.
inline ExpectedCapacity monte_carlo_expected_capacity(const LinkBudget& budget, const TrainingConfig& cfg,
                                                      const BeamPair& pair, const MisalignmentModel& mis,
                                                      const MonteCarloOptions& opts = {}, double k1 = 1.0) {
    mis.validate();
    detail::require(opts.samples >= 1, "monte_carlo_expected_capacity: samples must be >= 1");
    detail::require(opts.block >= 1, "monte_carlo_expected_capacity: block must be >= 1");
    budget.validate();
    cfg.validate();
    const AntennaPattern tx{pair.phi_t, k1};
    const AntennaPattern rx{pair.phi_r, k1};
    tx.validate();
    rx.validate();
    detail::check_beams(cfg, pair.phi_t, pair.phi_r);

    const double e = detail::eta_unclamped(cfg, pair.phi_t, pair.phi_r);
    const double scale = e > 0.0 ? e : 0.0;
    const double tx_snr = boresight_gain(tx) * budget.reference_snr();
    const double side = side_lobe_gain(rx);
    const double edge = main_lobe_factor * rx.hpbw;

    const std::size_t n_blocks = (opts.samples + opts.block - 1) / opts.block;
    std::vector<detail::BlockStats> blocks(n_blocks);
    auto run = [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            CounterRng rng(opts.seed, b);
            const std::size_t count = std::min(opts.block, opts.samples - b * opts.block);
            detail::BlockStats s;
            for (std::size_t i = 0; i < count; ++i) {
                const double theta = rng.uniform(-mis.theta_m, mis.theta_m);
                const double g = std::abs(theta) <= edge ? main_lobe_gain(rx, theta) : side;
                s.add(scale * detail::log2_1p(tx_snr * g));
            }
            blocks[b] = s;
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(n_blocks)));
    if (workers == 1) {
        run(0, n_blocks);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n_blocks + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t end = std::min(n_blocks, b + chunk);
            if (b < end) pool.emplace_back(run, b, end);
        }
    }
    const auto total = detail::reduce_blocks(blocks, 0, n_blocks);

    ExpectedCapacity out;
    out.method = CapacityMethod::MonteCarlo;
    const double n = static_cast<double>(opts.samples);
    out.value = total.mean;
    const double var = opts.samples > 1 ? total.m2 / (n - 1.0) : 0.0;
    out.std_error = std::sqrt(var / n);
    out.samples = opts.samples;
    out.sample_min = total.min;
    out.sample_max = total.max;
    out.p_mm = mis.theta_m > 0.0 ? std::min(1.0, edge / mis.theta_m) : 1.0;
    out.p_ms = 1.0 - out.p_mm;
    return out;
}

} // namespace mmwbeam
