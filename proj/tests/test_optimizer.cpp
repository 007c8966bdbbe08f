#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mmwbeam/optimizer.hpp"
#include "mmwbeam/rng.hpp"

using namespace mmwbeam;
using units::deg;

namespace {

// Frozen from a 50-digit solve of eta(phi, phi) = 0 at the defaults.
constexpr double symmetric_min_beam_10ms = 0.0049628205399385;

TrainingConfig slot(double t_s) {
    TrainingConfig c;
    c.t_s = t_s;
    return c;
}

double fd(const std::function<double(double)>& f, double x, double h) { return (f(x + h) - f(x - h)) / (2.0 * h); }

} // namespace

TEST(Misalignment, UniformMoments) {
    const MisalignmentModel m{deg(6.0)};
    EXPECT_DOUBLE_EQ(m.pdf(0.0), 1.0 / (2.0 * deg(6.0)));
    EXPECT_EQ(m.pdf(deg(6.1)), 0.0);
    EXPECT_DOUBLE_EQ(m.mean_square(), deg(6.0) * deg(6.0) / 3.0);
    EXPECT_THROW(MisalignmentModel{-1.0}.validate(), precondition_error);
}

TEST(Surrogate, AlignedEqualsPerfectRate) {
    const LinkBudget b;
    const TrainingConfig c;
    const BeamPair p{deg(12.0), deg(4.0)};
    const double expected = eta(c, p.phi_t, p.phi_r) * std::log2(1.0 + c1(b, p.phi_t, p.phi_r));
    EXPECT_NEAR(surrogate_objective(b, c, {0.0}, p).rate, expected, 1e-12 * expected);
}

TEST(Surrogate, SymmetricInEnds) {
    const LinkBudget b;
    const TrainingConfig c;
    const MisalignmentModel m{deg(5.0)};
    EXPECT_DOUBLE_EQ(surrogate_objective(b, c, m, {deg(3.0), deg(9.0)}).rate,
                     surrogate_objective(b, c, m, {deg(9.0), deg(3.0)}).rate);
}

TEST(Surrogate, InfeasiblePairIsTaggedZero) {
    const auto r = surrogate_objective(LinkBudget{}, slot(1e-3), {deg(3.0)}, {deg(2.0), deg(2.0)});
    EXPECT_EQ(r.rate, 0.0);
    EXPECT_EQ(r.regime, Regime::Infeasible);
}

TEST(Surrogate, PrintedExponentIsMilder) {
    const LinkBudget b;
    const TrainingConfig c;
    const MisalignmentModel m{deg(9.0)};
    const BeamPair p{deg(90.0), deg(5.0)};
    EXPECT_GT(surrogate_objective(b, c, m, p, {ExponentConvention::Printed}).rate, surrogate_objective(b, c, m, p).rate);
}

TEST(Gradient, MatchesCentralDifferences) {
    const LinkBudget b;
    CounterRng rng(2024);
    int checked = 0;
    while (checked < 100) {
        const TrainingConfig c = slot(rng.uniform01() < 0.5 ? 10e-3 : 1.0);
        const MisalignmentModel m{deg(15.0 * rng.uniform01())};
        const BeamPair p{deg(rng.uniform(0.5, 89.0)), deg(rng.uniform(0.5, 89.0))};
        if (detail::eta_unclamped(c, p.phi_t, p.phi_r) < 0.05) continue;
        const auto g = surrogate_gradient(b, c, m, p);
        const double h = 1e-6;
        const double dr = fd([&](double x) { return surrogate_objective(b, c, m, {p.phi_t, x}).rate; }, p.phi_r, h);
        const double dt = fd([&](double x) { return surrogate_objective(b, c, m, {x, p.phi_r}).rate; }, p.phi_t, h);
        const double scale = std::max(std::abs(dr), std::abs(dt));
        EXPECT_LT(std::abs(g.d_phi_r - dr), 1e-4 * std::max(std::abs(dr), 1e-3 * scale));
        EXPECT_LT(std::abs(g.d_phi_t - dt), 1e-4 * std::max(std::abs(dt), 1e-3 * scale));
        ++checked;
    }
}

TEST(Gradient, AlignedCaseHasNoMisalignmentTerm) {
    const LinkBudget b;
    const TrainingConfig c;
    const BeamPair p{deg(20.0), deg(6.0)};
    const auto g = surrogate_gradient(b, c, {0.0}, p);
    const double s = c1(b, p.phi_t, p.phi_r);
    const double e = eta(c, p.phi_t, p.phi_r);
    const double expected = e * s / (1.0 + s) * (-1.0 / std::tan(p.phi_r / 2.0)) / std::numbers::ln2 +
                            c.omega_r * c.t_p / (c.t_s * p.phi_r * p.phi_r) * std::log2(1.0 + s);
    EXPECT_NEAR(g.d_phi_r, expected, 1e-12 * std::abs(expected));
}

TEST(Gradient, RejectsBoundaryPairs) {
    const TrainingConfig c;
    EXPECT_THROW(surrogate_gradient(LinkBudget{}, c, {0.0}, {c.omega_t, deg(5.0)}), precondition_error);
}

TEST(Feasibility, SymmetricMinimum) {
    const TrainingConfig c;
    const double phi = min_feasible_beamwidth(c);
    EXPECT_NEAR(phi, symmetric_min_beam_10ms, 1e-15);
    EXPECT_NEAR(detail::eta_unclamped(c, phi, phi), 0.0, 1e-12);
}

TEST(Feasibility, SectorScanAloneTooLong) {
    EXPECT_THROW(min_feasible_beamwidth(slot(100e-6)), infeasible_error);
}

TEST(Feasibility, VanishesForLongSlots) {
    EXPECT_LT(min_feasible_beamwidth(slot(1e6)), 1e-8);
    EXPECT_GT(min_feasible_beamwidth(slot(1e6)), 0.0);
}

TEST(Feasibility, PerSideMinimumZeroesEta) {
    const TrainingConfig c;
    const double phi = min_feasible_beamwidth(c, Side::Rx, c.omega_t);
    EXPECT_NEAR(detail::eta_unclamped(c, c.omega_t, phi), 0.0, 1e-12);
}

TEST(LocalMaxima, Counting) {
    const std::vector<double> single{1, 2, 3, 2, 1};
    const std::vector<double> twin{1, 2, 1, 2, 1};
    const std::vector<double> flat{0, 0, 0};
    const std::vector<double> rising{1, 2, 3};
    const std::vector<double> plateau{1, 3, 3, 2};
    EXPECT_EQ(count_local_maxima(single), 1u);
    EXPECT_EQ(count_local_maxima(twin), 2u);
    EXPECT_EQ(count_local_maxima(flat), 1u);
    EXPECT_EQ(count_local_maxima(rising), 1u);
    EXPECT_EQ(count_local_maxima(plateau), 1u);
}

TEST(Grid, AxisEndsAtUpperBound) {
    const auto a = grid_axis(0.0, 1.0, 0.3);
    EXPECT_EQ(a.front(), 0.0);
    EXPECT_EQ(a.back(), 1.0);
    EXPECT_EQ(a.size(), 5u);
    EXPECT_EQ(grid_axis(0.0, 1.0, 0.25).size(), 5u);
}

TEST(Grid, ParallelSearchMatchesSerial) {
    const auto axis = grid_axis(0.1, 1.5, 0.01);
    auto f = [](const BeamPair& p) { return -std::pow(p.phi_t - 0.7, 2) - std::pow(p.phi_r - 0.3, 2); };
    const auto a = grid_search(f, axis, axis, 1);
    const auto b = grid_search(f, axis, axis, 7);
    EXPECT_EQ(a.pair, b.pair);
    EXPECT_EQ(a.objective, b.objective);
}

TEST(Optimizer, NarrowestBeamWinsWithPerfectAlignment) {
    const LinkBudget b;
    const auto c = slot(1.0);
    const auto bounds = BeamBounds::sector_tx(c);
    const auto r = optimize_beamwidths(b, c, {0.0}, bounds);
    EXPECT_NEAR(r.pair.phi_r, effective_bounds(c, bounds).phi_r_min, deg(0.1));
    EXPECT_TRUE(r.grid_check_pass);
}

TEST(Optimizer, AgreesWithGridAndIsStationary) {
    const LinkBudget b;
    for (double t_s : {10e-3, 1.0}) {
        for (double theta : {0.0, 3.0, 6.0, 9.0, 15.0}) {
            const auto c = slot(t_s);
            for (const auto& bounds : {BeamBounds::sector_tx(c), BeamBounds::pencil_pair(c)}) {
                const auto r = optimize_beamwidths(b, c, {deg(theta)}, bounds);
                EXPECT_TRUE(r.converged);
                EXPECT_TRUE(r.grid_check_pass) << t_s << " " << theta;
                EXPECT_GE(r.objective, r.grid_objective - 1e-9);
                EXPECT_LT(r.scaled_gradient, 1e-6);
            }
        }
    }
}

TEST(Optimizer, OptimalReceiveBeamGrowsWithMisalignment) {
    const LinkBudget b;
    for (double t_s : {10e-3, 1.0}) {
        const auto c = slot(t_s);
        double prev = 0.0;
        for (double theta : {0.0, 3.0, 6.0, 9.0, 15.0}) {
            const auto r = optimize_beamwidths(b, c, {deg(theta)}, BeamBounds::sector_tx(c));
            EXPECT_GE(r.pair.phi_r, prev);
            prev = r.pair.phi_r;
        }
    }
}

TEST(Optimizer, ArgmaxInvariantToCommonPowerScaling) {
    LinkBudget a;
    LinkBudget b = a;
    b.p_t *= 4.0;
    b.n0 *= 4.0;
    const TrainingConfig c;
    OptimizerOptions opts;
    opts.verify_with_grid = false;
    for (double theta : {0.0, 6.0}) {
        const auto ra = optimize_beamwidths(a, c, {deg(theta)}, BeamBounds::pencil_pair(c), opts);
        const auto rb = optimize_beamwidths(b, c, {deg(theta)}, BeamBounds::pencil_pair(c), opts);
        EXPECT_EQ(ra.pair, rb.pair);
        EXPECT_EQ(ra.objective, rb.objective);
    }
}

TEST(Optimizer, NonConvergenceCarriesBestIterate) {
    OptimizerOptions opts;
    opts.max_iterations = 1;
    opts.fallback_to_grid = false;
    opts.verify_with_grid = false;
    const TrainingConfig c;
    try {
        optimize_beamwidths(LinkBudget{}, c, {deg(6.0)}, BeamBounds::pencil_pair(c), opts);
        FAIL() << "expected convergence_error";
    } catch (const convergence_error& e) {
        EXPECT_GT(e.objective(), 0.0);
        EXPECT_GT(e.best().phi_r, 0.0);
    }
}

TEST(Optimizer, FallsBackToGrid) {
    OptimizerOptions opts;
    opts.max_iterations = 1;
    const TrainingConfig c;
    const auto r = optimize_beamwidths(LinkBudget{}, c, {deg(6.0)}, BeamBounds::pencil_pair(c), opts);
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(r.grid_check_pass);
    EXPECT_GE(r.objective, r.grid_objective);
}

TEST(Optimizer, InfeasibleRegionThrows) {
    const auto c = slot(100e-6);
    EXPECT_THROW(optimize_beamwidths(LinkBudget{}, c, {0.0}, BeamBounds::sector_tx(c)), infeasible_error);
}

TEST(Optimizer, WorstCaseUsesGrid) {
    OptimizerOptions opts;
    opts.objective = Objective::WorstCase;
    const TrainingConfig c;
    const auto r = optimize_beamwidths(LinkBudget{}, c, {deg(9.0)}, BeamBounds::sector_tx(c), opts);
    EXPECT_EQ(r.pair, r.grid_pair);
    EXPECT_EQ(r.objective, worst_case_objective(LinkBudget{}, c, {deg(9.0)}, r.pair).rate);
}

TEST(Unimodality, CoordinateSlicesHaveOneMaximum) {
    const LinkBudget b;
    for (double t_s : {10e-3, 1.0}) {
        const auto c = slot(t_s);
        for (double theta : {0.0, 3.0, 6.0, 9.0}) {
            const MisalignmentModel m{deg(theta)};
            const auto axis = grid_axis(min_feasible_beamwidth(c, Side::Rx, c.omega_t) * (1.0 + 1e-9), c.omega_r, deg(0.1));
            for (double fixed : {deg(90.0), deg(45.0), deg(10.0), deg(2.0)}) {
                std::vector<double> slice;
                for (double x : axis)
                    slice.push_back(detail::surrogate_value_unchecked(b, c, m, {fixed, x}, {}));
                EXPECT_EQ(count_local_maxima(slice), 1u) << t_s << " " << theta << " " << fixed;
            }
        }
    }
}
