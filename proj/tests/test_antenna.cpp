#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mmwbeam/antenna.hpp"

using namespace mmwbeam;
using units::deg;

namespace {

// Frozen from a 50-digit evaluation of the gain law.
constexpr double gain_30deg_boresight = 38.99399608261854;
constexpr double gain_30deg_boresight_db = 15.90997743721;
constexpr double side_lobe_10deg = 0.10301201325318398;

} // namespace

TEST(Gain, BoresightMatchesHighPrecisionValue) {
    const AntennaPattern p{deg(30.0)};
    EXPECT_NEAR(gain(p, 0.0), gain_30deg_boresight, 1e-12 * gain_30deg_boresight);
    EXPECT_NEAR(gain_db(p, 0.0), gain_30deg_boresight_db, 1e-9);
}

TEST(Gain, NarrowerBeamHasHigherBoresightGain) {
    EXPECT_GT(gain({deg(30.0)}, 0.0), gain({deg(60.0)}, 0.0));
}

TEST(Gain, SideLobeBranchPastMainLobe) {
    const AntennaPattern p{deg(10.0)};
    EXPECT_EQ(lobe_of(p, deg(20.0)), Lobe::Side);
    EXPECT_NEAR(gain(p, deg(20.0)), side_lobe_10deg, 1e-14);
}

TEST(Gain, HalfPowerAtHalfBeamwidth) {
    for (double h : {2.0, 7.0, 30.0, 90.0}) {
        const AntennaPattern p{deg(h)};
        EXPECT_NEAR(gain(p, deg(h) / 2.0) / gain(p, 0.0), 0.5, 1e-14) << h;
    }
}

TEST(Gain, K1ScalesTheExponent) {
    const AntennaPattern p{deg(10.0), 2.0};
    EXPECT_NEAR(gain(p, deg(5.0)) / gain(p, 0.0), 0.25, 1e-14);
}

TEST(Gain, EvenInTheta) {
    const AntennaPattern p{deg(7.0)};
    for (double th = -30.0; th <= 30.0; th += 0.37) EXPECT_EQ(gain(p, deg(th)), gain(p, deg(-th)));
}

TEST(Gain, FoldsAnglesOntoHalfTurn) {
    const AntennaPattern p{deg(40.0)};
    EXPECT_NEAR(gain(p, deg(10.0) + 2.0 * units::pi), gain(p, deg(10.0)), 1e-9);
    EXPECT_NEAR(gain(p, deg(350.0)), gain(p, deg(10.0)), 1e-9);
}

TEST(Gain, NonIncreasingOnMainLobe) {
    for (double h : {2.0, 10.0, 45.0}) {
        const AntennaPattern p{deg(h)};
        double prev = gain(p, 0.0);
        for (int i = 1; i <= 1000; ++i) {
            const double g = gain(p, main_lobe_half_width(p) * i / 1000.0);
            EXPECT_LE(g, prev);
            prev = g;
        }
    }
}

TEST(Gain, NarrowerBeamsDecayFaster) {
    const AntennaPattern a{deg(10.0)}, b{deg(20.0)};
    for (double th : {1.0, 5.0, 12.0})
        EXPECT_LT(gain(a, deg(th)) / gain(a, 0.0), gain(b, deg(th)) / gain(b, 0.0));
}

TEST(Gain, SideLobeIsConstantAndBelowBoresight) {
    for (double h = 0.5; h <= 90.0; h += 0.5) {
        const AntennaPattern p{deg(h)};
        const double s = gain(p, deg(1.31 * h));
        EXPECT_EQ(s, gain(p, units::pi));
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, boresight_gain(p));
    }
}

TEST(Gain, RejectsInvalidPatterns) {
    EXPECT_THROW(gain({0.0}, 0.0), precondition_error);
    EXPECT_THROW(gain({-0.1}, 0.0), precondition_error);
    EXPECT_THROW(gain({7.0}, 0.0), precondition_error);
    EXPECT_THROW(gain({std::numeric_limits<double>::quiet_NaN()}, 0.0), precondition_error);
    EXPECT_THROW(gain({deg(10.0), 0.0}, 0.0), precondition_error);
    EXPECT_THROW(gain({deg(10.0)}, std::numeric_limits<double>::infinity()), precondition_error);
}

TEST(MainLobe, HalfWidthIsOnePointThreeBeamwidths) {
    EXPECT_NEAR(main_lobe_half_width({deg(10.0)}), deg(13.0), 1e-15);
    EXPECT_NEAR(main_lobe_half_width({deg(2.0)}), deg(2.6), 1e-15);
    EXPECT_NEAR(main_lobe_half_width({deg(7.0)}), deg(9.1), 1e-15);
}

TEST(MainLobe, LinkAvailability) {
    EXPECT_TRUE(link_available({deg(10.0)}, main_lobe_half_width({deg(10.0)})));
    EXPECT_FALSE(link_available({deg(10.0)}, deg(13.01)));
    EXPECT_FALSE(link_available({deg(2.0)}, deg(10.0)));
    EXPECT_THROW(link_available({deg(2.0)}, -1.0), precondition_error);
}
