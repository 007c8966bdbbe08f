#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "mmwbeam/rng.hpp"

using mmwbeam::CounterRng;

TEST(CounterRng, SameSeedAndStreamRepeat) {
    CounterRng a(42, 3), b(42, 3);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, StreamsAndSeedsDiffer) {
    CounterRng a(42, 0), b(42, 1), c(43, 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) {
        seen.insert(a());
        seen.insert(b());
        seen.insert(c());
    }
    EXPECT_EQ(seen.size(), 300u);
}

TEST(CounterRng, UniformMoments) {
    CounterRng r(7);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 5e-3);
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 2e-3);
}

TEST(CounterRng, UniformRange) {
    CounterRng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double x = r.uniform(-2.0, 3.0);
        EXPECT_GE(x, -2.0);
        EXPECT_LT(x, 3.0);
    }
    EXPECT_EQ(r.counter(), 10000u);
}
