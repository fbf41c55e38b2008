#include <gtest/gtest.h>

#include <cmath>

#include "scos/cdc.hpp"
#include "scos/errors.hpp"

using namespace scos;

TEST(RecoveryThreshold, KnownValues) {
    EXPECT_EQ(recovery_threshold(1, 2), 4);
    EXPECT_EQ(recovery_threshold(1, 1), 1);
    EXPECT_EQ(recovery_threshold(1, 4), 16);
    EXPECT_EQ(recovery_threshold(2, 2), 12);
    EXPECT_EQ(recovery_threshold(4, 1), 7);
}

TEST(RecoveryThreshold, RejectsNonPositive) {
    EXPECT_THROW(recovery_threshold(0, 1), InputError);
    EXPECT_THROW(recovery_threshold(1, 0), InputError);
    EXPECT_THROW(recovery_threshold(-3, 2), InputError);
}

TEST(RecoveryThreshold, StrictlyIncreasingInS) {
    for (long long t = 1; t <= 20; ++t)
        for (long long s = 1; s < 50; ++s)
            EXPECT_LT(recovery_threshold(s, t), recovery_threshold(s + 1, t));
}

TEST(OptimalSplit, Examples) {
    CodeSplit a = optimal_split(2, SplitObjective::max_k);
    EXPECT_EQ(a.s, 1);
    EXPECT_EQ(a.t, 2);
    EXPECT_EQ(a.k, 4);
    CodeSplit b = optimal_split(1, SplitObjective::max_k);
    EXPECT_EQ(b.s, 1);
    EXPECT_EQ(b.t, 1);
    EXPECT_EQ(b.k, 1);
    CodeSplit c = optimal_split(4, SplitObjective::max_k);
    EXPECT_EQ(c.s, 1);
    EXPECT_EQ(c.t, 4);
    EXPECT_EQ(c.k, 16);
    CodeSplit d = optimal_split(4, SplitObjective::min_k);
    EXPECT_EQ(d.k, 7);
    EXPECT_EQ(d.t, 1);
}

// Brute force over every (s, t) in [1, m]^2 rather than divisors only.
TEST(OptimalSplit, MatchesExhaustiveScan) {
    for (long long m = 1; m <= 10000; ++m) {
        for (auto obj : {SplitObjective::max_k, SplitObjective::min_k}) {
            long long bk = -1, bt = -1;
            for (long long t = 1; t <= m; ++t) {
                if (m % t)
                    continue;
                const long long s = m / t;
                const long long k = t * t * (2 * s - 1);
                const bool better = bk < 0 || (obj == SplitObjective::max_k ? k > bk : k < bk);
                if (better) {
                    bk = k;
                    bt = t;
                }
            }
            CodeSplit c = optimal_split(m, obj);
            ASSERT_EQ(c.k, bk) << "m=" << m;
            ASSERT_EQ(c.t, bt) << "m=" << m;
            ASSERT_EQ(c.s * c.t, m);
        }
    }
}

TEST(SymbolCounts, DerivedValues) {
    const CodeSplit sp = make_split(1, 2);
    SymbolCounts c = symbol_counts(240, sp, 0, 4);
    EXPECT_DOUBLE_EQ(c.d_comm_to, 28800.0);
    EXPECT_DOUBLE_EQ(c.d_cmp, 3456000.0);
    EXPECT_DOUBLE_EQ(c.d_dec, 921600.0);
    EXPECT_DOUBLE_EQ(c.d_enc, 240.0 * 240.0 * 4);
    EXPECT_DOUBLE_EQ(c.d_comm_fr, 14400.0);
}

TEST(SymbolCounts, Trivial) {
    SymbolCounts c = symbol_counts(1, make_split(1, 1), 1, 0);
    EXPECT_EQ(c.d_enc, 1.0);
    EXPECT_EQ(c.d_comm_to, 1.0);
    EXPECT_EQ(c.d_cmp, 1.0);
    EXPECT_EQ(c.d_comm_fr, 1.0);
    EXPECT_EQ(c.d_dec, 0.0);
}

TEST(SymbolCounts, Homogeneity) {
    const CodeSplit sp = make_split(2, 3);
    for (long long n : {7, 30, 240}) {
        for (long long scale : {2, 3, 5}) {
            SymbolCounts a = symbol_counts(n, sp, 1, 2);
            SymbolCounts b = symbol_counts(n * scale, sp, 1, 2);
            const double c2 = double(scale * scale), c3 = c2 * double(scale);
            EXPECT_NEAR(b.d_comm_to, a.d_comm_to * c2, 1e-9 * b.d_comm_to);
            EXPECT_NEAR(b.d_comm_fr, a.d_comm_fr * c2, 1e-9 * b.d_comm_fr);
            EXPECT_NEAR(b.d_cmp, a.d_cmp * c3, 1e-9 * b.d_cmp);
        }
    }
}

TEST(SymbolCounts, RejectsBadInput) {
    EXPECT_THROW(symbol_counts(0, make_split(1, 1), 0, 0), InputError);
    CodeSplit bad{3, 1, 2, 4};
    EXPECT_THROW(symbol_counts(10, bad, 0, 0), InputError);
    EXPECT_THROW(require_square(240, 260), InputError);
    EXPECT_NO_THROW(require_square(240, 240));
}
