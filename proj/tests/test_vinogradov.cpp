#include <weylab/vinogradov.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

using namespace weylab;

namespace {

// Ordered pairs (x, y) of s-tuples with y a permutation of x.
BigInt permutation_pairs(std::int64_t s, std::int64_t X)
{
    std::map<std::vector<std::int64_t>, BigInt> multiplicity;
    std::vector<std::int64_t> x(static_cast<std::size_t>(s), 1);
    while (true) {
        auto sorted = x;
        std::sort(sorted.begin(), sorted.end());
        multiplicity[sorted] += 1;
        std::size_t i = 0;
        while (i < x.size() && x[i] == X) x[i++] = 1;
        if (i == x.size()) break;
        ++x[i];
    }
    BigInt total = 0;
    for (auto& [key, m] : multiplicity) total += m * m;
    return total;
}

} // namespace

TEST(PowerSumKeyTest, ComponentsAreExactPowerSums)
{
    auto key = power_sum_key({2, 3}, 3);
    ASSERT_EQ(key.size(), 3u);
    EXPECT_EQ(static_cast<std::int64_t>(key[0]), 5);
    EXPECT_EQ(static_cast<std::int64_t>(key[1]), 13);
    EXPECT_EQ(static_cast<std::int64_t>(key[2]), 35);
}

TEST(Bruteforce, SingleVariableIsDiagonal)
{
    for (std::int64_t k : {1, 2, 5}) EXPECT_EQ(count_bruteforce(1, k, 7).J, 7);
}

TEST(Bruteforce, SmallQuadratic)
{
    auto c = count_bruteforce(2, 2, 3);
    EXPECT_EQ(c.J, 15);
    EXPECT_EQ(c.method, count_method::brute);
}

TEST(Bruteforce, GuardPointsToMeetMiddle)
{
    try {
        count_bruteforce(3, 3, 40);
        FAIL();
    } catch (const infeasible_error& e) {
        EXPECT_NE(std::string(e.what()).find("meet"), std::string::npos);
    }
    EXPECT_THROW(count_bruteforce(0, 2, 3), domain_error);
}

TEST(MeetMiddle, MatchesBruteforceOnSmallGrid)
{
    for (std::int64_t s = 1; s <= 3; ++s)
        for (std::int64_t k = 1; k <= 3; ++k)
            for (std::int64_t X = 1; X <= 6; ++X)
                EXPECT_EQ(count_meet_middle(s, k, X).J, count_bruteforce(s, k, X).J) << s << " " << k << " " << X;
}

TEST(MeetMiddle, QuadraticClosedForm)
{
    EXPECT_EQ(count_meet_middle(1, 5, 100).J, 100);
    EXPECT_EQ(count_meet_middle(2, 2, 100).J, 19900);
    for (std::int64_t X = 1; X <= 12; ++X) EXPECT_EQ(count_bruteforce(2, 2, X).J, 2 * X * X - X);
}

TEST(MeetMiddle, CubicClassicalRatio)
{
    auto c = count_meet_middle(3, 3, 50);
    const double ratio = to_double(c.J) / (6.0 * 50 * 50 * 50);
    EXPECT_GE(ratio, 0.8);
    EXPECT_LE(ratio, 1.3);
    EXPECT_DOUBLE_EQ(classical_ratio(3, 50), ratio);
}

TEST(MeetMiddle, PermutationClosureEqualityWhenKAtLeastS)
{
    for (std::int64_t s = 1; s <= 3; ++s)
        for (std::int64_t X : {3, 5, 8}) {
            const BigInt perm = permutation_pairs(s, X);
            EXPECT_EQ(count_meet_middle(s, s, X).J, perm);
            EXPECT_EQ(count_meet_middle(s, s + 1, X).J, perm);
            EXPECT_GE(count_meet_middle(s, 1, X).J, perm);
        }
}

TEST(MeetMiddle, DiagonalBoundAndMonotonicity)
{
    for (std::int64_t s = 1; s <= 3; ++s)
        for (std::int64_t k = 1; k <= 3; ++k) {
            BigInt previous = 0;
            for (std::int64_t X = 1; X <= 9; ++X) {
                auto J = count_meet_middle(s, k, X).J;
                BigInt diag = 1;
                for (std::int64_t i = 0; i < s; ++i) diag *= X;
                EXPECT_GE(J, diag);
                EXPECT_GE(J, previous);
                EXPECT_LE(count_meet_middle(s, k + 1, X).J, J);
                previous = J;
            }
        }
}

TEST(MeetMiddle, ThreadCountDoesNotChangeCount)
{
    EXPECT_EQ(count_meet_middle(3, 2, 30, default_memory_budget, 1).J,
              count_meet_middle(3, 2, 30, default_memory_budget, 4).J);
}

TEST(MeetMiddle, MemoryBudgetIsEnforced)
{
    try {
        count_meet_middle(4, 4, 200, 1e6);
        FAIL();
    } catch (const infeasible_error& e) {
        EXPECT_NE(std::string(e.what()).find("bytes"), std::string::npos);
    }
}

TEST(MvtBoundTest, Substitutions)
{
    EXPECT_DOUBLE_EQ(mvt_bound(1, 1, 10, 0), 20.0);
    EXPECT_DOUBLE_EQ(mvt_bound(3, 2, 7, 0), 2 * 343.0);
    EXPECT_DOUBLE_EQ(mvt_bound(2, 2, 100, 0), 10100.0);
    EXPECT_NEAR(mvt_bound(2, 2, 100, 0.5), 101000.0, 1e-8);
    EXPECT_NEAR(19900.0 / mvt_bound(2, 2, 100, 0), 1.97, 0.01);
}

TEST(ClassicalRatio, QuadraticTrendTowardOne)
{
    double previous = 0.0;
    for (std::int64_t X : {50, 100, 200, 400}) {
        const double r = classical_ratio(2, X);
        EXPECT_DOUBLE_EQ(r, 1.0 - 1.0 / (2.0 * X));
        EXPECT_GT(r, previous);
        previous = r;
    }
    EXPECT_DOUBLE_EQ(classical_ratio(2, 100), 0.995);
}

TEST(Profile, QuarterSquareEntries)
{
    auto p = default_profile();
    EXPECT_EQ(p.lookup(4)->u, 6);
    EXPECT_EQ(p.lookup(5)->u, 9);
    EXPECT_EQ(p.lookup(10)->u, 30);
    EXPECT_FALSE(p.lookup(3));
    EXPECT_FALSE(p.lookup(2));
    EXPECT_FALSE(p.lookup(default_profile_max_k + 1));
    EXPECT_FALSE(p.lookup(4)->provenance.empty());
}

TEST(Profile, ConfiguredEntriesAreValidated)
{
    MVTProfile p;
    p.set(3, 6, "full range for k=3");
    EXPECT_EQ(p.lookup(3)->u, 6);
    EXPECT_THROW(p.set(3, 7, "too large"), domain_error);
    EXPECT_THROW(p.set(3, 0, "too small"), domain_error);
}

TEST(Profile, LargeDegreeFormula)
{
    // floor(k(k+1)/2 - k/3 - 8 k^(2/3)) at k = 1000: 500500 - 333.33 - 800
    EXPECT_EQ(large_k_u(1000), 499366);
    EXPECT_LT(quarter_square_u(1000), large_k_u(1000));
}
