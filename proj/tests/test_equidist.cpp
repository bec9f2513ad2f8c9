#include <weylab/equidist.hpp>
#include <weylab/random.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace weylab;

namespace {

CoefficientVector random_coeffs(rng& gen, std::size_t k)
{
    std::vector<Mod1Fixed> a(k);
    for (auto& v : a) v = gen.mod1();
    return CoefficientVector(a);
}

} // namespace

TEST(Interval, Validation)
{
    EXPECT_NO_THROW(IntervalMod1(0.0, 1.0));
    EXPECT_THROW(IntervalMod1(0.5, 0.5), domain_error);
    EXPECT_THROW(IntervalMod1(0.6, 0.5), domain_error);
    EXPECT_THROW(IntervalMod1(-0.1, 0.5), domain_error);
    EXPECT_THROW(IntervalMod1(0.1, 1.5), domain_error);
    IntervalMod1 closed(0.25, 0.5);
    EXPECT_TRUE(closed.contains(0.25));
    EXPECT_TRUE(closed.contains(0.5));
}

TEST(CountZ, FullIntervalCountsEverything)
{
    auto r = count_Z(CoefficientVector::zero(3), 10, IntervalMod1(0.0, 1.0));
    EXPECT_EQ(r.Z, 10);
    EXPECT_DOUBLE_EQ(r.deviation, 0.0);
    EXPECT_EQ(r.N, 10);
}

TEST(CountZ, TwoPointOrbit)
{
    auto r = count_Z(CoefficientVector::parse("1/2,0,0"), 10, IntervalMod1(0.4, 0.6));
    EXPECT_EQ(r.Z, 5);
    EXPECT_DOUBLE_EQ(r.expected, 2.0);
    EXPECT_DOUBLE_EQ(r.deviation, 3.0);
}

TEST(CountZ, MatchesNaiveLoop)
{
    rng gen(17);
    auto c = random_coeffs(gen, 3);
    const IntervalMod1 iv(0.25, 0.75);
    std::int64_t naive = 0;
    for (std::int64_t n = 1; n <= 10000; ++n) {
        // independent recomputation of p(n) mod 1 term by term
        Mod1Fixed p{};
        u128 power = 1;
        for (std::size_t j = 1; j <= 3; ++j) {
            power *= static_cast<u128>(n);
            p += c.coefficient(j) * power;
        }
        const double u = p.to_double();
        if (u >= 0.25 && u <= 0.75) ++naive;
    }
    EXPECT_EQ(count_Z(c, 10000, iv).Z, naive);
}

TEST(CountZ, MonotoneInEndpoints)
{
    rng gen(18);
    auto c = random_coeffs(gen, 4);
    std::int64_t previous = 0;
    for (double b : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        auto z = count_Z(c, 3000, IntervalMod1(0.1, b)).Z;
        EXPECT_GE(z, previous);
        EXPECT_LE(z, 3000);
        previous = z;
    }
    previous = 3001;
    for (double a : {0.0, 0.1, 0.3, 0.5}) {
        auto z = count_Z(c, 3000, IntervalMod1(a, 0.7)).Z;
        EXPECT_LE(z, previous);
        previous = z;
    }
}

TEST(StarDiscrepancy, StratifiedPoints)
{
    const int N = 16;
    std::vector<double> pts;
    for (int i = N - 1; i >= 0; --i) pts.push_back((2.0 * i + 1) / (2.0 * N));
    EXPECT_NEAR(star_discrepancy(pts), 1.0 / (2 * N), 1e-15);
}

TEST(StarDiscrepancy, OnePoint)
{
    EXPECT_DOUBLE_EQ(star_discrepancy(std::vector<double>{0.3}), 0.7);
    EXPECT_DOUBLE_EQ(star_discrepancy(std::vector<double>{0.8}), 0.8);
    EXPECT_THROW(star_discrepancy(std::vector<double>{}), domain_error);
}

TEST(StarDiscrepancy, DominatesPrefixDeviations)
{
    rng gen(19);
    for (int trial = 0; trial < 5; ++trial) {
        auto c = random_coeffs(gen, 3);
        const std::int64_t N = 500;
        const double d = star_discrepancy(c, N);
        EXPECT_GE(d, 1.0 / (2 * N));
        EXPECT_LE(d, 1.0);
        for (int i = 1; i <= 50; ++i) {
            const double b = i / 50.0;
            EXPECT_LE(count_Z(c, N, IntervalMod1(0.0, b)).deviation, d * N + 1e-9);
        }
    }
}

TEST(ErdosTuran, DegenerateAlpha)
{
    const std::int64_t X = 40, H = 5;
    double harmonic = 0;
    for (int h = 1; h <= H; ++h) harmonic += 1.0 / h;
    EXPECT_NEAR(erdos_turan_bound(CoefficientVector::zero(3), X, H), X / 6.0 + 3 * X * harmonic, 1e-9);
}

TEST(ErdosTuran, SingleTerm)
{
    rng gen(20);
    auto c = random_coeffs(gen, 3);
    EXPECT_DOUBLE_EQ(erdos_turan_bound(c, 300, 1), 150.0 + 3 * eval_fast(c, 300).modulus);
    EXPECT_THROW(erdos_turan_bound(c, 300, 0), domain_error);
}

TEST(ErdosTuran, DominatesDeviation)
{
    rng gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = random_coeffs(gen, 3);
        double a = gen.uniform(), b = gen.uniform();
        if (a > b) std::swap(a, b);
        if (a == b) continue;
        const auto z = count_Z(c, 2000, IntervalMod1(a, b));
        EXPECT_GE(erdos_turan_bound(c, 2000, 2), z.deviation);
    }
}

TEST(MinFractionalTest, HalfCoefficient)
{
    auto r = min_fractional(CoefficientVector::parse("1/2,0,0,0"), 5);
    EXPECT_EQ(r.n, 2);
    EXPECT_EQ(r.value, 0.0);
}

TEST(MinFractionalTest, ZeroCoefficients)
{
    auto r = min_fractional(CoefficientVector::zero(4), 9);
    EXPECT_EQ(r.n, 1);
    EXPECT_EQ(r.value, 0.0);
}

TEST(MinFractionalTest, NonincreasingInN)
{
    rng gen(22);
    auto c = random_coeffs(gen, 5);
    double previous = 1.0;
    for (int e = 8; e <= 16; ++e) {
        auto r = min_fractional(c, std::int64_t{1} << e);
        EXPECT_LE(r.value, previous);
        EXPECT_LE(r.n, std::int64_t{1} << e);
        EXPECT_DOUBLE_EQ(c.phase_at(static_cast<std::uint64_t>(r.n)).distance_to_integer(), r.value);
        previous = r.value;
    }
}

TEST(ChooseH, Arithmetic)
{
    EXPECT_EQ(choose_H(1e4, 0.25, 0.05), 3);
    EXPECT_EQ(choose_H(std::ldexp(1.0, 20), 0.2, 0.01), static_cast<std::int64_t>(std::floor(std::pow(2.0, 20 * 0.28))));
    EXPECT_EQ(choose_H(std::ldexp(1.0, 20), 0.2, 0.01), 48);
    EXPECT_THROW(choose_H(100, 0.4, 0.05), config_error);
    EXPECT_THROW(choose_H(100, 0.5, 0.1), config_error);
    EXPECT_EQ(choose_H(2, 0.1, 0.01), 1);
}
