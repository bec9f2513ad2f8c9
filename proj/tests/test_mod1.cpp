#include <weylab/mod1.hpp>
#include <weylab/random.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace weylab;

TEST(Mod1, ParsesExactDyadics)
{
    EXPECT_EQ(Mod1Fixed::parse("0.5").bits(), u128(1) << 127);
    EXPECT_EQ(Mod1Fixed::parse("1/4").bits(), u128(1) << 126);
    EXPECT_EQ(Mod1Fixed::parse("0.75").bits(), (u128(3) << 126));
    EXPECT_TRUE(Mod1Fixed::parse("0").is_zero());
    EXPECT_TRUE(Mod1Fixed::parse("3").is_zero());
}

TEST(Mod1, ReducesNegativesAndLargeValues)
{
    EXPECT_EQ(Mod1Fixed::parse("-0.25"), Mod1Fixed::parse("0.75"));
    EXPECT_EQ(Mod1Fixed::parse("2.125"), Mod1Fixed::parse("0.125"));
    EXPECT_EQ(Mod1Fixed::parse("-7/4"), Mod1Fixed::parse("1/4"));
    EXPECT_EQ(Mod1Fixed::parse("1.25e-1"), Mod1Fixed::parse("0.125"));
}

TEST(Mod1, RejectsMalformedText)
{
    EXPECT_THROW(Mod1Fixed::parse(""), error);
    EXPECT_THROW(Mod1Fixed::parse("abc"), error);
    EXPECT_THROW(Mod1Fixed::parse("1/0"), error);
    EXPECT_THROW(Mod1Fixed::parse("0.1.2"), error);
}

TEST(Mod1, RoundsToNearestTiesToEven)
{
    // 1/3 has an infinite binary expansion 0.0101..., rounds up at bit 128
    const auto third = Mod1Fixed::parse("1/3");
    const u128 floor_bits = ~u128(0) / 3;
    EXPECT_EQ(third.bits(), floor_bits);
    EXPECT_EQ((third + third + third).bits(), ~u128(0));
    // exact half-ulp tie rounds to even
    detail::big_int den = detail::big_int(1) << 129;
    EXPECT_EQ(Mod1Fixed::from_fraction(1, den).bits(), u128(0));
    EXPECT_EQ(Mod1Fixed::from_fraction(3, den).bits(), u128(2));
}

TEST(Mod1, AdditionWrapsExactly)
{
    const auto a = Mod1Fixed::parse("0.75");
    const auto b = Mod1Fixed::parse("0.5");
    EXPECT_EQ(a + b, Mod1Fixed::parse("0.25"));
    EXPECT_EQ(b - a, Mod1Fixed::parse("0.75"));
    EXPECT_EQ(-Mod1Fixed::parse("0.25"), Mod1Fixed::parse("0.75"));
    EXPECT_TRUE((a * u128(4)).is_zero());
}

TEST(Mod1, DecimalRoundTripIsExact)
{
    rng gen(11);
    for (int i = 0; i < 1000; ++i) {
        const Mod1Fixed v = gen.mod1();
        EXPECT_EQ(Mod1Fixed::parse(v.to_decimal()), v);
    }
}

TEST(Mod1, DecimalRoundTripRelativeError)
{
    const Mod1Fixed v = Mod1Fixed::parse("0.1357");
    const auto back = Mod1Fixed::parse(v.to_decimal(20));
    const double diff = std::ldexp(static_cast<double>(back.bits() > v.bits() ? back.bits() - v.bits() : v.bits() - back.bits()), -128);
    EXPECT_LE(diff, 1e-20);
}

TEST(Mod1, FromDoubleIsExactForDyadics)
{
    EXPECT_EQ(Mod1Fixed::from_double(0.375), Mod1Fixed::parse("3/8"));
    EXPECT_EQ(Mod1Fixed::from_double(-0.375), Mod1Fixed::parse("5/8"));
    EXPECT_EQ(Mod1Fixed::from_double(5.5), Mod1Fixed::parse("0.5"));
    EXPECT_TRUE(Mod1Fixed::from_double(1e300).is_zero());
    EXPECT_THROW(Mod1Fixed::from_double(NAN), error);
}

TEST(Mod1, FromDoubleRoundDownNeverExceeds)
{
    rng gen(5);
    for (int i = 0; i < 200; ++i) {
        const double v = std::ldexp(gen.uniform(), -150);
        const auto down = Mod1Fixed::from_double(v, Mod1Fixed::rounding::down);
        EXPECT_LE(std::ldexp(static_cast<double>(down.bits()), -128), v);
    }
    EXPECT_EQ(Mod1Fixed::from_double(-1e-60, Mod1Fixed::rounding::down).bits(), ~u128(0));
}

TEST(Mod1, CenteredAndDistance)
{
    EXPECT_DOUBLE_EQ(Mod1Fixed::parse("0.75").to_centered(), -0.25);
    EXPECT_DOUBLE_EQ(Mod1Fixed::parse("0.25").to_centered(), 0.25);
    EXPECT_DOUBLE_EQ(Mod1Fixed::parse("0.5").to_centered(), -0.5);
    EXPECT_DOUBLE_EQ(Mod1Fixed::parse("0.9").distance_to_integer(), 0.1);
    EXPECT_DOUBLE_EQ(Mod1Fixed::parse("0.3").distance_to_integer(), 0.3);
}

TEST(Mod1, HexHasFullWidth)
{
    EXPECT_EQ(Mod1Fixed::parse("0.5").to_hex(), "0x80000000000000000000000000000000");
    EXPECT_EQ(Mod1Fixed64::parse("0.25").to_hex(), "0x4000000000000000");
}

TEST(Mod1, NarrowWidthAgreesWithWide)
{
    const auto wide = Mod1Fixed::parse("0.3");
    const auto narrow = Mod1Fixed64::parse("0.3");
    EXPECT_NEAR(wide.to_double(), narrow.to_double(), 1e-18);
}

TEST(Random, DerivedSeedsDifferAcrossStreamsAndIndices)
{
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
    EXPECT_EQ(derive_seed(9, 8, 7), derive_seed(9, 8, 7));
}

TEST(Random, KroneckerPointsAreDeterministic)
{
    kronecker_sequence a(3, 42), b(3, 42);
    for (std::uint64_t n = 0; n < 20; ++n) EXPECT_EQ(a.point(n), b.point(n));
    EXPECT_NE(a.point(1), a.point(2));
}
