#include <weylab/exponents.hpp>
#include <weylab/vinogradov.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace weylab;

namespace {

Rational R(std::int64_t p, std::int64_t q) { return Rational(p, q); }

} // namespace

TEST(Exponents, DeltaDirectEvaluation)
{
    EXPECT_EQ(delta_exponent(IndexSplit::parse("1,k", 4), 6), R(13, 30));
    EXPECT_EQ(nu_exponent(IndexSplit::parse("k", 4), 6), R(11, 30));
    EXPECT_EQ(nu_exponent(IndexSplit::parse("k", 3), 6), R(3, 10));
    EXPECT_LT(nu_exponent(IndexSplit::parse("k", 3), 6), R(2, 3));
    EXPECT_EQ(to_string(R(13, 30)), "13/30");
}

TEST(Exponents, QuinticBelowCeiling)
{
    const auto u = default_profile().lookup(5)->u;
    const Rational d = delta_exponent(IndexSplit::parse("1,5", 5), u);
    EXPECT_EQ(d, R(5, 14));
    EXPECT_LT(d, R(4, 9));
}

TEST(Exponents, RejectsUOutsideRange)
{
    auto s = IndexSplit::parse("1,k", 4);
    EXPECT_THROW(delta_exponent(s, 0), domain_error);
    EXPECT_THROW(delta_exponent(s, 11), domain_error);
    EXPECT_THROW(nu_exponent(s, 11), domain_error);
    EXPECT_NO_THROW(delta_exponent(s, 10));
}

TEST(Exponents, IdentitiesHoldForEverySubset)
{
    for (std::size_t k = 2; k <= 12; ++k) {
        for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
            std::vector<std::size_t> idx;
            for (std::size_t j = 0; j < k; ++j)
                if (mask & (1u << j)) idx.push_back(j + 1);
            const IndexSplit split(k, idx);
            const auto t = static_cast<std::int64_t>(split.t());
            const auto sigma = static_cast<std::int64_t>(split.sigma());
            for (std::int64_t u = 1; u <= static_cast<std::int64_t>(k * (k + 1) / 2); ++u) {
                EXPECT_EQ(R(1, 2) + delta_exponent(split, u), R(u + t + 1 + sigma, 2 * u + t + 1));
                EXPECT_EQ(R(1, 2) + nu_exponent(split, u), R(u + t + 2 + sigma, 2 * u + t + 2));
            }
        }
    }
}

TEST(Exponents, EndpointSplitClosedForm)
{
    for (std::int64_t k = 4; k <= 60; ++k) {
        const Rational d = delta_exponent(IndexSplit::parse("1,k", static_cast<std::size_t>(k)), quarter_square_u(k));
        EXPECT_LE(d, R(2 * k + 5, k * k + 2 * k + 6));
        if (k % 2 == 0) {
            EXPECT_EQ(d, R(2 * k + 5, k * k + 2 * k + 6));
        }
        EXPECT_LT(d, R(4, 2 * k - 1));
    }
}

TEST(Exponents, TopIndexBelowTwoOverK)
{
    for (std::int64_t k = 3; k <= 60; ++k) {
        const std::int64_t u = k == 3 ? 6 : quarter_square_u(k);
        const Rational nu = nu_exponent(IndexSplit::parse("k", static_cast<std::size_t>(k)), u);
        EXPECT_EQ(nu, R(3 + 2 * k, 4 * u + 6));
        EXPECT_LT(nu, R(2, k));
    }
}

TEST(Exponents, LogarithmicRegimeGate)
{
    for (std::int64_t k = 20; k <= 200; ++k) {
        const double limit = 0.5 * static_cast<double>(k * k) / std::log(static_cast<double>(k));
        const std::int64_t u = quarter_square_u(k);
        for (std::int64_t t = 1; t <= 3; ++t) {
            // largest realisable sigma with sigma + t + 1 below the limit
            std::vector<std::size_t> idx;
            for (std::int64_t l = 0; l < t; ++l) idx.push_back(static_cast<std::size_t>(k - t + 1 + l));
            while (true) {
                const IndexSplit split(static_cast<std::size_t>(k), idx);
                if (static_cast<double>(split.sigma() + split.t() + 1) < limit) {
                    EXPECT_LT(to_double(delta_exponent(split, u)), 1.0 / std::log(static_cast<double>(k)));
                    break;
                }
                std::size_t l = 0;
                while (l < idx.size() && idx[l] == l + 1) ++l;
                ASSERT_LT(l, idx.size());
                --idx[l];
            }
        }
    }
}

TEST(Exponents, TargetExponents)
{
    auto target = ExponentTarget::make(IndexSplit::parse("1,k", 4), 6);
    EXPECT_NEAR(target.sup_exponent(), 0.5 + 13.0 / 30 + 0.05, 1e-15);
    EXPECT_NEAR(target.discrepancy_exponent(), 0.5 + to_double(R(2 + 2 + 10, 24 + 8)) + 0.05, 1e-15);
    EXPECT_THROW(ExponentTarget::make(IndexSplit::parse("1,k", 4), 6, 0.0), domain_error);
}
