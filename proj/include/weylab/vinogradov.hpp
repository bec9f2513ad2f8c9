#pragma once

#include <weylab/error.hpp>
#include <weylab/mod1.hpp>
#include <weylab/parallel.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace weylab {

using BigInt = boost::multiprecision::cpp_int;

enum class count_method { brute, meet_middle };

inline const char* to_string(count_method m) { return m == count_method::brute ? "brute" : "meet-middle"; }

/// J_{s,k}(X): the number of solutions of sum x_i^j = sum y_i^j (1 <= j <= k)
/// with all variables in [1, X]; equal to the 2s-th moment of f_k.
struct VinogradovCount {
    std::int64_t s = 0;
    std::int64_t k = 0;
    std::int64_t X = 0;
    BigInt J = 0;
    count_method method = count_method::meet_middle;
};

/// (sum x, sum x^2, ..., sum x^k) for one s-tuple.
using PowerSumKey = std::vector<i128>;

namespace detail {

inline void check_count_args(std::int64_t s, std::int64_t k, std::int64_t X)
{
    if (s < 1) throw domain_error("s must be >= 1");
    if (k < 1) throw domain_error("k must be >= 1");
    if (X < 1) throw domain_error("X must be >= 1");
}

// x^j for j = 1..k in checked 128-bit arithmetic.
inline std::vector<i128> powers_of(std::int64_t x, std::int64_t k)
{
    std::vector<i128> p(static_cast<std::size_t>(k));
    i128 acc = 1;
    for (std::int64_t j = 0; j < k; ++j) {
        if (__builtin_mul_overflow(acc, static_cast<i128>(x), &acc))
            throw infeasible_error("power sum x^" + std::to_string(j + 1) + " overflows 128-bit arithmetic");
        p[static_cast<std::size_t>(j)] = acc;
    }
    return p;
}

inline void add_checked(i128* key, const std::vector<i128>& p)
{
    for (std::size_t j = 0; j < p.size(); ++j)
        if (__builtin_add_overflow(key[j], p[j], &key[j]))
            throw infeasible_error("power sum overflows 128-bit arithmetic");
}

// Power tables for x = 1..X, row-major.
inline std::vector<std::vector<i128>> power_table(std::int64_t k, std::int64_t X)
{
    std::vector<std::vector<i128>> t(static_cast<std::size_t>(X));
    for (std::int64_t x = 1; x <= X; ++x) t[static_cast<std::size_t>(x - 1)] = powers_of(x, k);
    return t;
}

} // namespace detail

/// The key of one tuple; used by tests as a check on the table path.
inline PowerSumKey power_sum_key(const std::vector<std::int64_t>& tuple, std::int64_t k)
{
    PowerSumKey key(static_cast<std::size_t>(k), 0);
    for (auto x : tuple) detail::add_checked(key.data(), detail::powers_of(x, k));
    return key;
}

inline constexpr double bruteforce_guard = 1e9;

/// Enumerates every pair (x, y) in [1,X]^{2s} and compares power sums.
inline VinogradovCount count_bruteforce(std::int64_t s, std::int64_t k, std::int64_t X)
{
    detail::check_count_args(s, k, X);
    if (2.0 * static_cast<double>(s) * std::log10(static_cast<double>(X)) > std::log10(bruteforce_guard))
        throw infeasible_error("brute force needs X^(2s) <= 1e9 pairs; use meet-middle");

    const auto table = detail::power_table(k, X);
    const auto ku = static_cast<std::size_t>(k);
    std::int64_t tuples = 1;
    for (std::int64_t i = 0; i < s; ++i) tuples *= X;

    // keys of all ordered s-tuples, flat
    std::vector<i128> keys(static_cast<std::size_t>(tuples) * ku, 0);
    for (std::int64_t n = 0; n < tuples; ++n) {
        std::int64_t rest = n;
        i128* key = keys.data() + static_cast<std::size_t>(n) * ku;
        for (std::int64_t i = 0; i < s; ++i) {
            detail::add_checked(key, table[static_cast<std::size_t>(rest % X)]);
            rest /= X;
        }
    }

    std::uint64_t count = 0;
    for (std::int64_t a = 0; a < tuples; ++a) {
        const i128* ka = keys.data() + static_cast<std::size_t>(a) * ku;
        for (std::int64_t b = 0; b < tuples; ++b) {
            const i128* kb = keys.data() + static_cast<std::size_t>(b) * ku;
            if (std::equal(ka, ka + ku, kb)) ++count;
        }
    }
    return VinogradovCount{s, k, X, BigInt(count), count_method::brute};
}

/// Number of nondecreasing s-tuples over [1, X], C(X+s-1, s), as a double.
inline double multiset_count(std::int64_t s, std::int64_t X)
{
    double c = 1.0;
    for (std::int64_t i = 1; i <= s; ++i) c = c * static_cast<double>(X - 1 + i) / static_cast<double>(i);
    return c;
}

inline constexpr double default_memory_budget = 8.0 * 1024 * 1024 * 1024;

/// Estimated bytes of the multiplicity table for count_meet_middle.
inline double meet_middle_footprint(std::int64_t s, std::int64_t k, std::int64_t X)
{
    return multiset_count(s, X) * (static_cast<double>(k) * sizeof(i128) + 2 * sizeof(std::uint64_t));
}

/// J = sum over power-sum keys of (ordered multiplicity)^2. Tuples are
/// enumerated nondecreasing with multinomial weights s!/prod(m_i!), sharded
/// by first coordinate, then merged by sorting keys.
inline VinogradovCount count_meet_middle(std::int64_t s, std::int64_t k, std::int64_t X,
                                         double memory_budget = default_memory_budget, unsigned threads = 1)
{
    detail::check_count_args(s, k, X);
    if (s > 20) throw infeasible_error("multinomial weights need s <= 20");
    if (multiset_count(s, X) >= 0x1.0p32) throw infeasible_error("meet-middle supports fewer than 2^32 multisets");
    const double footprint = meet_middle_footprint(s, k, X);
    if (footprint > memory_budget)
        throw infeasible_error("meet-middle table needs about " + std::to_string(static_cast<std::uint64_t>(footprint)) +
                               " bytes, budget is " + std::to_string(static_cast<std::uint64_t>(memory_budget)));

    const auto table = detail::power_table(k, X);
    const auto ku = static_cast<std::size_t>(k);
    const auto su = static_cast<std::size_t>(s);

    std::vector<std::uint64_t> factorial(su + 1, 1);
    for (std::size_t i = 1; i <= su; ++i) factorial[i] = factorial[i - 1] * i;

    struct shard {
        std::vector<i128> keys;
        std::vector<std::uint64_t> weights;
    };
    std::vector<shard> shards(static_cast<std::size_t>(X));

    parallel_for(static_cast<std::size_t>(X), threads, [&](std::size_t first) {
        shard& out = shards[first];
        std::vector<std::size_t> tuple(su, first);
        std::vector<i128> key(ku);
        for (;;) {
            std::fill(key.begin(), key.end(), 0);
            std::uint64_t denom = 1;
            std::size_t run = 1;
            for (std::size_t i = 0; i < su; ++i) {
                detail::add_checked(key.data(), table[tuple[i]]);
                if (i > 0) {
                    run = tuple[i] == tuple[i - 1] ? run + 1 : 1;
                    denom *= run;
                }
            }
            out.keys.insert(out.keys.end(), key.begin(), key.end());
            out.weights.push_back(factorial[su] / denom);

            // next nondecreasing tuple with the same first entry
            std::size_t pos = su;
            while (pos > 1 && tuple[pos - 1] + 1 >= static_cast<std::size_t>(X)) --pos;
            if (pos <= 1) break;
            ++tuple[pos - 1];
            for (std::size_t i = pos; i < su; ++i) tuple[i] = tuple[pos - 1];
        }
    });

    std::size_t total = 0;
    for (const auto& sh : shards) total += sh.weights.size();
    std::vector<i128> keys;
    std::vector<std::uint64_t> weights;
    keys.reserve(total * ku);
    weights.reserve(total);
    for (auto& sh : shards) {
        keys.insert(keys.end(), sh.keys.begin(), sh.keys.end());
        weights.insert(weights.end(), sh.weights.begin(), sh.weights.end());
        sh = {};
    }

    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    auto key_of = [&](std::uint32_t i) { return keys.data() + static_cast<std::size_t>(i) * ku; };
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::lexicographical_compare(key_of(a), key_of(a) + ku, key_of(b), key_of(b) + ku);
    });

    BigInt J = 0;
    std::size_t i = 0;
    while (i < total) {
        std::uint64_t multiplicity = 0;
        std::size_t j = i;
        while (j < total && std::equal(key_of(order[i]), key_of(order[i]) + ku, key_of(order[j]))) {
            multiplicity += weights[order[j]];
            ++j;
        }
        BigInt m = multiplicity;
        J += m * m;
        i = j;
    }
    return VinogradovCount{s, k, X, J, count_method::meet_middle};
}

/// X^eps (X^s + X^(2s - k(k+1)/2)).
inline double mvt_bound(std::int64_t s, std::int64_t k, double X, double eps)
{
    if (s < 1) throw domain_error("s must be >= 1");
    if (X < 1) throw domain_error("X must be >= 1");
    if (eps < 0) throw domain_error("eps must be >= 0");
    const double critical = 0.5 * static_cast<double>(k) * static_cast<double>(k + 1);
    return std::pow(X, eps) * (std::pow(X, static_cast<double>(s)) + std::pow(X, 2.0 * static_cast<double>(s) - critical));
}

/// Ratio to the double of a big integer; exact up to double rounding.
inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

/// J_{k,k}(X) / (k! X^k).
inline double classical_ratio(std::int64_t k, std::int64_t X, double memory_budget = default_memory_budget,
                              unsigned threads = 1)
{
    VinogradovCount c = count_meet_middle(k, k, X, memory_budget, threads);
    BigInt denom = 1;
    for (std::int64_t i = 2; i <= k; ++i) denom *= i;
    for (std::int64_t i = 0; i < k; ++i) denom *= X;
    using boost::multiprecision::cpp_rational;
    return cpp_rational(c.J, denom).convert_to<double>();
}

/// u values for which the Main Conjecture is taken to hold, per degree k.
struct MVTProfile {
    struct entry {
        std::int64_t u = 0;
        std::string provenance;
    };

    std::optional<entry> lookup(std::int64_t k) const
    {
        auto it = entries.find(k);
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }

    /// Adds or replaces an entry; u must lie in [1, k(k+1)/2].
    void set(std::int64_t k, std::int64_t u, std::string provenance)
    {
        if (k < 1 || u < 1 || u > k * (k + 1) / 2)
            throw domain_error("profile entry u=" + std::to_string(u) + " outside 1..k(k+1)/2 for k=" + std::to_string(k));
        entries[k] = entry{u, std::move(provenance)};
    }

    std::map<std::int64_t, entry> entries;
};

/// floor((k+1)^2 / 4).
inline std::int64_t quarter_square_u(std::int64_t k) { return (k + 1) * (k + 1) / 4; }

/// floor(k(k+1)/2 - k/3 - 8 k^(2/3)); only meaningful for large k.
inline std::int64_t large_k_u(std::int64_t k)
{
    const double kk = static_cast<double>(k);
    return static_cast<std::int64_t>(std::floor(0.5 * kk * (kk + 1) - kk / 3.0 - 8.0 * std::cbrt(kk * kk)));
}

inline constexpr std::int64_t default_profile_max_k = 256;

/// floor((k+1)^2/4) for 4 <= k <= 256. Degree 3 and the large-k refinement
/// are left to callers through MVTProfile::set.
inline MVTProfile default_profile()
{
    MVTProfile p;
    for (std::int64_t k = 4; k <= default_profile_max_k; ++k)
        p.set(k, quarter_square_u(k), "floor((k+1)^2/4), known Main Conjecture range for k >= 4");
    return p;
}

} // namespace weylab
