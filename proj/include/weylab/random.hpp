#pragma once

#include <weylab/mod1.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace weylab {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the index-th task of a named stream; depends only on
/// (seed, stream, index), never on thread identity.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

/// Seeded generator. mt19937_64 output is fixed by the standard, and the
/// conversions below are done by hand so draws are identical across
/// standard libraries.
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
    {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Exactly uniform point on the 2^-128 grid.
    Mod1Fixed mod1()
    {
        u128 hi = engine_();
        u128 lo = engine_();
        return Mod1Fixed::from_bits((hi << 64) | lo);
    }

    /// Box-Muller, standard normal.
    double normal()
    {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// Additive recurrence (Kronecker) sequence in d dimensions with the
/// generalised golden ratio generator, rotated by a seeded shift. Point n is
/// shift + n*g computed in wraparound fixed point, so points are exact and a
/// prefix of the sequence is the same for any requested length.
class kronecker_sequence {
public:
    kronecker_sequence(std::size_t dims, std::uint64_t seed) : step_(dims), shift_(dims)
    {
        // phi_d is the positive root of x^(d+1) = x + 1
        double phi = 2.0;
        for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(dims + 1));
        rng gen(derive_seed(seed, 0x6b726f6eULL, dims));
        for (std::size_t j = 0; j < dims; ++j) {
            step_[j] = Mod1Fixed::from_double(std::pow(1.0 / phi, static_cast<double>(j + 1)));
            shift_[j] = gen.mod1();
        }
    }

    std::vector<Mod1Fixed> point(std::uint64_t n) const
    {
        std::vector<Mod1Fixed> p(step_.size());
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = shift_[j] + step_[j] * static_cast<u128>(n);
        return p;
    }

private:
    std::vector<Mod1Fixed> step_;
    std::vector<Mod1Fixed> shift_;
};

} // namespace weylab
