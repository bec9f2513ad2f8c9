#pragma once

#include <weylab/error.hpp>
#include <weylab/mod1.hpp>
#include <weylab/parallel.hpp>
#include <weylab/phase.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace weylab {

/// Closed interval [a, b] of R/Z with 0 <= a < b <= 1. b = 1 covers the
/// whole circle.
struct IntervalMod1 {
    double a = 0.0;
    double b = 1.0;

    IntervalMod1() = default;
    IntervalMod1(double lo, double hi) : a(lo), b(hi)
    {
        if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
            throw domain_error("interval needs 0 <= a < b <= 1, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    bool contains(double u) const noexcept { return a <= u && u <= b; }
    double length() const noexcept { return b - a; }
};

struct EquidistResult {
    std::int64_t Z = 0;
    double expected = 0.0;
    double deviation = 0.0;
    std::int64_t N = 0;
};

/// Fractional parts {p(n)}, n = 1..N, from the exact mod 1 phase rounded
/// once to double.
inline std::vector<double> fractional_parts(const CoefficientVector& coeffs, std::int64_t N)
{
    if (N < 1) throw domain_error("N must be >= 1, got " + std::to_string(N));
    std::vector<double> u(static_cast<std::size_t>(N));
    for (std::int64_t n = 1; n <= N; ++n) u[static_cast<std::size_t>(n - 1)] = coeffs.phase_at(static_cast<std::uint64_t>(n)).to_double();
    return u;
}

/// Z_{a,b}(alpha; N): the number of n <= N with a <= {p(n)} <= b.
inline EquidistResult count_Z(const CoefficientVector& coeffs, std::int64_t N, const IntervalMod1& interval)
{
    const auto u = fractional_parts(coeffs, N);
    EquidistResult r;
    r.N = N;
    r.Z = std::count_if(u.begin(), u.end(), [&](double v) { return interval.contains(v); });
    r.expected = interval.length() * static_cast<double>(N);
    r.deviation = std::fabs(static_cast<double>(r.Z) - r.expected);
    return r;
}

/// Star discrepancy of a point set in [0,1): sorts and returns
/// max_i max(i/N - u_(i), u_(i) - (i-1)/N).
inline double star_discrepancy(std::vector<double> points)
{
    if (points.empty()) throw domain_error("star discrepancy of an empty point set");
    std::sort(points.begin(), points.end());
    const double n = static_cast<double>(points.size());
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = points[i];
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n));
    }
    return d;
}

inline double star_discrepancy(const CoefficientVector& coeffs, std::int64_t N)
{
    return star_discrepancy(fractional_parts(coeffs, N));
}

/// X/(H+1) + 3 sum_{h<=H} |f_k(h alpha; X)| / h, which dominates
/// |Z_{a,b}(alpha; X) - (b-a) X| for every interval.
inline double erdos_turan_bound(const CoefficientVector& coeffs, std::int64_t X, std::int64_t H, unsigned threads = 1)
{
    if (H < 1) throw domain_error("H must be >= 1, got " + std::to_string(H));
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    std::vector<double> terms(static_cast<std::size_t>(H));
    parallel_for(terms.size(), threads, [&](std::size_t i) {
        const auto h = static_cast<std::int64_t>(i + 1);
        terms[i] = eval_dilate(coeffs, h, X).modulus / static_cast<double>(h);
    });
    double sum = 0.0;
    for (double t : terms) sum += t;
    return static_cast<double>(X) / static_cast<double>(H + 1) + 3.0 * sum;
}

struct MinFractional {
    std::int64_t n = 1;
    double value = 0.0;
};

/// min_{n<=N} ||p(n)||, first minimiser on ties. Distances are compared
/// exactly in fixed point.
inline MinFractional min_fractional(const CoefficientVector& coeffs, std::int64_t N)
{
    if (N < 1) throw domain_error("N must be >= 1, got " + std::to_string(N));
    auto distance_bits = [](Mod1Fixed p) {
        u128 f = p.bits();
        u128 g = u128{0} - f;
        return f < g ? f : g;
    };
    MinFractional best;
    u128 best_bits = distance_bits(coeffs.phase_at(1));
    for (std::int64_t n = 2; n <= N && best_bits != 0; ++n) {
        u128 d = distance_bits(coeffs.phase_at(static_cast<std::uint64_t>(n)));
        if (d < best_bits) {
            best_bits = d;
            best.n = n;
        }
    }
    best.value = Mod1Fixed::from_bits(best_bits).to_double();
    return best;
}

/// floor(X^(1/2 - nu - 2 tau)).
inline std::int64_t choose_H(double X, double nu, double tau)
{
    const double exponent = 0.5 - nu - 2.0 * tau;
    if (!(exponent > 0))
        throw config_error("choose_H needs 1/2 - nu - 2 tau > 0, got " + std::to_string(exponent));
    if (X < 1) throw domain_error("X must be >= 1");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::pow(X, exponent))));
}

} // namespace weylab
