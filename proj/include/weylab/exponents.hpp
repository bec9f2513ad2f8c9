#pragma once

#include <weylab/error.hpp>
#include <weylab/sup_search.hpp>

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace weylab {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r)
{
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r)
{
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

namespace detail {

inline void check_u(const IndexSplit& split, std::int64_t u)
{
    const auto k = static_cast<std::int64_t>(split.k());
    if (u < 1 || u > k * (k + 1) / 2)
        throw domain_error("u=" + std::to_string(u) + " outside the range 1..k(k+1)/2 = " + std::to_string(k * (k + 1) / 2));
}

} // namespace detail

/// delta(i) = (t + 1 + 2 sigma) / (4u + 2t + 2), the supremum exponent gain.
inline Rational delta_exponent(const IndexSplit& split, std::int64_t u)
{
    detail::check_u(split, u);
    const auto t = static_cast<std::int64_t>(split.t());
    const auto sigma = static_cast<std::int64_t>(split.sigma());
    return Rational(t + 1 + 2 * sigma, 4 * u + 2 * t + 2);
}

/// nu(i) = (t + 2 + 2 sigma) / (4u + 2t + 4), the discrepancy exponent gain.
inline Rational nu_exponent(const IndexSplit& split, std::int64_t u)
{
    detail::check_u(split, u);
    const auto t = static_cast<std::int64_t>(split.t());
    const auto sigma = static_cast<std::int64_t>(split.sigma());
    return Rational(t + 2 + 2 * sigma, 4 * u + 2 * t + 4);
}

/// Exponent bookkeeping for one experiment.
struct ExponentTarget {
    IndexSplit split;
    std::int64_t u = 1;
    Rational delta;
    Rational nu;
    double tau = 0.05;
    double eps = 0.0;

    static ExponentTarget make(const IndexSplit& split, std::int64_t u, double tau = 0.05, double eps = 0.0)
    {
        if (!(tau > 0)) throw domain_error("tau must be positive");
        if (eps < 0) throw domain_error("eps must be >= 0");
        return ExponentTarget{split, u, delta_exponent(split, u), nu_exponent(split, u), tau, eps};
    }

    /// 1/2 + delta + tau, the exponent of T(X) for the supremum problem.
    double sup_exponent() const { return 0.5 + to_double(delta) + tau; }
    /// 1/2 + nu + tau, the exponent of T(X) for the discrepancy problem.
    double discrepancy_exponent() const { return 0.5 + to_double(nu) + tau; }
};

} // namespace weylab
