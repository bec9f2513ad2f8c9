#pragma once

#include <weylab/error.hpp>
#include <weylab/mod1.hpp>
#include <weylab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace weylab {

/// The coefficient tuple (alpha_1, ..., alpha_k) of the phase polynomial
/// alpha_1 x + ... + alpha_k x^k. Entries are exact points of R/Z; the rounded
/// value is the ground truth for every downstream computation.
template <class Word = u128>
class basic_coefficients {
public:
    using value_type = basic_mod1<Word>;

    basic_coefficients() = default;

    explicit basic_coefficients(std::vector<value_type> alpha) : alpha_(std::move(alpha))
    {
        if (alpha_.size() < 2) throw domain_error("coefficient vector needs degree k >= 2, got " + std::to_string(alpha_.size()));
    }

    static basic_coefficients zero(std::size_t k) { return basic_coefficients(std::vector<value_type>(k)); }

    /// Comma separated list of decimals or p/q rationals.
    static basic_coefficients parse(std::string_view list)
    {
        std::vector<value_type> alpha;
        std::size_t start = 0;
        while (start <= list.size()) {
            std::size_t comma = list.find(',', start);
            if (comma == std::string_view::npos) comma = list.size();
            alpha.push_back(value_type::parse(list.substr(start, comma - start)));
            start = comma + 1;
        }
        return basic_coefficients(std::move(alpha));
    }

    std::size_t degree() const noexcept { return alpha_.size(); }
    std::span<const value_type> values() const noexcept { return alpha_; }

    /// 1-based access, alpha_j for j in [1, k].
    value_type coefficient(std::size_t j) const { return alpha_.at(j - 1); }

    basic_coefficients with(std::size_t j, value_type v) const
    {
        basic_coefficients copy = *this;
        copy.alpha_.at(j - 1) = v;
        return copy;
    }

    /// The dilate h*alpha reduced mod 1, entrywise and exact.
    basic_coefficients dilated(std::uint64_t h) const
    {
        basic_coefficients copy = *this;
        for (auto& a : copy.alpha_) a *= static_cast<Word>(h);
        return copy;
    }

    basic_coefficients negated() const
    {
        basic_coefficients copy = *this;
        for (auto& a : copy.alpha_) a = -a;
        return copy;
    }

    /// p(x) mod 1 by Horner's rule in wraparound arithmetic. Exact.
    value_type phase_at(std::uint64_t x) const noexcept
    {
        const auto xw = static_cast<Word>(x);
        value_type acc = alpha_.back();
        for (std::size_t j = alpha_.size() - 1; j-- > 0;) {
            acc *= xw;
            acc += alpha_[j];
        }
        acc *= xw;
        return acc;
    }

    friend bool operator==(const basic_coefficients&, const basic_coefficients&) = default;

private:
    std::vector<value_type> alpha_;
};

using CoefficientVector = basic_coefficients<u128>;

/// A Weyl sum value together with the number of terms summed.
struct WeylValue {
    double re = 0.0;
    double im = 0.0;
    double modulus = 0.0;
    std::uint64_t terms = 0;

    std::complex<double> complex() const { return {re, im}; }
};

/// Block re-seeding policy for the difference-table evaluator.
struct ErrorBudget {
    unsigned width = 128;
    std::uint64_t block = 1;
    double phase_error_bound = 0.0;

    /// log2 of (k+1) * C(block, k) * 2^-width.
    static double log2_required(std::size_t k, std::uint64_t block, unsigned width)
    {
        if (block < k) return -INFINITY;
        double b = static_cast<double>(block);
        double kk = static_cast<double>(k);
        double log_binom = std::lgamma(b + 1) - std::lgamma(kk + 1) - std::lgamma(b - kk + 1);
        return std::log2(kk + 1) + log_binom / std::log(2.0) - width;
    }

    /// Largest block (capped at 2^20) with (k+1) C(B,k) 2^-W <= 2^-40.
    static ErrorBudget for_degree(std::size_t k, unsigned width = 128)
    {
        constexpr double target_log2 = -40.0;
        std::uint64_t lo = 1;
        std::uint64_t hi = std::uint64_t{1} << 20;
        if (log2_required(k, hi, width) <= target_log2) {
            lo = hi;
        } else {
            while (hi - lo > 1) {
                std::uint64_t mid = lo + (hi - lo) / 2;
                if (log2_required(k, mid, width) <= target_log2)
                    lo = mid;
                else
                    hi = mid;
            }
        }
        return ErrorBudget{width, lo, std::exp2(target_log2)};
    }

    /// Throws budget_error naming the violated inequality.
    void check(std::size_t k) const
    {
        if (block == 0) throw budget_error("block B must be >= 1");
        double need = log2_required(k, block, width);
        if (std::isfinite(need) && std::log2(phase_error_bound) < need) {
            throw budget_error("phase_error_bound >= (k+1)*C(B,k)*2^-W violated: k=" + std::to_string(k) +
                               " B=" + std::to_string(block) + " W=" + std::to_string(width) + " requires >= 2^" +
                               std::to_string(need) + ", have " + std::to_string(phase_error_bound));
        }
    }
};

namespace detail {

inline constexpr std::size_t chunk_terms = 2048;

inline double pairwise_sum(std::span<const double> v)
{
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline std::uint64_t chunk_count(std::uint64_t X) { return (X + chunk_terms - 1) / chunk_terms; }

// Drives a chunked summation: fill(first_x, phases) writes the phases for
// x = first_x, first_x + 1, ... Chunk sums are reduced pairwise in chunk
// order so the result does not depend on the thread count.
template <class Word, class Fill>
WeylValue sum_chunks(std::uint64_t X, unsigned threads, Fill&& fill);

} // namespace detail

/// Batch unit-circle conversion e(theta) for a run of phases.
template <class Word>
void to_unit_circle(std::span<const basic_mod1<Word>> phases, std::span<double> re, std::span<double> im)
{
    for (std::size_t i = 0; i < phases.size(); ++i) {
        double angle = 2.0 * M_PI * phases[i].to_centered();
        re[i] = std::cos(angle);
        im[i] = std::sin(angle);
    }
}

template <class Word, class Fill>
WeylValue detail::sum_chunks(std::uint64_t X, unsigned threads, Fill&& fill)
{
    const std::uint64_t chunks = chunk_count(X);
    std::vector<double> part_re(chunks), part_im(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        std::uint64_t first = 1 + c * chunk_terms;
        std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(chunk_terms, X - first + 1));
        std::vector<basic_mod1<Word>> phases(len);
        std::vector<double> re(len), im(len);
        fill(first, std::span<basic_mod1<Word>>(phases));
        to_unit_circle<Word>(phases, re, im);
        part_re[c] = pairwise_sum(re);
        part_im[c] = pairwise_sum(im);
    });
    WeylValue v;
    v.re = pairwise_sum(part_re);
    v.im = pairwise_sum(part_im);
    v.modulus = std::hypot(v.re, v.im);
    v.terms = X;
    return v;
}

/// Reference evaluator: every phase is reduced mod 1 exactly by Horner's rule
/// and truncated to `precision` fractional bits before conversion.
template <class Word>
WeylValue eval_direct(const basic_coefficients<Word>& coeffs, std::int64_t X,
                      unsigned precision = basic_mod1<Word>::width, unsigned threads = 1)
{
    constexpr unsigned width = basic_mod1<Word>::width;
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    if (precision < 64) throw config_error("precision must be >= 64 bits, got " + std::to_string(precision));
    if (precision > width) throw config_error("precision exceeds the fixed-point width " + std::to_string(width));
    const Word mask = precision == width ? ~Word{0} : static_cast<Word>(~((Word{1} << (width - precision)) - 1));
    return detail::sum_chunks<Word>(static_cast<std::uint64_t>(X), threads,
                                    [&](std::uint64_t first, std::span<basic_mod1<Word>> out) {
                                        for (std::size_t i = 0; i < out.size(); ++i)
                                            out[i] = basic_mod1<Word>(coeffs.phase_at(first + i).bits() & mask);
                                    });
}

namespace detail {

// Forward difference table of p at x: d[j] = Delta^j p(x) mod 1, j = 0..k.
template <class Word>
std::vector<basic_mod1<Word>> seed_table(const basic_coefficients<Word>& coeffs, std::uint64_t x)
{
    const std::size_t k = coeffs.degree();
    std::vector<basic_mod1<Word>> d(k + 1);
    for (std::size_t i = 0; i <= k; ++i) d[i] = coeffs.phase_at(x + i);
    for (std::size_t j = 1; j <= k; ++j)
        for (std::size_t i = k; i >= j; --i) d[i] -= d[i - 1];
    return d;
}

template <class Word>
void step_table(std::vector<basic_mod1<Word>>& d) noexcept
{
    for (std::size_t j = 0; j + 1 < d.size(); ++j) d[j] += d[j + 1];
}

// Phases p(first), p(first+1), ... by exact wraparound differencing,
// re-seeded from direct evaluation every `block` steps.
template <class Word>
void difference_phases(const basic_coefficients<Word>& coeffs, std::uint64_t block, std::uint64_t first,
                       std::span<basic_mod1<Word>> out)
{
    auto table = seed_table(coeffs, first);
    std::uint64_t since_seed = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (since_seed == block) {
            table = seed_table(coeffs, first + i);
            since_seed = 0;
        }
        out[i] = table[0];
        step_table(table);
        ++since_seed;
    }
}

} // namespace detail

/// Fast evaluator. Phases come from a forward-difference table updated with
/// exact wraparound additions; the table is re-seeded at every chunk start and
/// at least every budget.block terms.
template <class Word>
WeylValue eval_fast(const basic_coefficients<Word>& coeffs, std::int64_t X, const ErrorBudget& budget,
                    unsigned threads = 1)
{
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    if (budget.width != basic_mod1<Word>::width)
        throw budget_error("budget width " + std::to_string(budget.width) + " does not match fixed-point width " +
                           std::to_string(basic_mod1<Word>::width));
    budget.check(coeffs.degree());
    return detail::sum_chunks<Word>(static_cast<std::uint64_t>(X), threads,
                                    [&](std::uint64_t first, std::span<basic_mod1<Word>> out) {
                                        detail::difference_phases(coeffs, budget.block, first, out);
                                    });
}

template <class Word>
WeylValue eval_fast(const basic_coefficients<Word>& coeffs, std::int64_t X)
{
    return eval_fast(coeffs, X, ErrorBudget::for_degree(coeffs.degree(), basic_mod1<Word>::width));
}

/// f_k(h alpha; X).
template <class Word>
WeylValue eval_dilate(const basic_coefficients<Word>& coeffs, std::int64_t h, std::int64_t X, unsigned threads = 1)
{
    if (h < 1) throw domain_error("dilation h must be >= 1, got " + std::to_string(h));
    auto dilated = coeffs.dilated(static_cast<std::uint64_t>(h));
    return eval_fast(dilated, X, ErrorBudget::for_degree(coeffs.degree(), basic_mod1<Word>::width), threads);
}

/// The Weyl sum with its moments sum_x (x/X)^j e(p(x)) for selected powers j.
/// d|f|^2/d alpha_j = -4 pi X^j Im(conj(f) * moment_j).
struct WeylMoments {
    WeylValue value;
    std::vector<std::complex<double>> moments;
};

template <class Word>
WeylMoments eval_with_moments(const basic_coefficients<Word>& coeffs, std::int64_t X, std::span<const std::size_t> powers)
{
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    const auto n = static_cast<std::uint64_t>(X);
    const std::size_t max_power = powers.empty() ? 0 : *std::max_element(powers.begin(), powers.end());
    const double inv_x = 1.0 / static_cast<double>(X);

    std::vector<double> chunk_re, chunk_im;
    std::vector<std::complex<double>> moments(powers.size());
    std::vector<basic_mod1<Word>> phases(detail::chunk_terms);
    std::vector<double> re(detail::chunk_terms), im(detail::chunk_terms), ratio_pow(max_power + 1);

    for (std::uint64_t first = 1; first <= n; first += detail::chunk_terms) {
        std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(detail::chunk_terms, n - first + 1));
        std::span<basic_mod1<Word>> ph(phases.data(), len);
        detail::difference_phases(coeffs, detail::chunk_terms, first, ph);
        to_unit_circle<Word>(ph, std::span<double>(re.data(), len), std::span<double>(im.data(), len));
        chunk_re.push_back(detail::pairwise_sum(std::span<const double>(re.data(), len)));
        chunk_im.push_back(detail::pairwise_sum(std::span<const double>(im.data(), len)));
        for (std::size_t i = 0; i < len; ++i) {
            double r = static_cast<double>(first + i) * inv_x;
            ratio_pow[0] = 1.0;
            for (std::size_t p = 1; p <= max_power; ++p) ratio_pow[p] = ratio_pow[p - 1] * r;
            for (std::size_t m = 0; m < powers.size(); ++m)
                moments[m] += std::complex<double>(ratio_pow[powers[m]] * re[i], ratio_pow[powers[m]] * im[i]);
        }
    }

    WeylMoments out;
    out.value.re = detail::pairwise_sum(chunk_re);
    out.value.im = detail::pairwise_sum(chunk_im);
    out.value.modulus = std::hypot(out.value.re, out.value.im);
    out.value.terms = n;
    out.moments = std::move(moments);
    return out;
}

/// Half-widths (4 pi k)^-1 T X^(-j-1), j = 1..k, of the box around alpha on
/// which a sum exceeding T in modulus stays above T/2.
inline std::vector<double> perturbation_box(double T, std::int64_t X, std::size_t k)
{
    if (!(T > 0)) throw domain_error("perturbation box needs T > 0");
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    if (k < 1) throw domain_error("degree k must be >= 1");
    std::vector<double> widths(k);
    const double base = T / (4.0 * M_PI * static_cast<double>(k));
    const double x = static_cast<double>(X);
    for (std::size_t j = 1; j <= k; ++j) widths[j - 1] = base * std::pow(x, -static_cast<double>(j + 1));
    return widths;
}

/// 2 pi X^(j+1), a bound for |d f / d alpha_j| on all of R^k.
inline double derivative_bound(std::size_t j, std::int64_t X)
{
    if (j < 1) throw domain_error("derivative index j must be >= 1");
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    return 2.0 * M_PI * std::pow(static_cast<double>(X), static_cast<double>(j + 1));
}

} // namespace weylab
