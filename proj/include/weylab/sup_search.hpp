#pragma once

#include <weylab/error.hpp>
#include <weylab/mod1.hpp>
#include <weylab/parallel.hpp>
#include <weylab/phase.hpp>
#include <weylab/random.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace weylab {

/// Splits {1..k} into the indices i_1 < ... < i_t over which the supremum is
/// taken and the complementary ambient indices.
class IndexSplit {
public:
    IndexSplit(std::size_t k, std::vector<std::size_t> sup_indices) : k_(k), sup_(std::move(sup_indices))
    {
        if (k_ < 1) throw domain_error("degree k must be >= 1");
        if (sup_.empty()) throw domain_error("index split needs at least one supremum index");
        for (std::size_t l = 0; l < sup_.size(); ++l) {
            if (sup_[l] < 1 || sup_[l] > k_)
                throw domain_error("supremum index " + std::to_string(sup_[l]) + " outside 1.." + std::to_string(k_));
            if (l > 0 && sup_[l] <= sup_[l - 1]) throw domain_error("supremum indices must be strictly increasing");
            sigma_ += sup_[l];
        }
        std::size_t next = 0;
        for (std::size_t j = 1; j <= k_; ++j) {
            if (next < sup_.size() && sup_[next] == j)
                ++next;
            else
                ambient_.push_back(j);
        }
    }

    /// "1,3,k" with the literal token k standing for the degree.
    static IndexSplit parse(std::string_view list, std::size_t k)
    {
        std::vector<std::size_t> idx;
        std::size_t start = 0;
        while (start <= list.size()) {
            std::size_t comma = list.find(',', start);
            if (comma == std::string_view::npos) comma = list.size();
            std::string token(list.substr(start, comma - start));
            if (token == "k") {
                idx.push_back(k);
            } else {
                std::size_t used = 0;
                unsigned long v = 0;
                try {
                    v = std::stoul(token, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (token.empty() || used != token.size())
                    throw config_error("bad supremum index '" + token + "'");
                idx.push_back(v);
            }
            start = comma + 1;
        }
        return IndexSplit(k, std::move(idx));
    }

    static IndexSplit full(std::size_t k)
    {
        std::vector<std::size_t> all(k);
        for (std::size_t j = 0; j < k; ++j) all[j] = j + 1;
        return IndexSplit(k, std::move(all));
    }

    std::size_t k() const noexcept { return k_; }
    std::size_t t() const noexcept { return sup_.size(); }
    std::size_t sigma() const noexcept { return sigma_; }
    const std::vector<std::size_t>& sup_indices() const noexcept { return sup_; }
    const std::vector<std::size_t>& ambient_indices() const noexcept { return ambient_; }

    /// Full coefficient vector from ambient values (ordered by ambient index)
    /// and supremum values (ordered by supremum index).
    CoefficientVector assemble(std::span<const Mod1Fixed> ambient, std::span<const Mod1Fixed> sup) const
    {
        if (ambient.size() != ambient_.size())
            throw domain_error("expected " + std::to_string(ambient_.size()) + " ambient coefficients, got " +
                               std::to_string(ambient.size()));
        if (sup.size() != sup_.size())
            throw domain_error("expected " + std::to_string(sup_.size()) + " supremum coefficients, got " +
                               std::to_string(sup.size()));
        std::vector<Mod1Fixed> alpha(k_);
        for (std::size_t m = 0; m < ambient_.size(); ++m) alpha[ambient_[m] - 1] = ambient[m];
        for (std::size_t l = 0; l < sup_.size(); ++l) alpha[sup_[l] - 1] = sup[l];
        return CoefficientVector(std::move(alpha));
    }

    friend bool operator==(const IndexSplit&, const IndexSplit&) = default;

private:
    std::size_t k_;
    std::vector<std::size_t> sup_;
    std::vector<std::size_t> ambient_;
    std::size_t sigma_ = 0;
};

using AmbientTuple = std::vector<Mod1Fixed>;

/// Cells [m_l d_l, (m_l+1) d_l], 0 <= m_l <= M_l, covering [0,1)^t.
struct GridPlan {
    double T = 0.0;
    std::vector<double> spacings;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_points = 0;
};

inline GridPlan grid_plan(const IndexSplit& split, std::int64_t X, double T)
{
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    if (!(T > 0) || T > static_cast<double>(X)) throw domain_error("grid plan needs 0 < T <= X");
    GridPlan plan;
    plan.T = T;
    const double base = T / (4.0 * M_PI * static_cast<double>(split.k()));
    std::uint64_t total = 1;
    bool overflow = false;
    for (std::size_t i : split.sup_indices()) {
        double spacing = base * std::pow(static_cast<double>(X), -static_cast<double>(i + 1));
        double inv = std::floor(1.0 / spacing);
        if (!(inv < 0x1.0p63)) {
            overflow = true;
            inv = 0x1.0p63;
        }
        auto m = static_cast<std::uint64_t>(inv);
        plan.spacings.push_back(spacing);
        plan.counts.push_back(m);
        if (__builtin_mul_overflow(total, m + 1, &total)) overflow = true;
    }
    if (overflow)
        throw infeasible_error("certified grid has more than 2^64 cells; use heuristic mode");
    plan.total_points = total;
    return plan;
}

enum class sup_mode { certified, heuristic };

inline const char* to_string(sup_mode m) { return m == sup_mode::certified ? "certified" : "heuristic"; }

struct SupResult {
    double lower = 0.0;
    std::optional<double> upper;
    std::vector<Mod1Fixed> argmax;
    std::uint64_t evaluations = 0;
    sup_mode mode = sup_mode::heuristic;

    friend bool operator==(const SupResult&, const SupResult&) = default;
};

struct SupOptions {
    std::uint64_t node_budget = 100'000'000;
    unsigned max_iterations = 200;
    unsigned threads = 1;
    /// Heuristic mode: when alpha_1 is free, each start first moves alpha_1 to
    /// the best point of a grid of spacing 1/(oversampling X) found by FFT.
    bool linear_scan = true;
    unsigned scan_oversampling = 8;
};

namespace detail {

inline bool lex_less(const std::vector<Mod1Fixed>& a, const std::vector<Mod1Fixed>& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Larger modulus wins; equal moduli break toward the lexicographically
// smallest argmax.
inline bool better(double value, const std::vector<Mod1Fixed>& point, double best, const std::vector<Mod1Fixed>& best_point)
{
    if (value != best) return value > best;
    return lex_less(point, best_point);
}

} // namespace detail

/// Certified supremum of |f| over alpha* on the Lipschitz grid. The true
/// supremum lies in [lower, upper] with upper = lower + t T / (4k).
inline SupResult certified_sup(const AmbientTuple& ambient, const IndexSplit& split, std::int64_t X, double T,
                               const SupOptions& options = {})
{
    if (!(T > 0)) throw domain_error("certified supremum needs T > 0");
    const GridPlan plan = grid_plan(split, X, T);
    const std::size_t t = split.t();

    // Nodes m * step for m = 0 .. M_l + 1; the last node wraps past 1 == 0.
    std::vector<Mod1Fixed> steps(t);
    std::vector<std::uint64_t> radix(t);
    std::uint64_t nodes = 1;
    for (std::size_t l = 0; l < t; ++l) {
        steps[l] = Mod1Fixed::from_double(plan.spacings[l], Mod1Fixed::rounding::down);
        radix[l] = plan.counts[l] + 2;
        if (__builtin_mul_overflow(nodes, radix[l], &nodes)) nodes = std::numeric_limits<std::uint64_t>::max();
    }
    if (nodes > options.node_budget)
        throw infeasible_error("certified grid needs " + std::to_string(nodes) + " nodes, budget is " +
                               std::to_string(options.node_budget) + "; use heuristic mode");

    const ErrorBudget budget = ErrorBudget::for_degree(split.k());
    constexpr std::uint64_t batch = 4096;
    const std::uint64_t batches = (nodes + batch - 1) / batch;
    std::vector<double> best(batches, -1.0);
    std::vector<std::vector<Mod1Fixed>> best_point(batches);

    parallel_for(batches, options.threads, [&](std::size_t b) {
        std::vector<Mod1Fixed> point(t);
        const std::uint64_t end = std::min(nodes, (b + 1) * batch);
        for (std::uint64_t n = b * batch; n < end; ++n) {
            std::uint64_t rest = n;
            for (std::size_t l = t; l-- > 0;) {
                point[l] = steps[l] * static_cast<u128>(rest % radix[l]);
                rest /= radix[l];
            }
            double v = eval_fast(split.assemble(ambient, point), X, budget).modulus;
            if (best_point[b].empty() || detail::better(v, point, best[b], best_point[b])) {
                best[b] = v;
                best_point[b] = point;
            }
        }
    });

    SupResult r;
    r.mode = sup_mode::certified;
    r.evaluations = nodes;
    r.lower = -1.0;
    for (std::uint64_t b = 0; b < batches; ++b) {
        if (r.argmax.empty() || detail::better(best[b], best_point[b], r.lower, r.argmax)) {
            r.lower = best[b];
            r.argmax = best_point[b];
        }
    }
    r.upper = r.lower + static_cast<double>(t) * T / (4.0 * static_cast<double>(split.k()));
    return r;
}

namespace detail {

// FFTW planning is not thread safe; execution is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

// The start with alpha_1 replaced by argmax_m |f| over alpha_1 = m/L, where
// f(alpha_1) = sum_x c_x e(alpha_1 x) is one DFT of the remaining phases.
inline std::vector<Mod1Fixed> scan_linear(const AmbientTuple& ambient, const IndexSplit& split, std::int64_t X,
                                          std::vector<Mod1Fixed> point, unsigned oversampling)
{
    const auto n = static_cast<std::uint64_t>(X);
    std::uint64_t L = 1;
    unsigned log2_L = 0;
    while (L < std::uint64_t{oversampling} * n || L <= n) {
        L <<= 1;
        ++log2_L;
    }
    point[0] = Mod1Fixed{};
    const CoefficientVector coeffs = split.assemble(ambient, point);
    const std::uint64_t block = ErrorBudget::for_degree(coeffs.degree()).block;

    fftw_complex* buf = fftw_alloc_complex(L);
    std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * L, 0.0);
    std::vector<Mod1Fixed> phases(chunk_terms);
    std::vector<double> re(chunk_terms), im(chunk_terms);
    for (std::uint64_t first = 1; first <= n; first += chunk_terms) {
        const auto len = static_cast<std::size_t>(std::min<std::uint64_t>(chunk_terms, n - first + 1));
        std::span<Mod1Fixed> ph(phases.data(), len);
        difference_phases(coeffs, block, first, ph);
        to_unit_circle<u128>(ph, std::span<double>(re.data(), len), std::span<double>(im.data(), len));
        for (std::size_t i = 0; i < len; ++i) {
            buf[first + i][0] = re[i];
            buf[first + i][1] = im[i];
        }
    }
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(L), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::uint64_t best = 0;
    double best_value = -1.0;
    for (std::uint64_t m = 0; m < L; ++m) {
        const double v = buf[m][0] * buf[m][0] + buf[m][1] * buf[m][1];
        if (v > best_value) {
            best_value = v;
            best = m;
        }
    }
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    point[0] = Mod1Fixed::from_bits(static_cast<u128>(best) << (Mod1Fixed::width - log2_L));
    return point;
}

struct ascent_result {
    double value = 0.0;
    std::vector<Mod1Fixed> point;
    std::uint64_t evaluations = 0;
};

// Gradient ascent on |f|^2 in the scaled coordinates y_l = alpha_{i_l} X^{i_l},
// with Armijo backtracking. Coordinates wrap mod 1.
inline ascent_result ascend(const AmbientTuple& ambient, const IndexSplit& split, std::int64_t X,
                            std::vector<Mod1Fixed> point, unsigned max_iterations)
{
    const std::size_t t = split.t();
    const auto& powers = split.sup_indices();
    std::vector<double> scale(t);
    for (std::size_t l = 0; l < t; ++l) scale[l] = std::pow(static_cast<double>(X), -static_cast<double>(powers[l]));

    ascent_result out;
    auto evaluate = [&](const std::vector<Mod1Fixed>& p) {
        ++out.evaluations;
        return eval_with_moments(split.assemble(ambient, p), X, powers);
    };
    auto gradient = [&](const WeylMoments& m) {
        std::vector<double> g(t);
        const std::complex<double> conj_f = std::conj(m.value.complex());
        for (std::size_t l = 0; l < t; ++l) g[l] = -4.0 * M_PI * (conj_f * m.moments[l]).imag();
        return g;
    };

    WeylMoments current = evaluate(point);
    double value = current.value.modulus * current.value.modulus;
    double step = 0.1;
    for (unsigned iter = 0; iter < max_iterations; ++iter) {
        std::vector<double> g = gradient(current);
        double g_max = 0.0, g_norm2 = 0.0;
        for (double gi : g) {
            g_max = std::max(g_max, std::fabs(gi));
            g_norm2 += gi * gi;
        }
        if (g_max == 0.0) break;

        bool accepted = false;
        while (step > 1e-12) {
            const double eta = step / g_max;
            std::vector<Mod1Fixed> trial = point;
            for (std::size_t l = 0; l < t; ++l) trial[l] += Mod1Fixed::from_double(eta * g[l] * scale[l]);
            WeylMoments next = evaluate(trial);
            const double next_value = next.value.modulus * next.value.modulus;
            if (next_value > value && next_value >= value + 1e-4 * eta * g_norm2) {
                point = std::move(trial);
                current = std::move(next);
                value = next_value;
                accepted = true;
                step = std::min(step * 2.0, 0.5);
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    out.value = current.value.modulus;
    out.point = std::move(point);
    return out;
}

} // namespace detail

/// Multi-start ascent lower bound for the supremum. Start 0 is alpha* = 0,
/// later starts come from a seeded Kronecker sequence; the result depends on
/// (seed, starts) only. With linear_scan, a start whose alpha_1 is free first
/// jumps to the best alpha_1 on an FFT grid if that improves it.
inline SupResult heuristic_sup(const AmbientTuple& ambient, const IndexSplit& split, std::int64_t X,
                               std::uint64_t starts, std::uint64_t seed, const SupOptions& options = {})
{
    if (starts < 1) throw domain_error("heuristic supremum needs starts >= 1");
    if (X < 1) throw domain_error("X must be >= 1, got " + std::to_string(X));
    const kronecker_sequence sequence(split.t(), seed);

    std::vector<detail::ascent_result> runs(starts);
    parallel_for(starts, options.threads, [&](std::size_t s) {
        std::vector<Mod1Fixed> start = s == 0 ? std::vector<Mod1Fixed>(split.t()) : sequence.point(s);
        std::uint64_t scan_evaluations = 0;
        if (options.linear_scan && split.sup_indices().front() == 1) {
            auto scanned = detail::scan_linear(ambient, split, X, start, options.scan_oversampling);
            scan_evaluations = 2;
            if (eval_fast(split.assemble(ambient, scanned), X).modulus > eval_fast(split.assemble(ambient, start), X).modulus)
                start = std::move(scanned);
        }
        runs[s] = detail::ascend(ambient, split, X, std::move(start), options.max_iterations);
        runs[s].evaluations += scan_evaluations;
    });

    SupResult r;
    r.mode = sup_mode::heuristic;
    for (const auto& run : runs) {
        r.evaluations += run.evaluations;
        if (r.argmax.empty() || detail::better(run.value, run.point, r.lower, r.argmax)) {
            r.lower = run.value;
            r.argmax = run.point;
        }
    }
    return r;
}

struct DilateSup {
    std::int64_t h = 1;
    SupResult result;
};

/// max over 1 <= h <= H of sup_{alpha*} |f(h alpha; X)|. Since h alpha* runs
/// over all of [0,1)^t, the per-h supremum is the plain supremum with the
/// ambient tuple dilated by h; argmax is reported as a preimage alpha*.
inline DilateSup sup_over_dilates(const AmbientTuple& ambient, const IndexSplit& split, std::int64_t X, std::int64_t H,
                                  sup_mode mode, std::uint64_t seed, double T, std::uint64_t starts,
                                  const SupOptions& options = {})
{
    if (H < 1) throw domain_error("H must be >= 1, got " + std::to_string(H));
    DilateSup best;
    for (std::int64_t h = 1; h <= H; ++h) {
        AmbientTuple dilated = ambient;
        for (auto& a : dilated) a *= static_cast<u128>(h);
        SupResult r = mode == sup_mode::certified ? certified_sup(dilated, split, X, T, options)
                                                  : heuristic_sup(dilated, split, X, starts, seed, options);
        for (auto& a : r.argmax) a = Mod1Fixed::from_bits(a.bits() / static_cast<u128>(h));
        std::uint64_t spent = best.result.evaluations + r.evaluations;
        if (h == 1 || r.lower > best.result.lower) {
            best.h = h;
            best.result = std::move(r);
        }
        best.result.evaluations = spent;
    }
    return best;
}

} // namespace weylab
