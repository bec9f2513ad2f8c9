#pragma once

#include <weylab/error.hpp>
#include <weylab/exponents.hpp>
#include <weylab/parallel.hpp>
#include <weylab/phase.hpp>
#include <weylab/random.hpp>
#include <weylab/sup_search.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace weylab {

// Stream tags for derive_seed.
inline constexpr std::uint64_t ambient_stream = 0x616d6269ULL;
inline constexpr std::uint64_t starts_stream = 0x73746172ULL;
inline constexpr std::uint64_t lemma21_stream = 0x6c656d6dULL;

/// X_0 < X_1 < ... with X_{n+1} = X_n + ceil(X_n^exponent).
struct SequencePlan {
    std::vector<std::int64_t> X_list;
    double exponent = 0.0;
    std::vector<double> T_list;
};

inline SequencePlan build_sequence(std::int64_t X0, double exponent, std::size_t count)
{
    if (X0 < 2) throw domain_error("sequence needs X0 >= 2");
    if (!(exponent > 0 && exponent < 1)) throw domain_error("sequence exponent must lie in (0, 1)");
    if (std::pow(static_cast<double>(X0), exponent) < 1.0) throw domain_error("X0 too small: T(X0) < 1");
    SequencePlan plan;
    plan.exponent = exponent;
    std::int64_t x = X0;
    for (std::size_t n = 0; n < count; ++n) {
        const double T = std::pow(static_cast<double>(x), exponent);
        plan.X_list.push_back(x);
        plan.T_list.push_back(T);
        if (n + 1 == count) break;
        const auto step = static_cast<std::int64_t>(std::ceil(T));
        if (__builtin_add_overflow(x, step, &x)) throw domain_error("sequence overflows 64-bit integers");
    }
    return plan;
}

/// Index n of the first violation of T_n <= X_{n+1} - X_n <= 2 T_n.
inline std::optional<std::size_t> sequence_violation(const SequencePlan& plan)
{
    for (std::size_t n = 0; n + 1 < plan.X_list.size(); ++n) {
        const double gap = static_cast<double>(plan.X_list[n + 1] - plan.X_list[n]);
        if (gap < plan.T_list[n] || gap > 2.0 * plan.T_list[n]) return n;
    }
    return std::nullopt;
}

/// Index n of the first violation of X_{n+m} >= 2 X_n for m = ceil(X_n/T_n),
/// over all n whose target index lies inside the plan.
inline std::optional<std::size_t> doubling_violation(const SequencePlan& plan)
{
    for (std::size_t n = 0; n < plan.X_list.size(); ++n) {
        const auto m = static_cast<std::size_t>(std::ceil(static_cast<double>(plan.X_list[n]) / plan.T_list[n]));
        if (n + m >= plan.X_list.size()) break;
        if (plan.X_list[n + m] < 2 * plan.X_list[n]) return n;
    }
    return std::nullopt;
}

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval; z = 1.959963984540054 gives 95%.
inline WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054)
{
    if (n == 0) throw domain_error("Wilson interval needs at least one sample");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

/// Knobs shared by the sampling experiments.
struct ExperimentConfig {
    std::int64_t u = 1;
    double eps = 0.0;
    std::uint64_t starts = 64;
    /// Certified grids use T = X^certified_T_exponent.
    double certified_T_exponent = 0.5;
    SupOptions sup;
    unsigned threads = 1;
};

/// Uniform ambient tuple for sample `index`.
inline AmbientTuple draw_ambient(const IndexSplit& split, std::uint64_t seed, std::uint64_t index)
{
    rng gen(derive_seed(seed, ambient_stream, index));
    AmbientTuple a(split.ambient_indices().size());
    for (auto& v : a) v = gen.mod1();
    return a;
}

inline SupResult sample_sup(const AmbientTuple& ambient, const IndexSplit& split, std::int64_t X, double T, sup_mode mode,
                            std::uint64_t seed, std::uint64_t index, const ExperimentConfig& cfg)
{
    if (mode == sup_mode::certified) return certified_sup(ambient, split, X, T, cfg.sup);
    return heuristic_sup(ambient, split, X, cfg.starts, derive_seed(seed, starts_stream, index), cfg.sup);
}

struct MeasureEstimate {
    double T = 0.0;
    double X = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    double fraction = 0.0;
    WilsonInterval wilson;
    double lemma_bound = 0.0;
    /// fraction / lemma_bound; the bound's implied constant is unknown.
    double ratio = 0.0;
    sup_mode mode = sup_mode::heuristic;
    /// certified mode only: samples whose interval straddles T.
    std::uint64_t undecided = 0;
    std::vector<double> sups;
};

/// X^(u+t+sigma+eps) T^(-2u-t).
inline double measure_bound(const IndexSplit& split, std::int64_t u, double eps, double X, double T)
{
    const double t = static_cast<double>(split.t());
    const double a = static_cast<double>(u) + t + static_cast<double>(split.sigma()) + eps;
    const double b = 2.0 * static_cast<double>(u) + t;
    return std::exp(a * std::log(X) - b * std::log(T));
}

/// Monte Carlo estimate of the measure of ambient tuples whose supremum over
/// alpha* exceeds T. A sample counts as a hit when its supremum lower bound
/// exceeds T.
inline MeasureEstimate estimate_measure(const IndexSplit& split, std::int64_t X, double T, std::uint64_t samples,
                                        sup_mode mode, std::uint64_t seed, const ExperimentConfig& cfg = {})
{
    if (samples < 1) throw domain_error("samples must be >= 1");
    if (!(T > 0) || T > static_cast<double>(X)) throw domain_error("measure estimate needs 0 < T <= X");

    std::vector<SupResult> results(samples);
    parallel_for(samples, cfg.threads, [&](std::size_t i) {
        results[i] = sample_sup(draw_ambient(split, seed, i), split, X, T, mode, seed, i, cfg);
    });

    MeasureEstimate est;
    est.T = T;
    est.X = static_cast<double>(X);
    est.samples = samples;
    est.mode = mode;
    for (const auto& r : results) {
        est.sups.push_back(r.lower);
        if (r.lower > T)
            ++est.hits;
        else if (r.upper && *r.upper > T)
            ++est.undecided;
    }
    est.fraction = static_cast<double>(est.hits) / static_cast<double>(samples);
    est.wilson = wilson_interval(est.hits, samples);
    est.lemma_bound = measure_bound(split, cfg.u, cfg.eps, est.X, T);
    est.ratio = est.fraction / est.lemma_bound;
    return est;
}

/// Least-squares line through (log X, log S) points.
struct ScalingFit {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double residual_max = 0.0;
};

inline ScalingFit fit_exponent(std::vector<std::pair<double, double>> points)
{
    if (points.size() < 3) throw domain_error("exponent fit needs at least 3 points");
    const double n = static_cast<double>(points.size());
    double mx = 0, my = 0;
    for (auto [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw domain_error("exponent fit needs finite points");
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0)) throw domain_error("exponent fit needs distinct abscissae");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].first == points[j].first) throw domain_error("exponent fit needs distinct abscissae");

    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (auto [x, y] : points) {
        const double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
        fit.residual_max = std::max(fit.residual_max, std::fabs(r));
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    fit.points = std::move(points);
    return fit;
}

/// Fit of log S against log X for raw (X, S) pairs.
inline ScalingFit fit_power_law(const std::vector<double>& X, const std::vector<double>& S)
{
    if (X.size() != S.size()) throw domain_error("power-law fit needs matching X and S series");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < X.size(); ++i) pts.emplace_back(std::log(X[i]), std::log(S[i]));
    return fit_exponent(std::move(pts));
}

struct ScalingReport {
    std::vector<std::int64_t> X_list;
    std::vector<AmbientTuple> ambient;
    /// S[sample][i] is the supremum estimate at X_list[i].
    std::vector<std::vector<double>> S;
    std::vector<ScalingFit> fits;
    /// Fit of the max over samples of S(X).
    ScalingFit aggregate;
    std::vector<std::uint64_t> seeds;
    std::uint64_t evaluations = 0;
    sup_mode mode = sup_mode::heuristic;
};

/// Supremum estimates S(X) per ambient tuple across X_list, with a log-log
/// slope per tuple and for the pointwise maximum.
inline ScalingReport run_scaling_experiment(const IndexSplit& split, const std::vector<std::int64_t>& X_list,
                                            const std::vector<AmbientTuple>& ambient, sup_mode mode, std::uint64_t seed,
                                            const ExperimentConfig& cfg = {})
{
    if (X_list.size() < 3) throw domain_error("scaling experiment needs at least 3 values of X");
    for (std::size_t i = 1; i < X_list.size(); ++i)
        if (X_list[i] <= X_list[i - 1]) throw domain_error("X list must be strictly increasing");
    if (ambient.empty()) throw domain_error("scaling experiment needs at least one sample");

    const std::size_t samples = ambient.size();
    const std::size_t nx = X_list.size();
    std::vector<SupResult> results(samples * nx);
    parallel_for(results.size(), cfg.threads, [&](std::size_t task) {
        const std::size_t i = task / nx;
        const std::int64_t X = X_list[task % nx];
        const double T = std::min(static_cast<double>(X), std::pow(static_cast<double>(X), cfg.certified_T_exponent));
        results[task] = sample_sup(ambient[i], split, X, T, mode, seed, i, cfg);
    });

    ScalingReport report;
    report.X_list = X_list;
    report.ambient = ambient;
    report.mode = mode;
    std::vector<double> xs(X_list.begin(), X_list.end());
    std::vector<double> best(nx, 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> s(nx);
        for (std::size_t j = 0; j < nx; ++j) {
            const auto& r = results[i * nx + j];
            s[j] = r.lower;
            best[j] = std::max(best[j], r.lower);
            report.evaluations += r.evaluations;
        }
        report.fits.push_back(fit_power_law(xs, s));
        report.S.push_back(std::move(s));
        report.seeds.push_back(derive_seed(seed, starts_stream, i));
    }
    report.aggregate = fit_power_law(xs, best);
    return report;
}

inline ScalingReport run_scaling_experiment(const IndexSplit& split, const std::vector<std::int64_t>& X_list,
                                            std::uint64_t samples, sup_mode mode, std::uint64_t seed,
                                            const ExperimentConfig& cfg = {})
{
    std::vector<AmbientTuple> ambient;
    for (std::uint64_t i = 0; i < samples; ++i) ambient.push_back(draw_ambient(split, seed, i));
    return run_scaling_experiment(split, X_list, ambient, mode, seed, cfg);
}

struct Lemma21Ranges {
    std::size_t k_min = 2;
    std::size_t k_max = 6;
    std::int64_t X_max = 1000;
    /// Multiplies the perturbation box; 1 is the full box, 0 is beta = alpha.
    double box_scale = 1.0;
};

struct Lemma21Report {
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    /// smallest |f(beta)| / (T/2) seen; above 1 means no violation.
    double min_margin = INFINITY;
};

/// Randomised check of the perturbation lemma: with T in (|f(alpha)|/2,
/// |f(alpha)|) and beta drawn uniformly from the box, |f(beta)| must exceed
/// T/2.
inline Lemma21Report lemma21_trial(std::uint64_t trials, std::uint64_t seed, const Lemma21Ranges& ranges = {},
                                   unsigned threads = 1)
{
    if (trials < 1) throw domain_error("lemma21 needs trials >= 1");
    if (ranges.k_min < 2 || ranges.k_max < ranges.k_min) throw domain_error("lemma21 needs 2 <= k_min <= k_max");
    if (ranges.X_max < 1) throw domain_error("lemma21 needs X_max >= 1");
    if (ranges.box_scale < 0) throw domain_error("lemma21 needs box_scale >= 0");

    std::vector<double> margin(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        rng gen(derive_seed(seed, lemma21_stream, i));
        const auto k = static_cast<std::size_t>(gen.uniform_int(static_cast<std::int64_t>(ranges.k_min),
                                                                static_cast<std::int64_t>(ranges.k_max)));
        const std::int64_t X = gen.uniform_int(1, ranges.X_max);
        std::vector<Mod1Fixed> alpha(k);
        double f = 0.0;
        do {
            for (auto& a : alpha) a = gen.mod1();
            f = eval_fast(CoefficientVector(alpha), X).modulus;
        } while (f == 0.0);

        double c = 0.5 + 0.5 * gen.uniform();
        if (c == 0.5) c = 0.75;
        const double T = c * f;
        const auto box = perturbation_box(T, X, k);
        std::vector<Mod1Fixed> beta = alpha;
        for (std::size_t j = 0; j < k; ++j)
            beta[j] += Mod1Fixed::from_double(ranges.box_scale * box[j] * (2.0 * gen.uniform() - 1.0));
        margin[i] = eval_fast(CoefficientVector(beta), X).modulus / (0.5 * T);
    });

    Lemma21Report rep;
    rep.trials = trials;
    for (double m : margin) {
        if (!(m > 1.0)) ++rep.violations;
        rep.min_margin = std::min(rep.min_margin, m);
    }
    return rep;
}

} // namespace weylab
