#include "harness.hpp"

#include <weylab/weylab.hpp>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace weylab::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw io_error("SHA-256 failed for " + path.string());
    std::ostringstream hex;
    for (unsigned i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

ordered_json make_document(const std::string& command, const RunOutput& out)
{
    ordered_json doc;
    doc["schema"] = schema;
    doc["command"] = command;
    doc["config"] = out.config;
    doc["result"] = out.result;
    return doc;
}

void write_json(const ordered_json& doc, const fs::path& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot write " + path.string());
    f << doc.dump(2) << '\n';
    if (!f) throw io_error("write failed for " + path.string());
}

void write_csv(const CsvTable& table, const fs::path& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
        f << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
    if (!f) throw io_error("write failed for " + path.string());
}

namespace {

// Rejects non-finite values so every emitted number is finite.
double finite(double v, const char* field)
{
    if (!std::isfinite(v)) throw infeasible_error(std::string("non-finite value for ") + field);
    return v;
}

ordered_json mod1_json(Mod1Fixed v) { return v.to_decimal(); }

ordered_json mod1_list(std::span<const Mod1Fixed> values)
{
    ordered_json a = ordered_json::array();
    for (auto v : values) a.push_back(mod1_json(v));
    return a;
}

ordered_json mod1_hex_list(std::span<const Mod1Fixed> values)
{
    ordered_json a = ordered_json::array();
    for (auto v : values) a.push_back(v.to_hex());
    return a;
}

std::vector<Mod1Fixed> parse_mod1_list(const std::string& list)
{
    std::vector<Mod1Fixed> out;
    if (list.empty()) return out;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        if (comma == std::string::npos) comma = list.size();
        out.push_back(Mod1Fixed::parse(std::string_view(list).substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& list)
{
    std::vector<std::int64_t> out;
    std::istringstream in(list);
    std::string token;
    while (std::getline(in, token, ',')) {
        std::size_t used = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (token.empty() || used != token.size()) throw config_error("bad integer '" + token + "' in list '" + list + "'");
        out.push_back(v);
    }
    return out;
}

sup_mode parse_mode(const std::string& s)
{
    if (s == "certified") return sup_mode::certified;
    if (s == "heuristic") return sup_mode::heuristic;
    throw config_error("mode must be certified or heuristic, got '" + s + "'");
}

ordered_json sup_json(const SupResult& r)
{
    ordered_json j;
    j["mode"] = to_string(r.mode);
    j["lower"] = finite(r.lower, "lower");
    j["upper"] = r.upper ? ordered_json(finite(*r.upper, "upper")) : ordered_json(nullptr);
    j["argmax"] = mod1_list(r.argmax);
    j["evaluations"] = r.evaluations;
    return j;
}

ordered_json fit_json(const ScalingFit& f)
{
    ordered_json j;
    j["slope"] = finite(f.slope, "slope");
    j["intercept"] = finite(f.intercept, "intercept");
    j["r2"] = finite(f.r2, "r2");
    j["residual_max"] = finite(f.residual_max, "residual_max");
    return j;
}

std::int64_t profile_u(std::int64_t k, std::int64_t explicit_u)
{
    if (explicit_u > 0) return explicit_u;
    auto entry = default_profile().lookup(k);
    if (!entry) throw config_error("no Main Conjecture u is configured for k=" + std::to_string(k) + "; pass --u");
    return entry->u;
}

struct Common {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output;
    std::string csv;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--seed", c.seed, "Seed for every random quantity")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output", c.output, "Write the JSON document (and a manifest beside it) here");
    sub->add_option("--csv", c.csv, "Write the CSV series here");
}

struct EvalParams {
    std::size_t k = 0;
    std::string alpha;
    std::int64_t X = 0;
    std::int64_t h = 1;
    std::string method = "fast";
    unsigned precision = 128;
};

RunOutput run_eval(const EvalParams& p, const Common& c)
{
    auto coeffs = CoefficientVector::parse(p.alpha);
    if (coeffs.degree() != p.k)
        throw config_error("--alpha has " + std::to_string(coeffs.degree()) + " entries, --k is " + std::to_string(p.k));
    if (p.method != "fast" && p.method != "direct") throw config_error("--method must be fast or direct");
    if (p.h < 1) throw config_error("--h must be >= 1");
    if (p.method == "direct" && p.h != 1) coeffs = coeffs.dilated(static_cast<std::uint64_t>(p.h));

    WeylValue v = p.method == "direct" ? eval_direct(coeffs, p.X, p.precision, c.threads)
                                        : eval_dilate(coeffs, p.h, p.X, c.threads);
    RunOutput out;
    out.config = {{"k", p.k}, {"alpha", mod1_list(CoefficientVector::parse(p.alpha).values())},
                  {"alpha_hex", mod1_hex_list(CoefficientVector::parse(p.alpha).values())},
                  {"X", p.X}, {"h", p.h}, {"method", p.method}, {"precision", p.precision}, {"seed", c.seed}};
    out.result = {{"re", finite(v.re, "re")}, {"im", finite(v.im, "im")}, {"modulus", finite(v.modulus, "modulus")},
                  {"terms", v.terms}};
    out.evaluations["terms"] = v.terms;
    return out;
}

struct SupParams {
    std::size_t k = 0;
    std::string sup_indices = "1,k";
    std::string ambient;
    std::int64_t X = 0;
    double T = 0;
    std::string mode = "heuristic";
    std::uint64_t starts = 64;
    std::int64_t H = 1;
    std::uint64_t node_budget = 100'000'000;
};

RunOutput run_sup(const SupParams& p, const Common& c)
{
    const IndexSplit split = IndexSplit::parse(p.sup_indices, p.k);
    const sup_mode mode = parse_mode(p.mode);
    if (p.node_budget == 0) throw config_error("--node-budget must be positive");
    AmbientTuple ambient = p.ambient.empty() && !split.ambient_indices().empty() ? draw_ambient(split, c.seed, 0)
                                                                                 : parse_mod1_list(p.ambient);
    if (ambient.size() != split.ambient_indices().size())
        throw config_error("--ambient needs " + std::to_string(split.ambient_indices().size()) + " values");
    const double T = p.T > 0 ? p.T : static_cast<double>(p.X);

    SupOptions opts;
    opts.node_budget = p.node_budget;
    opts.threads = c.threads;
    DilateSup best = sup_over_dilates(ambient, split, p.X, p.H, mode, c.seed, T, p.starts, opts);

    RunOutput out;
    ordered_json idx = split.sup_indices();
    out.config = {{"k", p.k}, {"sup_indices", idx}, {"ambient", mod1_list(ambient)}, {"ambient_hex", mod1_hex_list(ambient)},
                  {"X", p.X}, {"T", T}, {"mode", p.mode}, {"starts", p.starts}, {"H", p.H},
                  {"node_budget", p.node_budget}, {"seed", c.seed}};
    out.result = sup_json(best.result);
    out.result["h"] = best.h;
    out.evaluations["weyl_sums"] = best.result.evaluations;
    out.seeds.push_back(c.seed);
    return out;
}

struct MvtParams {
    std::int64_t s = 0;
    std::int64_t k = 0;
    std::int64_t X = 0;
    std::string method = "meet";
    double memory_budget = default_memory_budget;
    double eps = 0.0;
};

RunOutput run_mvt(const MvtParams& p, const Common& c)
{
    if (!(p.memory_budget > 0)) throw config_error("--memory-budget must be positive");
    VinogradovCount count;
    if (p.method == "brute")
        count = count_bruteforce(p.s, p.k, p.X);
    else if (p.method == "meet" || p.method == "meet-middle")
        count = count_meet_middle(p.s, p.k, p.X, p.memory_budget, c.threads);
    else
        throw config_error("--method must be brute or meet");

    BigInt classical = 1;
    for (std::int64_t i = 2; i <= p.s; ++i) classical *= i;
    for (std::int64_t i = 0; i < p.s; ++i) classical *= p.X;
    const double bound = mvt_bound(p.s, p.k, static_cast<double>(p.X), p.eps);

    RunOutput out;
    out.config = {{"s", p.s}, {"k", p.k}, {"X", p.X}, {"method", to_string(count.method)}, {"eps", p.eps},
                  {"memory_budget", p.memory_budget}, {"seed", c.seed}};
    out.result = {{"J", count.J.str()},
                  {"method", to_string(count.method)},
                  {"mvt_bound", finite(bound, "mvt_bound")},
                  {"ratio_to_bound", finite(to_double(count.J) / bound, "ratio_to_bound")},
                  {"ratio_to_s_factorial_X_s", finite(boost::multiprecision::cpp_rational(count.J, classical).convert_to<double>(), "ratio")}};
    out.evaluations["tuples"] = p.method == "brute" ? std::pow(static_cast<double>(p.X), static_cast<double>(p.s))
                                                    : multiset_count(p.s, p.X);
    return out;
}

struct EquidistParams {
    std::size_t k = 0;
    std::string alpha;
    std::int64_t N = 0;
    double a = 0.0;
    double b = 1.0;
    std::int64_t H = 0;
    std::string sup_indices = "k";
    std::int64_t u = 0;
    double tau = 0.05;
};

RunOutput run_equidist(const EquidistParams& p, const Common& c)
{
    const auto coeffs = CoefficientVector::parse(p.alpha);
    if (coeffs.degree() != p.k)
        throw config_error("--alpha has " + std::to_string(coeffs.degree()) + " entries, --k is " + std::to_string(p.k));
    const IntervalMod1 interval(p.a, p.b);

    std::int64_t H = p.H;
    ordered_json nu_json = nullptr;
    if (H <= 0) {
        const IndexSplit split = IndexSplit::parse(p.sup_indices, p.k);
        const std::int64_t u = profile_u(static_cast<std::int64_t>(p.k), p.u);
        const Rational nu = nu_exponent(split, u);
        nu_json = to_string(nu);
        H = choose_H(static_cast<double>(p.N), to_double(nu), p.tau);
    }

    const auto z = count_Z(coeffs, p.N, interval);
    const double et = erdos_turan_bound(coeffs, p.N, H, c.threads);
    const auto mf = min_fractional(coeffs, p.N);
    const double dstar = star_discrepancy(coeffs, p.N);

    RunOutput out;
    out.config = {{"k", p.k}, {"alpha", mod1_list(coeffs.values())}, {"alpha_hex", mod1_hex_list(coeffs.values())},
                  {"N", p.N}, {"a", p.a}, {"b", p.b}, {"H", H}, {"nu", nu_json}, {"tau", p.tau}, {"seed", c.seed}};
    out.result = {{"Z", z.Z},
                  {"expected", finite(z.expected, "expected")},
                  {"deviation", finite(z.deviation, "deviation")},
                  {"star_discrepancy", finite(dstar, "star_discrepancy")},
                  {"erdos_turan_bound", finite(et, "erdos_turan_bound")},
                  {"H", H},
                  {"min_fractional", {{"n", mf.n}, {"value", finite(mf.value, "min_fractional")}}}};
    out.evaluations["phases"] = 3 * p.N;
    out.evaluations["dilate_sums"] = H;
    return out;
}

struct ScalingParams {
    std::size_t k = 5;
    std::string sup_indices = "1,k";
    std::string X_list = "256,512,1024,2048,4096,8192";
    std::uint64_t samples = 8;
    std::uint64_t starts = 64;
    std::string mode = "heuristic";
    std::int64_t u = 0;
    double tau = 0.05;
    double eps = 0.0;
};

RunOutput run_scaling(const ScalingParams& p, const Common& c)
{
    const IndexSplit split = IndexSplit::parse(p.sup_indices, p.k);
    const auto X_list = parse_int_list(p.X_list);
    const sup_mode mode = parse_mode(p.mode);
    if (p.samples == 0 || p.starts == 0) throw config_error("--samples and --starts must be positive");

    ExperimentConfig cfg;
    cfg.starts = p.starts;
    cfg.threads = c.threads;
    cfg.eps = p.eps;
    const ScalingReport rep = run_scaling_experiment(split, X_list, p.samples, mode, c.seed, cfg);

    RunOutput out;
    ordered_json idx = split.sup_indices();
    out.config = {{"k", p.k}, {"sup_indices", idx}, {"X_list", X_list}, {"samples", p.samples},
                  {"starts", p.starts}, {"mode", p.mode}, {"tau", p.tau}, {"eps", p.eps}, {"seed", c.seed}};

    ordered_json fits = ordered_json::array();
    for (std::size_t i = 0; i < rep.fits.size(); ++i) {
        ordered_json f = fit_json(rep.fits[i]);
        f["sample"] = i;
        f["ambient"] = mod1_list(rep.ambient[i]);
        fits.push_back(std::move(f));
    }
    out.result["mode"] = to_string(mode);
    out.result["fits"] = std::move(fits);
    out.result["aggregate"] = fit_json(rep.aggregate);

    const auto u = p.u > 0 ? std::optional<std::int64_t>(p.u)
                           : (default_profile().lookup(static_cast<std::int64_t>(p.k))
                                  ? std::optional<std::int64_t>(default_profile().lookup(static_cast<std::int64_t>(p.k))->u)
                                  : std::nullopt);
    if (u) {
        const Rational delta = delta_exponent(split, *u);
        out.result["u"] = *u;
        out.result["delta"] = to_string(delta);
        out.result["predicted_exponent"] = 0.5 + to_double(delta) + p.eps;
    } else {
        out.result["u"] = nullptr;
    }

    out.csv.header = {"sample", "X", "S", "logX", "logS"};
    for (std::size_t i = 0; i < rep.S.size(); ++i)
        for (std::size_t j = 0; j < X_list.size(); ++j) {
            const double X = static_cast<double>(X_list[j]);
            const double S = rep.S[i][j];
            out.csv.rows.push_back({std::to_string(i), std::to_string(X_list[j]), format_number(S),
                                    format_number(std::log(X)), format_number(std::log(S))});
        }
    out.evaluations["weyl_sums"] = rep.evaluations;
    out.seeds = rep.seeds;
    return out;
}

struct MeasureParams {
    std::size_t k = 3;
    std::string sup_indices = "k";
    std::int64_t X = 0;
    double T = 0;
    std::uint64_t samples = 64;
    std::uint64_t starts = 16;
    std::string mode = "heuristic";
    std::int64_t u = 0;
    double eps = 0.0;
};

RunOutput run_measure(const MeasureParams& p, const Common& c)
{
    const IndexSplit split = IndexSplit::parse(p.sup_indices, p.k);
    const sup_mode mode = parse_mode(p.mode);
    ExperimentConfig cfg;
    cfg.u = profile_u(static_cast<std::int64_t>(p.k), p.u);
    cfg.eps = p.eps;
    cfg.starts = p.starts;
    cfg.threads = c.threads;
    const double T = p.T > 0 ? p.T : std::sqrt(static_cast<double>(p.X));
    const MeasureEstimate est = estimate_measure(split, p.X, T, p.samples, mode, c.seed, cfg);

    RunOutput out;
    ordered_json idx = split.sup_indices();
    out.config = {{"k", p.k}, {"sup_indices", idx}, {"X", p.X}, {"T", T}, {"samples", p.samples},
                  {"starts", p.starts}, {"mode", p.mode}, {"u", cfg.u}, {"eps", p.eps}, {"seed", c.seed}};
    out.result = {{"mode", to_string(mode)},
                  {"samples", est.samples},
                  {"hits", est.hits},
                  {"undecided", est.undecided},
                  {"fraction", est.fraction},
                  {"wilson_lo", est.wilson.lo},
                  {"wilson_hi", est.wilson.hi},
                  {"log10_lemma_bound", finite(std::log10(est.lemma_bound), "lemma_bound")},
                  {"ratio", finite(est.ratio, "ratio")}};
    out.csv.header = {"sample", "sup"};
    for (std::size_t i = 0; i < est.sups.size(); ++i) out.csv.rows.push_back({std::to_string(i), format_number(est.sups[i])});
    for (std::uint64_t i = 0; i < p.samples; ++i) out.seeds.push_back(derive_seed(c.seed, starts_stream, i));
    out.evaluations["samples"] = p.samples;
    return out;
}

struct Lemma21Params {
    std::uint64_t trials = 10000;
    std::size_t k_min = 2;
    std::size_t k_max = 6;
    std::int64_t X_max = 1000;
    double box_scale = 1.0;
};

RunOutput run_lemma21(const Lemma21Params& p, const Common& c)
{
    Lemma21Ranges ranges{p.k_min, p.k_max, p.X_max, p.box_scale};
    const Lemma21Report rep = lemma21_trial(p.trials, c.seed, ranges, c.threads);
    RunOutput out;
    out.config = {{"trials", p.trials}, {"k_min", p.k_min}, {"k_max", p.k_max}, {"X_max", p.X_max},
                  {"box_scale", p.box_scale}, {"seed", c.seed}};
    out.result = {{"trials", rep.trials}, {"violations", rep.violations}, {"min_margin", finite(rep.min_margin, "min_margin")}};
    out.evaluations["weyl_sums"] = 2 * p.trials;
    out.seeds.push_back(c.seed);
    return out;
}

std::string env_or(const char* name, const std::string& fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

ordered_json error_document(const std::string& code, int exit, const std::string& message)
{
    ordered_json e;
    e["schema"] = schema;
    e["error"] = {{"code", code}, {"exit", exit}, {"message", message}};
    return e;
}

void emit(const std::string& command, const RunOutput& run, const Common& c, double wall_seconds, std::ostream& out)
{
    const ordered_json doc = make_document(command, run);
    out << doc.dump(2) << '\n';

    fs::path json_path = c.output;
    const std::string dir = env_or("WEYLAB_OUTPUT_DIR", "");
    if (json_path.empty() && !dir.empty()) json_path = fs::path(dir) / (command + ".json");
    fs::path csv_path = c.csv;
    if (csv_path.empty() && !dir.empty() && !run.csv.header.empty()) csv_path = fs::path(dir) / (command + ".csv");
    if (json_path.empty() && csv_path.empty()) return;

    std::error_code ec;
    for (const auto& p : {json_path, csv_path})
        if (!p.empty() && p.has_parent_path()) {
            fs::create_directories(p.parent_path(), ec);
            if (ec) throw io_error("cannot create directory " + p.parent_path().string() + ": " + ec.message());
        }

    ordered_json outputs = ordered_json::array();
    if (!json_path.empty()) {
        write_json(doc, json_path);
        outputs.push_back({{"path", json_path.filename().string()}, {"sha256", sha256_file(json_path)}});
    }
    if (!csv_path.empty()) {
        write_csv(run.csv, csv_path);
        outputs.push_back({{"path", csv_path.filename().string()}, {"sha256", sha256_file(csv_path)}});
    }

    const fs::path anchor = json_path.empty() ? csv_path : json_path;
    ordered_json manifest;
    manifest["schema"] = schema;
    manifest["tool_version"] = tool_version;
    manifest["command"] = command;
    manifest["config"] = run.config;
    manifest["threads"] = c.threads;
    manifest["wall_time_seconds"] = wall_seconds;
    manifest["created_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    manifest["evaluations"] = run.evaluations;
    manifest["seeds"] = run.seeds;
    manifest["outputs"] = outputs;
    fs::path manifest_path = anchor;
    manifest_path += ".manifest.json";
    write_json(manifest, manifest_path);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"weylab: numerical laboratory for perturbed Weyl sums", "weylab"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file; options go under a [<subcommand>] section");

    unsigned default_threads_value = default_threads();
    try {
        default_threads_value = static_cast<unsigned>(std::stoul(env_or("WEYLAB_THREADS", std::to_string(default_threads_value))));
    } catch (const std::exception&) {
        err << error_document("config", config_failure, "WEYLAB_THREADS is not a number").dump() << '\n';
        return config_failure;
    }
    if (default_threads_value == 0) default_threads_value = 1;

    Common common;
    common.threads = default_threads_value;

    EvalParams eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate f_k(alpha; X)");
    eval_cmd->add_option("--k", eval.k, "Degree")->required();
    eval_cmd->add_option("--alpha", eval.alpha, "Comma separated coefficients (decimal or p/q)")->required();
    eval_cmd->add_option("--X", eval.X, "Number of terms")->required();
    eval_cmd->add_option("--h", eval.h, "Dilation factor")->capture_default_str();
    eval_cmd->add_option("--method", eval.method, "fast or direct")->capture_default_str();
    eval_cmd->add_option("--precision", eval.precision, "Phase bits for the direct method")->capture_default_str();
    add_common(eval_cmd, common);

    SupParams sup;
    auto* sup_cmd = app.add_subcommand("sup", "Supremum over selected coefficients");
    sup_cmd->add_option("--k", sup.k, "Degree")->required();
    sup_cmd->add_option("--sup-indices", sup.sup_indices, "Indices i_1<...<i_t, 'k' allowed")->capture_default_str();
    sup_cmd->add_option("--ambient", sup.ambient, "Ambient coefficients in index order (drawn from the seed if absent)");
    sup_cmd->add_option("--X", sup.X, "Number of terms")->required();
    sup_cmd->add_option("--T", sup.T, "Grid threshold for certified mode (default X)");
    sup_cmd->add_option("--mode", sup.mode, "certified or heuristic")->capture_default_str();
    sup_cmd->add_option("--starts", sup.starts, "Multi-start count")->capture_default_str();
    sup_cmd->add_option("--H", sup.H, "Maximum dilation")->capture_default_str();
    sup_cmd->add_option("--node-budget", sup.node_budget, "Certified grid node limit")->capture_default_str();
    add_common(sup_cmd, common);

    MvtParams mvt;
    auto* mvt_cmd = app.add_subcommand("mvt", "Exact Vinogradov mean value J_{s,k}(X)");
    mvt_cmd->add_option("--s", mvt.s, "Number of variable pairs")->required();
    mvt_cmd->add_option("--k", mvt.k, "Degree")->required();
    mvt_cmd->add_option("--X", mvt.X, "Variable range")->required();
    mvt_cmd->add_option("--method", mvt.method, "brute or meet")->capture_default_str();
    mvt_cmd->add_option("--memory-budget", mvt.memory_budget, "Table size limit in bytes");
    mvt_cmd->add_option("--eps", mvt.eps, "Epsilon in the comparison bound")->capture_default_str();
    add_common(mvt_cmd, common);

    EquidistParams eq;
    auto* eq_cmd = app.add_subcommand("equidist", "Interval counts, discrepancy, Erdos-Turan bound, small fractional parts");
    eq_cmd->add_option("--k", eq.k, "Degree")->required();
    eq_cmd->add_option("--alpha", eq.alpha, "Comma separated coefficients")->required();
    eq_cmd->add_option("--N", eq.N, "Sequence length")->required();
    eq_cmd->add_option("--a", eq.a, "Interval start")->capture_default_str();
    eq_cmd->add_option("--b", eq.b, "Interval end")->capture_default_str();
    eq_cmd->add_option("--H", eq.H, "Erdos-Turan truncation (default from nu and tau)");
    eq_cmd->add_option("--sup-indices", eq.sup_indices, "Split used for nu when H is derived")->capture_default_str();
    eq_cmd->add_option("--u", eq.u, "Main Conjecture u (default from the profile)");
    eq_cmd->add_option("--tau", eq.tau, "tau in H = X^(1/2 - nu - 2 tau)")->capture_default_str();
    add_common(eq_cmd, common);

    ScalingParams sc;
    auto* sc_cmd = app.add_subcommand("scaling", "Log-log exponent fits of the supremum");
    sc_cmd->add_option("--k", sc.k, "Degree")->capture_default_str();
    sc_cmd->add_option("--sup-indices", sc.sup_indices, "Supremum indices")->capture_default_str();
    sc_cmd->add_option("--X-list", sc.X_list, "Comma separated increasing X values")->capture_default_str();
    sc_cmd->add_option("--samples", sc.samples, "Ambient samples")->capture_default_str();
    sc_cmd->add_option("--starts", sc.starts, "Multi-start count")->capture_default_str();
    sc_cmd->add_option("--mode", sc.mode, "certified or heuristic")->capture_default_str();
    sc_cmd->add_option("--u", sc.u, "Main Conjecture u (default from the profile)");
    sc_cmd->add_option("--tau", sc.tau, "tau")->capture_default_str();
    sc_cmd->add_option("--eps", sc.eps, "eps")->capture_default_str();
    add_common(sc_cmd, common);

    MeasureParams ms;
    auto* ms_cmd = app.add_subcommand("measure", "Monte Carlo measure of the large-supremum set");
    ms_cmd->add_option("--k", ms.k, "Degree")->capture_default_str();
    ms_cmd->add_option("--sup-indices", ms.sup_indices, "Supremum indices")->capture_default_str();
    ms_cmd->add_option("--X", ms.X, "Number of terms")->required();
    ms_cmd->add_option("--T", ms.T, "Threshold (default sqrt X)");
    ms_cmd->add_option("--samples", ms.samples, "Ambient samples")->capture_default_str();
    ms_cmd->add_option("--starts", ms.starts, "Multi-start count")->capture_default_str();
    ms_cmd->add_option("--mode", ms.mode, "certified or heuristic")->capture_default_str();
    ms_cmd->add_option("--u", ms.u, "Main Conjecture u (default from the profile)");
    ms_cmd->add_option("--eps", ms.eps, "eps")->capture_default_str();
    add_common(ms_cmd, common);

    Lemma21Params lm;
    auto* lm_cmd = app.add_subcommand("lemma21", "Randomised perturbation-stability trials");
    lm_cmd->add_option("--trials", lm.trials, "Number of trials")->capture_default_str();
    lm_cmd->add_option("--k-min", lm.k_min, "Smallest degree")->capture_default_str();
    lm_cmd->add_option("--k-max", lm.k_max, "Largest degree")->capture_default_str();
    lm_cmd->add_option("--X-max", lm.X_max, "Largest X")->capture_default_str();
    lm_cmd->add_option("--box-scale", lm.box_scale, "Scale of the perturbation box")->capture_default_str();
    add_common(lm_cmd, common);

    try {
        // --config belongs to the top level; accept it anywhere on the line.
        std::vector<std::string> ordered;
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                ordered.push_back(args[i]);
                ordered.push_back(args[++i]);
            } else if (args[i].rfind("--config=", 0) == 0) {
                ordered.push_back(args[i]);
            } else {
                rest.push_back(args[i]);
            }
        }
        ordered.insert(ordered.end(), rest.begin(), rest.end());
        std::vector<std::string> reversed(ordered.rbegin(), ordered.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << error_document("config", config_failure, e.what()).dump() << '\n';
        return config_failure;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        RunOutput result;
        if (command == "eval")
            result = run_eval(eval, common);
        else if (command == "sup")
            result = run_sup(sup, common);
        else if (command == "mvt")
            result = run_mvt(mvt, common);
        else if (command == "equidist")
            result = run_equidist(eq, common);
        else if (command == "scaling")
            result = run_scaling(sc, common);
        else if (command == "measure")
            result = run_measure(ms, common);
        else
            result = run_lemma21(lm, common);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(command, result, common, wall, out);
    } catch (const weylab::error& e) {
        int code = config_failure;
        if (e.kind() == error_kind::infeasible || e.kind() == error_kind::budget) code = infeasible_failure;
        if (e.kind() == error_kind::io) code = io_failure;
        err << error_document(to_string(e.kind()), code, e.what()).dump() << '\n';
        return code;
    } catch (const std::exception& e) {
        err << error_document("config", config_failure, e.what()).dump() << '\n';
        return config_failure;
    }
    return ok;
}

} // namespace weylab::cli
