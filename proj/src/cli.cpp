#include "rangecap/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "rangecap/capacity.hpp"
#include "rangecap/equilibrium.hpp"
#include "rangecap/errors.hpp"
#include "rangecap/experiments.hpp"
#include "rangecap/green.hpp"
#include "rangecap/json_io.hpp"
#include "rangecap/parallel.hpp"
#include "rangecap/rng.hpp"
#include "rangecap/walk.hpp"
#include "rangecap/word_metric.hpp"

namespace rangecap {

namespace {

std::uint64_t parse_u64(std::string_view s)
{
    std::size_t used = 0;
    const std::string str(s);
    std::uint64_t v = 0;
    try {
        if (!str.empty() && str.front() == '-') {
            throw std::invalid_argument("negative");
        }
        v = std::stoull(str, &used, 10);
    } catch (const std::exception&) {
        throw ValidationError("not a non-negative integer: \"" + str + "\"");
    }
    if (used != str.size()) {
        throw ValidationError("not a non-negative integer: \"" + str + "\"");
    }
    return v;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(std::string_view text)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        std::string part = trim(text.substr(start, end - start));
        if (!part.empty()) {
            parts.push_back(std::move(part));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return parts;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text)
{
    std::vector<std::uint64_t> out;
    for (const auto& part : split_commas(text)) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_u64(part));
            continue;
        }
        const std::uint64_t lo = parse_u64(trim(std::string_view(part).substr(0, dots)));
        const std::uint64_t hi = parse_u64(trim(std::string_view(part).substr(dots + 2)));
        if (hi < lo || hi - lo > 10'000'000) {
            throw ValidationError("bad seed range \"" + part + "\"");
        }
        for (std::uint64_t s = lo; s <= hi; ++s) {
            out.push_back(s);
        }
    }
    if (out.empty()) {
        throw ValidationError("empty seed list");
    }
    return out;
}

std::vector<std::uint64_t> parse_grid(std::string_view text)
{
    std::vector<std::uint64_t> out;
    for (const auto& part : split_commas(text)) {
        out.push_back(parse_u64(part));
    }
    if (out.empty()) {
        throw ValidationError("empty grid");
    }
    return out;
}

namespace {

struct Flags {
    std::optional<std::string> group;
    std::optional<std::string> config;
    std::optional<std::size_t> n;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> horizon;
    std::optional<int> radius;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> seeds;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;
    std::string format = "json";
    bool assert_mode = false;
    std::optional<int> rmax;
    std::optional<std::size_t> reps;
    std::optional<std::string> grid;
    std::optional<std::string> levels;
    std::optional<std::string> radii;
    std::optional<std::string> method;
    std::optional<double> horizon_factor;
    std::optional<std::size_t> green_horizon;
    std::optional<std::string> target;
    std::optional<double> prune;
    std::optional<std::string> statistic;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Outcome {
    Json result;
    std::vector<Check> checks;
    std::vector<CsvRow> csv;
};

std::string experiment_id(const std::string& sub, const Flags& f, const std::optional<ExperimentConfig>& file)
{
    if (sub == "fit") {
        if (f.statistic) {
            if (*f.statistic == "capacity") {
                return "exponent-fit";
            }
            if (*f.statistic == "pair-green") {
                return "pair-green-sum";
            }
            throw ValidationError("--statistic must be capacity or pair-green");
        }
        return file && file->experiment == "pair-green-sum" ? "pair-green-sum" : "exponent-fit";
    }
    if (sub == "sandwich") {
        return "dyadic-sandwich";
    }
    if (sub == "decay") {
        return "kernel-decay";
    }
    return sub;
}

template <class T>
void set_param(Json& params, const char* key, const std::optional<T>& flag, T fallback)
{
    if (flag) {
        params[key] = *flag;
    } else if (!params.contains(key)) {
        params[key] = fallback;
    }
}

Json numbers_json(const std::vector<std::uint64_t>& v)
{
    Json out = Json::array();
    for (auto x : v) {
        out.push_back(x);
    }
    return out;
}

std::vector<std::uint64_t> default_seeds(std::size_t count)
{
    std::vector<std::uint64_t> s(count);
    for (std::size_t i = 0; i < count; ++i) {
        s[i] = i + 1;
    }
    return s;
}

/// Merge config file, flags and per-command defaults into one resolved config.
ExperimentConfig resolve(const std::string& sub, const Flags& f)
{
    std::optional<ExperimentConfig> file;
    if (f.config) {
        std::ifstream in{std::filesystem::path(*f.config)};
        if (!in) {
            throw ValidationError("cannot read config file " + *f.config);
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        file = experiment_config_from_json(parse_json_text(buffer.str(), *f.config));
    }
    ExperimentConfig c = file ? *file : ExperimentConfig{};
    c.experiment = experiment_id(sub, f, file);
    if (file && file->experiment != c.experiment) {
        throw ValidationError("config file is for experiment \"" + file->experiment + "\", not \"" + c.experiment +
                              "\"");
    }
    if (f.group) {
        c.group = group_to_json(load_group(*f.group));
    }
    if (c.group.is_null()) {
        throw ValidationError("--group is required");
    }
    const Group group = group_from_json(c.group);
    c.group = group_to_json(group);

    if (f.method && c.experiment != "green") {
        c.estimator.method = parse_capacity_method(*f.method);
    }
    if (f.horizon_factor) {
        if (!(*f.horizon_factor > 0.0)) {
            throw ValidationError("--horizon-factor must be positive");
        }
        c.estimator.horizon_factor = *f.horizon_factor;
    }
    if (f.trials && c.experiment != "exit-tail" && c.experiment != "green") {
        if (*f.trials == 0) {
            throw ValidationError("--trials must be positive");
        }
        c.estimator.trials = *f.trials;
    }
    if (f.grid) {
        c.grid = parse_grid(*f.grid);
    }
    if (f.seeds) {
        c.seeds = parse_seed_list(*f.seeds);
    }
    Json& p = c.params;
    const bool lattice = group.backend() == Backend::IntegerLattice;
    const std::string& id = c.experiment;
    if (id == "walk") {
        set_param<std::size_t>(p, "n", f.n, 100);
        set_param<std::uint64_t>(p, "seed", f.seed, 1);
    } else if (id == "growth") {
        set_param<int>(p, "rmax", f.rmax, 10);
    } else if (id == "kernel") {
        set_param<std::size_t>(p, "n", f.n, 8);
        set_param<double>(p, "prune_eps", f.prune, 0.0);
    } else if (id == "green") {
        set_param<std::size_t>(p, "n", f.n, 400);
        set_param<std::string>(p, "green_method", f.method, "truncated-kernel");
        set_param<std::size_t>(p, "horizon", f.horizon, p.at("n").get<std::size_t>());
        set_param<std::size_t>(p, "trials", f.trials, 1000);
        set_param<std::uint64_t>(p, "seed", f.seed, 1);
        if (f.target) {
            p["target"] = element_to_json(element_from_json(parse_json_text(*f.target, "--target")));
        } else if (!p.contains("target")) {
            p["target"] = element_to_json(group.identity());
        }
        c.estimator = CapacityConfig{};
    } else if (id == "capacity") {
        set_param<std::size_t>(p, "n", f.n, 1000);
        set_param<std::uint64_t>(p, "seed", f.seed, 1);
        const auto n = p.at("n").get<std::size_t>();
        if (f.horizon) {
            p["horizon"] = *f.horizon;
        } else if (!p.contains("horizon")) {
            p["horizon"] = static_cast<std::size_t>(std::ceil(c.estimator.horizon_factor * static_cast<double>(n)));
        }
        set_param<int>(p, "radius", f.radius, static_cast<int>(n) + 1);
        set_param<std::size_t>(p, "green_horizon", f.green_horizon, 800);
    } else if (id == "slln" || id == "exponent-fit" || id == "pair-green-sum") {
        if (c.grid.empty()) {
            c.grid = id == "slln" ? std::vector<std::uint64_t>{256, 512, 1024, 2048}
                                  : std::vector<std::uint64_t>{128, 256, 512, 1024, 2048, 4096};
        }
        if (c.seeds.empty()) {
            c.seeds = default_seeds(20);
        }
        set_param<std::size_t>(p, "green_horizon", f.green_horizon, 800);
    } else if (id == "clt") {
        set_param<std::size_t>(p, "n", f.n, 1024);
        set_param<std::size_t>(p, "replications", f.reps, 300);
        set_param<std::uint64_t>(p, "seed", f.seed, 1);
        set_param<std::size_t>(p, "green_horizon", f.green_horizon, 800);
    } else if (id == "dyadic-sandwich") {
        set_param<std::size_t>(p, "n", f.n, 512);
        if (f.levels) {
            p["levels"] = numbers_json(parse_grid(*f.levels));
        } else if (!p.contains("levels")) {
            p["levels"] = Json::array({1, 2, 3});
        }
        if (c.seeds.empty()) {
            c.seeds = default_seeds(100);
        }
        set_param<std::size_t>(p, "green_horizon", f.green_horizon, 800);
    } else if (id == "kernel-decay") {
        if (c.grid.empty()) {
            c.grid = lattice ? std::vector<std::uint64_t>{4, 8, 16, 32, 64}
                             : std::vector<std::uint64_t>{2, 3, 4, 5, 6, 7, 8, 9, 10};
        }
    } else if (id == "exit-tail") {
        set_param<std::size_t>(p, "n", f.n, 400);
        set_param<std::size_t>(p, "trials", f.trials, 10000);
        set_param<std::uint64_t>(p, "seed", f.seed, 1);
        if (f.radii) {
            p["radii"] = numbers_json(parse_grid(*f.radii));
        } else if (!p.contains("radii")) {
            p["radii"] = Json::array({20, 30, 40, 50});
        }
    } else {
        throw ValidationError("unknown experiment \"" + id + "\"");
    }
    return c;
}

template <class T>
T param(const ExperimentConfig& c, const char* key)
{
    try {
        return c.params.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("parameter \"") + key + "\": " + e.what());
    }
}

std::vector<std::size_t> as_sizes(const std::vector<std::uint64_t>& v)
{
    return {v.begin(), v.end()};
}

std::unique_ptr<GreenSource> green_for(const Group& group, const ExperimentConfig& c)
{
    return default_green_source(group, param<std::size_t>(c, "green_horizon"));
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(6) << v;
    return s.str();
}

Check range_check(const std::string& name, double v, double lo, double hi, bool hi_open = false)
{
    const bool ok = v >= lo && (hi_open ? v < hi : v <= hi);
    return {name, ok, fmt(v) + " in [" + fmt(lo) + ", " + fmt(hi) + (hi_open ? ")" : "]")};
}

Outcome run_walk(const Group& group, const ExperimentConfig& c)
{
    const WalkPath path = replicate_path(group, param<std::size_t>(c, "n"), param<std::uint64_t>(c, "seed"), 0);
    Outcome o;
    o.result = to_json(path);
    o.result["range_sizes"] = range_sizes(path);
    for (std::size_t k = 0; k < path.positions.size(); ++k) {
        o.csv.push_back({static_cast<double>(k), std::to_string(path.seed), "range_size",
                         static_cast<double>(range_of(path, 0, k).size())});
    }
    return o;
}

Outcome run_growth(const Group& group, const ExperimentConfig& c)
{
    const GrowthProfile g = growth_profile(group, param<int>(c, "rmax"));
    Outcome o;
    o.result = to_json(g);
    o.csv = csv_rows(g);
    switch (group.backend()) {
    case Backend::IntegerLattice:
        if (group.is_standard_lattice()) {
            o.checks.push_back(range_check("fitted index near dimension", g.fitted_index, group.dim() - 0.4,
                                           group.dim() + 0.4));
        }
        break;
    case Backend::Heisenberg:
        o.checks.push_back(range_check("fitted index near 4", g.fitted_index, 3.4, 4.6));
        break;
    case Backend::FreeProductZ2:
        if (group.arity() >= 3) {
            o.checks.push_back({"superpolynomial flag", g.superpolynomial, g.superpolynomial ? "set" : "not set"});
        }
        break;
    }
    return o;
}

Outcome run_kernel(const Group& group, const ExperimentConfig& c)
{
    const KernelTable k = exact_kernel(group, param<std::size_t>(c, "n"), param<double>(c, "prune_eps"));
    Outcome o;
    o.result = to_json(k);
    for (std::size_t i = 0; i < k.distributions.size(); ++i) {
        o.csv.push_back({static_cast<double>(i), "", "return_probability", k.probability(i, group.identity())});
    }
    return o;
}

Outcome run_green(const Group& group, const ExperimentConfig& c)
{
    const GroupElement target = element_from_json(c.params.at("target"));
    if (!group.is_element(target)) {
        throw ValidationError("target is not an element of the group");
    }
    const auto method = param<std::string>(c, "green_method");
    GreenEstimate est;
    if (method == "truncated-kernel") {
        est = green_truncated(group, target, param<std::size_t>(c, "n"));
    } else if (method == "monte-carlo") {
        est = green_mc(group, target, param<std::size_t>(c, "horizon"), param<std::size_t>(c, "trials"),
                       param<std::uint64_t>(c, "seed"));
    } else if (method == "lattice-integral") {
        if (!group.is_standard_lattice()) {
            throw ValidationError("lattice-integral needs a standard lattice");
        }
        const LatticeGreen lg(group.dim());
        est.target = target;
        est.method = GreenMethod::LatticeIntegral;
        est.value = lg(target);
    } else {
        throw ValidationError("unknown Green method \"" + method + "\"");
    }
    Outcome o;
    o.result = to_json(est);
    o.csv.push_back({static_cast<double>(est.horizon), "", "green", est.value});
    return o;
}

Outcome run_capacity(const Group& group, const ExperimentConfig& c, unsigned threads)
{
    const auto n = param<std::size_t>(c, "n");
    const auto seed = param<std::uint64_t>(c, "seed");
    const WalkPath path = replicate_path(group, n, seed, 0);
    const RangeSet range = range_of(path, 0, n);
    const std::uint64_t escape_seed = replicate_escape_seed(seed, 0);
    CapacityEstimate est;
    switch (c.estimator.method) {
    case CapacityMethod::EscapeMc:
    case CapacityMethod::JainOreyRange:
        est = capacity_mc(group, range.members, param<std::size_t>(c, "horizon"), c.estimator.trials, escape_seed,
                          threads);
        est.method = c.estimator.method;
        break;
    case CapacityMethod::GreenSolve:
        est = capacity_green_solve(group, range.members, *green_for(group, c));
        break;
    case CapacityMethod::HarmonicBracket: {
        BracketOptions opts;
        std::unique_ptr<GreenSource> exact;
        if (group.is_standard_lattice() && group.dim() >= 3) {
            exact = std::make_unique<LatticeGreen>(group.dim());
            opts.green = exact.get();
        }
        est = capacity_bracket(group, range.members, param<int>(c, "radius"), opts);
        break;
    }
    case CapacityMethod::VariationalLower:
        est = equilibrium_measure(group, range.members, *green_for(group, c)).estimate;
        break;
    }
    Outcome o;
    o.result = to_json(est);
    o.result["n"] = n;
    o.result["range_size"] = range.size();
    o.csv.push_back({static_cast<double>(n), std::to_string(seed), "capacity", est.point});
    o.csv.push_back({static_cast<double>(n), std::to_string(seed), "capacity_stderr", est.stderr});
    return o;
}

const GreenSource* series_green(const ExperimentConfig& c, const Group& group, std::unique_ptr<GreenSource>& holder)
{
    if (c.estimator.method != CapacityMethod::GreenSolve) {
        return nullptr;
    }
    holder = green_for(group, c);
    return holder.get();
}

Outcome run_series(const Group& group, const ExperimentConfig& c, unsigned threads)
{
    std::unique_ptr<GreenSource> holder;
    const GreenSource* green = series_green(c, group, holder);
    const auto grid = as_sizes(c.grid);
    const CapacitySeriesReport r = c.experiment == "slln"
                                       ? slln_experiment(group, grid, c.seeds, c.estimator, green, threads)
                                       : exponent_fit(group, grid, c.seeds, c.estimator, green, threads);
    Outcome o;
    o.result = to_json(r);
    o.csv = csv_rows(r);
    const bool lattice = group.backend() == Backend::IntegerLattice;
    const int d = lattice ? group.dim() : (group.backend() == Backend::Heisenberg ? 4 : 0);
    if (c.experiment == "slln") {
        if (d >= 5) {
            o.checks.push_back({"mu_hat positive", r.mu_hat > 0.0, fmt(r.mu_hat)});
            o.checks.push_back(range_check("top octave relative change", std::abs(r.top_octave_relative_change), 0.0,
                                           0.15, true));
        } else if (d == 3 || d == 4) {
            o.checks.push_back({"C_n/n strictly decreasing", r.ratio_strictly_decreasing,
                                r.ratio_strictly_decreasing ? "yes" : "no"});
        } else if (d >= 1) {
            o.checks.push_back(range_check("mu_hat below 1e-3", r.mu_hat, 0.0, 1e-3, true));
        }
    } else if (d == 3) {
        o.checks.push_back(range_check("exponent", r.exponent.slope, 0.40, 0.60));
    } else if (d == 4) {
        o.checks.push_back(range_check("exponent", r.exponent.slope, 0.80, 1.00, true));
    } else if (d >= 5) {
        o.checks.push_back(range_check("exponent", r.exponent.slope, 0.90, 1.05));
    }
    return o;
}

Outcome run_pair_green(const Group& group, const ExperimentConfig& c, unsigned threads)
{
    const auto green = green_for(group, c);
    const PairGreenReport r = pair_green_sum_check(group, as_sizes(c.grid), c.seeds, *green, threads);
    Outcome o;
    o.result = to_json(r);
    o.csv = csv_rows(r);
    if (group.is_standard_lattice() && group.dim() == 3) {
        o.checks.push_back(range_check("pair Green sum exponent", r.exponent.slope, 1.35, 1.65));
    } else if (group.is_standard_lattice() && group.dim() >= 5) {
        o.checks.push_back(range_check("pair Green sum exponent", r.exponent.slope, 0.9, 1.1));
    }
    return o;
}

Outcome run_clt(const Group& group, const ExperimentConfig& c, unsigned threads)
{
    std::unique_ptr<GreenSource> holder;
    const GreenSource* green = series_green(c, group, holder);
    const CltReport r = clt_experiment(group, param<std::size_t>(c, "n"), param<std::size_t>(c, "replications"),
                                       param<std::uint64_t>(c, "seed"), c.estimator, green, threads);
    Outcome o;
    o.result = to_json(r);
    o.csv = csv_rows(r);
    o.checks.push_back(range_check("KS distance", r.ks_distance, 0.0, 0.10, true));
    o.checks.push_back(range_check("|skewness|", std::abs(r.skewness), 0.0, 0.5, true));
    o.checks.push_back(range_check("Var/n relative difference", r.variance_ratio_difference, 0.0, 0.25));
    return o;
}

Outcome run_sandwich(const Group& group, const ExperimentConfig& c, unsigned threads)
{
    const auto green = green_for(group, c);
    std::vector<int> levels;
    for (auto l : param<std::vector<std::uint64_t>>(c, "levels")) {
        levels.push_back(static_cast<int>(std::min<std::uint64_t>(l, 64)));
    }
    const DyadicReport r =
        dyadic_sandwich_experiment(group, param<std::size_t>(c, "n"), levels, c.seeds, c.estimator, *green, threads);
    Outcome o;
    o.result = to_json(r);
    o.csv = csv_rows(r);
    std::size_t upper = r.halves_upper_violations;
    for (auto v : r.upper_violations) {
        upper += v;
    }
    o.checks.push_back({"upper sandwich violations", upper == 0, std::to_string(upper)});
    return o;
}

Outcome run_decay(const Group& group, const ExperimentConfig& c)
{
    const KernelDecayReport r = kernel_decay_check(group, as_sizes(c.grid));
    Outcome o;
    o.result = to_json(r);
    o.csv = csv_rows(r);
    if (group.backend() == Backend::FreeProductZ2 && group.arity() >= 3) {
        o.checks.push_back({"superpolynomial flag", r.superpolynomial, r.superpolynomial ? "set" : "not set"});
    } else if (r.expected_slope) {
        o.checks.push_back(
            range_check("log-slope", r.loglog.slope, *r.expected_slope - 0.3, *r.expected_slope + 0.3));
    }
    return o;
}

Outcome run_exit_tail(const Group& group, const ExperimentConfig& c, unsigned threads)
{
    std::vector<int> radii;
    for (auto r : param<std::vector<std::uint64_t>>(c, "radii")) {
        radii.push_back(static_cast<int>(std::min<std::uint64_t>(r, 1'000'000'000)));
    }
    const ExitTailReport r = exit_tail_check(group, radii, param<std::size_t>(c, "n"),
                                             param<std::size_t>(c, "trials"), param<std::uint64_t>(c, "seed"), threads);
    Outcome o;
    o.result = to_json(r);
    o.csv = csv_rows(r);
    o.checks.push_back({"frequency decreasing in r", r.decreasing, r.decreasing ? "yes" : "no"});
    if (r.fit.points >= 2) {
        o.checks.push_back({"negative log-linear slope", r.fit.slope < 0.0, fmt(r.fit.slope)});
    }
    return o;
}

Outcome dispatch(const ExperimentConfig& c, unsigned threads)
{
    const Group group = group_from_json(c.group);
    const std::string& id = c.experiment;
    if (id == "walk") {
        return run_walk(group, c);
    }
    if (id == "growth") {
        return run_growth(group, c);
    }
    if (id == "kernel") {
        return run_kernel(group, c);
    }
    if (id == "green") {
        return run_green(group, c);
    }
    if (id == "capacity") {
        return run_capacity(group, c, threads);
    }
    if (id == "slln" || id == "exponent-fit") {
        return run_series(group, c, threads);
    }
    if (id == "pair-green-sum") {
        return run_pair_green(group, c, threads);
    }
    if (id == "clt") {
        return run_clt(group, c, threads);
    }
    if (id == "dyadic-sandwich") {
        return run_sandwich(group, c, threads);
    }
    if (id == "kernel-decay") {
        return run_decay(group, c);
    }
    if (id == "exit-tail") {
        return run_exit_tail(group, c, threads);
    }
    throw ValidationError("unknown experiment \"" + id + "\"");
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    out << content;
}

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--group", f.group, "group spec: JSON file or inline JSON");
    sub->add_option("--config", f.config, "experiment config JSON file");
    sub->add_option("--seed", f.seed, "seed");
    sub->add_option("--threads", f.threads, "worker threads (default: machine parallelism)");
    sub->add_option("--out", f.out_dir, "output directory for report, CSV and manifest");
    sub->add_option("--format", f.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_flag("--assert", f.assert_mode, "exit 4 if an acceptance check fails");
}

void add_estimator(CLI::App* sub, Flags& f)
{
    sub->add_option("--method", f.method, "capacity estimator");
    sub->add_option("--trials", f.trials, "escape trials per point");
    sub->add_option("--horizon-factor", f.horizon_factor, "escape horizon / path length");
    sub->add_option("--green-horizon", f.green_horizon, "truncation horizon when no exact Green function exists");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Random walk range capacity toolkit", "rangecap"};
    app.set_version_flag("--version", std::string(RANGECAP_VERSION));
    app.require_subcommand(1);
    Flags f;

    auto* walk = app.add_subcommand("walk", "simulate one path");
    add_common(walk, f);
    walk->add_option("--n", f.n, "path length");

    auto* growth = app.add_subcommand("growth", "ball sizes and growth index");
    add_common(growth, f);
    growth->add_option("--rmax", f.rmax, "largest radius");

    auto* kernel = app.add_subcommand("kernel", "exact n-step distributions");
    add_common(kernel, f);
    kernel->add_option("--n", f.n, "horizon");
    kernel->add_option("--prune", f.prune, "drop entries below this probability");

    auto* green = app.add_subcommand("green", "Green function value");
    add_common(green, f);
    green->add_option("--n", f.n, "truncation horizon");
    green->add_option("--method", f.method, "truncated-kernel, monte-carlo or lattice-integral");
    green->add_option("--horizon", f.horizon, "Monte Carlo walk horizon");
    green->add_option("--trials", f.trials, "Monte Carlo walks");
    green->add_option("--target", f.target, "target element as JSON array");

    auto* capacity = app.add_subcommand("capacity", "capacity of the range of one path");
    add_common(capacity, f);
    add_estimator(capacity, f);
    capacity->add_option("--n", f.n, "path length");
    capacity->add_option("--horizon", f.horizon, "escape horizon");
    capacity->add_option("--radius", f.radius, "ball radius for harmonic-bracket");

    auto* slln = app.add_subcommand("slln", "C_n / n over an n-grid");
    add_common(slln, f);
    add_estimator(slln, f);
    slln->add_option("--grid", f.grid, "n values, comma separated");
    slln->add_option("--seeds", f.seeds, "seeds, e.g. 1..20");

    auto* clt = app.add_subcommand("clt", "normality of C_n");
    add_common(clt, f);
    add_estimator(clt, f);
    clt->add_option("--n", f.n, "path length");
    clt->add_option("--reps", f.reps, "replications");

    auto* fit = app.add_subcommand("fit", "growth exponent of E[C_n] or of the pair Green sum");
    add_common(fit, f);
    add_estimator(fit, f);
    fit->add_option("--grid", f.grid, "n values, comma separated");
    fit->add_option("--seeds", f.seeds, "seeds, e.g. 1..20");
    fit->add_option("--statistic", f.statistic, "capacity or pair-green");

    auto* sandwich = app.add_subcommand("sandwich", "dyadic capacity decomposition");
    add_common(sandwich, f);
    add_estimator(sandwich, f);
    sandwich->add_option("--n", f.n, "path length");
    sandwich->add_option("--levels", f.levels, "dyadic depths, comma separated");
    sandwich->add_option("--seeds", f.seeds, "seeds, e.g. 1..100");

    auto* decay = app.add_subcommand("decay", "decay of p_2n(e)");
    add_common(decay, f);
    decay->add_option("--grid", f.grid, "n values, comma separated");

    auto* exit_tail = app.add_subcommand("exit-tail", "P(tau_r < n) against r^2 / n");
    add_common(exit_tail, f);
    exit_tail->add_option("--n", f.n, "time horizon");
    exit_tail->add_option("--radii", f.radii, "radii, comma separated");
    exit_tail->add_option("--trials", f.trials, "paths");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        const std::string started = utc_now();
        const ExperimentConfig config = resolve(sub, f);
        const unsigned threads = f.threads ? std::max(1u, *f.threads) : default_threads();
        const Outcome outcome = dispatch(config, threads);

        Json checks = Json::array();
        bool all_passed = true;
        for (const auto& c : outcome.checks) {
            checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            all_passed = all_passed && c.passed;
        }
        const Json report{{"schema", kSchemaVersion},
                          {"command", sub},
                          {"config", to_json(config)},
                          {"result", outcome.result},
                          {"checks", checks}};
        const std::string report_text = dump_canonical(report);
        const std::string csv_text = to_csv(outcome.csv);
        const bool want_json = f.format != "csv";
        const bool want_csv = f.format != "json";

        if (f.out_dir) {
            const std::filesystem::path dir(*f.out_dir);
            std::filesystem::create_directories(dir);
            Json digests = Json::object();
            if (want_json) {
                write_file(dir / (sub + ".json"), report_text);
                digests[sub + ".json"] = sha256_hex(report_text);
            }
            if (want_csv) {
                write_file(dir / (sub + ".csv"), csv_text);
                digests[sub + ".csv"] = sha256_hex(csv_text);
            }
            const Json manifest{{"schema", kSchemaVersion},
                                {"tool", "rangecap"},
                                {"version", RANGECAP_VERSION},
                                {"command", sub},
                                {"argv", args},
                                {"config", to_json(config)},
                                {"seeds", config.seeds},
                                {"threads", threads},
                                {"host_threads", std::thread::hardware_concurrency()},
                                {"started", started},
                                {"finished", utc_now()},
                                {"outputs", digests}};
            write_file(dir / "manifest.json", dump_canonical(manifest));
        } else {
            if (want_json) {
                out << report_text;
            }
            if (want_csv) {
                out << csv_text;
            }
        }
        for (const auto& c : outcome.checks) {
            err << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        }
        if (f.assert_mode && !all_passed) {
            return kExitAssertion;
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const BallTooLarge& e) {
        err << "resource limit: " << e.what() << " (complete up to radius " << e.reached_radius() << ")\n";
        return kExitResource;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace rangecap
