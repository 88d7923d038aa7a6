#include "rangecap/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "rangecap/errors.hpp"

namespace rangecap {

namespace {

Backend parse_backend(const std::string& name)
{
    for (auto b : {Backend::IntegerLattice, Backend::Heisenberg, Backend::FreeProductZ2}) {
        if (backend_name(b) == name) {
            return b;
        }
    }
    throw ValidationError("unknown backend \"" + name + "\" (expected lattice, heisenberg or free_product_z2)");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("field \"") + key + "\": " + e.what());
    }
}

// Non-finite values have no JSON literal; they are written as null.
Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json rows_json(const std::vector<SeriesRow>& rows)
{
    Json out = Json::array();
    for (const auto& r : rows) {
        out.push_back(to_json(r));
    }
    return out;
}

}  // namespace

Json element_to_json(const GroupElement& g)
{
    Json out = Json::array();
    for (Coord c : g.values()) {
        out.push_back(c);
    }
    return out;
}

GroupElement element_from_json(const Json& j)
{
    if (!j.is_array()) {
        throw ValidationError("group elements are JSON arrays of integers");
    }
    GroupElement::Storage data;
    for (const auto& v : j) {
        if (!v.is_number_integer()) {
            throw ValidationError("group element entries must be integers");
        }
        const auto x = v.get<std::int64_t>();
        if (x < std::numeric_limits<Coord>::min() || x > std::numeric_limits<Coord>::max()) {
            throw ValidationError("group element entry out of range");
        }
        data.push_back(static_cast<Coord>(x));
    }
    return GroupElement(std::move(data));
}

Json group_to_json(const Group& group)
{
    Json gens = Json::array();
    for (const auto& g : group.generators()) {
        gens.push_back(element_to_json(g));
    }
    Json out{{"backend", std::string(backend_name(group.backend()))}, {"generators", gens}};
    if (group.backend() == Backend::IntegerLattice) {
        out["dim"] = group.dim();
    }
    if (group.backend() == Backend::FreeProductZ2) {
        out["arity"] = group.arity();
    }
    return out;
}

Group group_from_json(const Json& j)
{
    if (!j.is_object()) {
        throw ValidationError("group specification must be a JSON object");
    }
    if (!j.contains("backend") || !j.at("backend").is_string()) {
        throw ValidationError("group specification needs a string \"backend\"");
    }
    const Backend backend = parse_backend(j.at("backend").get<std::string>());
    std::vector<GroupElement> gens;
    if (j.contains("generators") && !j.at("generators").is_null()) {
        if (!j.at("generators").is_array()) {
            throw ValidationError("\"generators\" must be an array of elements");
        }
        for (const auto& g : j.at("generators")) {
            gens.push_back(element_from_json(g));
        }
    }
    int param = 0;
    switch (backend) {
    case Backend::IntegerLattice:
        param = get_or<int>(j, "dim", gens.empty() ? 0 : static_cast<int>(gens.front().size()));
        if (param < 1) {
            throw ValidationError("lattice specification needs \"dim\" >= 1");
        }
        break;
    case Backend::FreeProductZ2:
        param = get_or<int>(j, "arity", 0);
        if (param < 1) {
            throw ValidationError("free product specification needs \"arity\" >= 1");
        }
        break;
    case Backend::Heisenberg:
        break;
    }
    return make_group(backend, param, std::move(gens));
}

Json parse_json_text(std::string_view text, std::string_view what)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError("invalid JSON in " + std::string(what) + ": " + e.what());
    }
}

Group load_group(std::string_view spec)
{
    std::size_t first = spec.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && spec[first] == '{') {
        return group_from_json(parse_json_text(spec, "inline group specification"));
    }
    std::ifstream in{std::filesystem::path(std::string(spec))};
    if (!in) {
        throw ValidationError("cannot read group file " + std::string(spec));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return group_from_json(parse_json_text(buffer.str(), spec));
}

Json to_json(const CapacityConfig& c)
{
    return Json{{"method", std::string(capacity_method_name(c.method))},
                {"horizon_factor", c.horizon_factor},
                {"trials", c.trials}};
}

CapacityConfig capacity_config_from_json(const Json& j)
{
    if (!j.is_object()) {
        throw ValidationError("estimator configuration must be a JSON object");
    }
    CapacityConfig c;
    c.method = parse_capacity_method(get_or<std::string>(j, "method", std::string(capacity_method_name(c.method))));
    c.horizon_factor = get_or<double>(j, "horizon_factor", c.horizon_factor);
    c.trials = get_or<std::size_t>(j, "trials", c.trials);
    if (!(c.horizon_factor > 0.0) || c.trials == 0) {
        throw ValidationError("estimator needs horizon_factor > 0 and trials >= 1");
    }
    return c;
}

Json to_json(const CapacityEstimate& c)
{
    Json out{{"method", std::string(capacity_method_name(c.method))},
             {"point", number(c.point)},
             {"stderr", number(c.stderr)},
             {"set_size", c.set_size}};
    out["bracket"] = c.bracket ? Json::array({number(c.bracket->first), number(c.bracket->second)}) : Json(nullptr);
    switch (c.method) {
    case CapacityMethod::EscapeMc:
    case CapacityMethod::JainOreyRange:
        out["horizon"] = c.horizon;
        out["trials"] = c.trials;
        out["seed"] = c.seed;
        out["half_horizon_point"] = c.half_horizon_point ? number(*c.half_horizon_point) : Json(nullptr);
        break;
    case CapacityMethod::HarmonicBracket:
        out["radius"] = c.radius;
        out["sweeps"] = c.iterations;
        break;
    case CapacityMethod::VariationalLower:
        out["iterations"] = c.iterations;
        out["converged"] = c.converged;
        break;
    case CapacityMethod::GreenSolve:
        break;
    }
    return out;
}

Json to_json(const GreenEstimate& g)
{
    Json out{{"target", element_to_json(g.target)},
             {"value", number(g.value)},
             {"method", std::string(green_method_name(g.method))},
             {"horizon", g.horizon},
             {"lower_bound_only", g.lower_bound_only}};
    if (g.method == GreenMethod::MonteCarlo) {
        out["samples"] = g.samples;
        out["stderr"] = number(g.stderr);
    }
    if (g.doubled_horizon_value) {
        out["doubled_horizon_value"] = number(*g.doubled_horizon_value);
        out["increment"] = number(*g.doubled_horizon_value - g.value);
    }
    return out;
}

Json to_json(const GrowthProfile& p)
{
    return Json{{"radii", p.radii},
                {"ball_sizes", p.ball_sizes},
                {"fitted_index", number(p.fitted_index)},
                {"fitted_index_stderr", number(p.fitted_index_stderr)},
                {"fit_window", Json::array({p.fit_first_radius, p.fit_last_radius})},
                {"loglog_rss", number(p.loglog_rss)},
                {"semilog_rss", number(p.semilog_rss)},
                {"superpolynomial", p.superpolynomial}};
}

Json to_json(const KernelTable& k)
{
    Json dists = Json::array();
    for (std::size_t i = 0; i < k.distributions.size(); ++i) {
        Json d = Json::array();
        for (const auto& [g, p] : k.sorted(i)) {
            d.push_back(Json{{"element", element_to_json(g)}, {"p", p}});
        }
        dists.push_back(std::move(d));
    }
    return Json{{"horizon", k.horizon}, {"pruned_mass", k.pruned_mass}, {"distributions", std::move(dists)}};
}

Json to_json(const WalkPath& p)
{
    Json positions = Json::array();
    for (const auto& g : p.positions) {
        positions.push_back(element_to_json(g));
    }
    return Json{{"group", group_to_json(p.group)},
                {"steps", p.steps},
                {"positions", std::move(positions)},
                {"seed", p.seed},
                {"stream", p.stream}};
}

Json to_json(const SimplexMeasure& m)
{
    Json support = Json::array();
    for (const auto& g : m.support) {
        support.push_back(element_to_json(g));
    }
    return Json{{"support", std::move(support)}, {"weights", m.weights}};
}

Json to_json(const EquilibriumResult& r)
{
    return Json{{"measure", to_json(r.measure)},
                {"capacity", to_json(r.estimate)},
                {"energy", number(r.energy)},
                {"gap", number(r.gap)},
                {"iterations", r.iterations},
                {"converged", r.converged}};
}

Json to_json(const FitSummary& f)
{
    return Json{{"slope", number(f.slope)},
                {"slope_stderr", number(f.slope_stderr)},
                {"intercept", number(f.intercept)},
                {"rss", number(f.rss)},
                {"window", Json::array({number(f.window_first), number(f.window_last)})},
                {"points", f.points}};
}

Json to_json(const SeriesRow& r)
{
    return Json{{"n", r.n},
                {"mean", number(r.mean)},
                {"variance", number(r.variance)},
                {"stderr", number(r.stderr)},
                {"q10", number(r.q10)},
                {"median", number(r.median)},
                {"q90", number(r.q90)}};
}

Json to_json(const SandwichReport& r)
{
    return Json{{"cap_a", to_json(r.cap_a)},
                {"cap_b", to_json(r.cap_b)},
                {"cap_union", to_json(r.cap_union)},
                {"cap_intersection", to_json(r.cap_intersection)},
                {"cross_green", number(r.cross_green)},
                {"lower_margin", number(r.lower_margin)},
                {"upper_margin", number(r.upper_margin)},
                {"combined_stderr", number(r.combined_stderr)},
                {"lower_holds", r.lower_holds},
                {"upper_holds", r.upper_holds}};
}

Json to_json(const CapacitySeriesReport& r)
{
    Json cap = Json::array(), cap_se = Json::array();
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        Json row = Json::array(), row_se = Json::array();
        for (std::size_t s = 0; s < r.seeds.size(); ++s) {
            row.push_back(number(r.capacity[i][s]));
            row_se.push_back(number(r.capacity_stderr[i][s]));
        }
        cap.push_back(std::move(row));
        cap_se.push_back(std::move(row_se));
    }
    Json diag = Json::array();
    for (double v : r.log_corrected_ratio) {
        diag.push_back(number(v));
    }
    return Json{{"experiment", r.experiment},
                {"group", group_to_json(r.group)},
                {"grid", r.grid},
                {"seeds", r.seeds},
                {"estimator", to_json(r.config)},
                {"capacity", std::move(cap)},
                {"capacity_stderr", std::move(cap_se)},
                {"capacity_stats", rows_json(r.capacity_rows)},
                {"ratio_stats", rows_json(r.ratio_rows)},
                {"mu_hat", number(r.mu_hat)},
                {"mu_hat_stderr", number(r.mu_hat_stderr)},
                {"top_octave_relative_change", number(r.top_octave_relative_change)},
                {"ratio_strictly_decreasing", r.ratio_strictly_decreasing},
                {"exponent", to_json(r.exponent)},
                {"log_corrected_ratio", std::move(diag)}};
}

Json to_json(const CltReport& r)
{
    return Json{{"experiment", "clt"},
                {"group", group_to_json(r.group)},
                {"n", r.n},
                {"replications", r.replications},
                {"seed", r.seed},
                {"estimator", to_json(r.config)},
                {"samples", r.samples},
                {"half_samples", r.half_samples},
                {"mean", number(r.mean)},
                {"variance", number(r.variance)},
                {"ks_distance", number(r.ks_distance)},
                {"skewness", number(r.skewness)},
                {"excess_kurtosis", number(r.excess_kurtosis)},
                {"half_n", r.half_n},
                {"variance_over_n", number(r.variance_over_n)},
                {"half_variance_over_n", number(r.half_variance_over_n)},
                {"variance_ratio_difference", number(r.variance_ratio_difference)}};
}

Json to_json(const KernelDecayReport& r)
{
    return Json{{"experiment", "kernel-decay"},
                {"group", group_to_json(r.group)},
                {"grid", r.grid},
                {"return_probability", r.return_probability},
                {"loglog", to_json(r.loglog)},
                {"semilog", to_json(r.semilog)},
                {"expected_slope", r.expected_slope ? number(*r.expected_slope) : Json(nullptr)},
                {"superpolynomial", r.superpolynomial}};
}

Json to_json(const ExitTailReport& r)
{
    return Json{{"experiment", "exit-tail"},
                {"group", group_to_json(r.group)},
                {"n", r.n},
                {"trials", r.trials},
                {"seed", r.seed},
                {"radii", r.radii},
                {"frequency", r.frequency},
                {"frequency_stderr", r.frequency_stderr},
                {"scaled", r.scaled},
                {"fit", to_json(r.fit)},
                {"decreasing", r.decreasing},
                {"convex_consistent", r.convex_consistent}};
}

Json to_json(const PairGreenReport& r)
{
    return Json{{"experiment", "pair-green-sum"},
                {"group", group_to_json(r.group)},
                {"grid", r.grid},
                {"seeds", r.seeds},
                {"green_method", std::string(green_method_name(r.green_method))},
                {"green_horizon", r.green_horizon},
                {"sums", r.sums},
                {"stats", rows_json(r.rows)},
                {"exponent", to_json(r.exponent)}};
}

Json to_json(const DyadicReport& r)
{
    Json samples = Json::array();
    for (const auto& s : r.samples) {
        Json levels = Json::array();
        for (const auto& l : s.levels) {
            levels.push_back(Json{{"levels", l.levels},
                                  {"capacity", number(l.capacity)},
                                  {"segment_sum", number(l.segment_sum)},
                                  {"error_sum", number(l.error_sum)},
                                  {"upper_margin", number(l.upper_margin)},
                                  {"lower_margin", number(l.lower_margin)},
                                  {"combined_stderr", number(l.combined_stderr)},
                                  {"upper_violation", l.upper_violation},
                                  {"lower_violation", l.lower_violation}});
        }
        samples.push_back(Json{{"seed", s.seed},
                               {"levels", std::move(levels)},
                               {"halves", to_json(s.halves)},
                               {"segment_sum_monotone", s.segment_sum_monotone}});
    }
    Json min_margin = Json::array();
    for (double v : r.min_lower_margin) {
        min_margin.push_back(number(v));
    }
    return Json{{"experiment", "dyadic-sandwich"},
                {"group", group_to_json(r.group)},
                {"n", r.n},
                {"level_grid", r.level_grid},
                {"seeds", r.seeds},
                {"estimator", to_json(r.config)},
                {"samples", std::move(samples)},
                {"upper_violations", r.upper_violations},
                {"lower_violations", r.lower_violations},
                {"min_lower_margin", std::move(min_margin)},
                {"halves_upper_violations", r.halves_upper_violations},
                {"halves_lower_violations", r.halves_lower_violations},
                {"monotone_failures", r.monotone_failures}};
}

Json to_json(const ExperimentConfig& c)
{
    return Json{{"experiment", c.experiment},
                {"group", c.group},
                {"grid", c.grid},
                {"seeds", c.seeds},
                {"estimator", to_json(c.estimator)},
                {"params", c.params}};
}

ExperimentConfig experiment_config_from_json(const Json& j)
{
    if (!j.is_object()) {
        throw ValidationError("experiment configuration must be a JSON object");
    }
    ExperimentConfig c;
    c.experiment = get_or<std::string>(j, "experiment", "");
    if (c.experiment.empty()) {
        throw ValidationError("experiment configuration needs \"experiment\"");
    }
    if (!j.contains("group")) {
        throw ValidationError("experiment configuration needs \"group\"");
    }
    c.group = j.at("group");
    group_from_json(c.group);  // validate early
    c.grid = get_or<std::vector<std::uint64_t>>(j, "grid", {});
    c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
    if (j.contains("estimator")) {
        c.estimator = capacity_config_from_json(j.at("estimator"));
    }
    if (j.contains("params")) {
        if (!j.at("params").is_object()) {
            throw ValidationError("\"params\" must be an object");
        }
        c.params = j.at("params");
    }
    return c;
}

std::string dump_canonical(const Json& j)
{
    // nlohmann objects are ordered maps, so keys come out sorted
    return j.dump(2) + "\n";
}

std::string to_csv(const std::vector<CsvRow>& rows)
{
    std::ostringstream out;
    out << "n,seed,statistic,value\n";
    out << std::setprecision(17);
    out.imbue(std::locale::classic());
    for (const auto& r : rows) {
        out << r.n << ',' << r.seed << ',' << r.statistic << ',' << r.value << '\n';
    }
    return out.str();
}

std::vector<CsvRow> csv_rows(const CapacitySeriesReport& r)
{
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const auto n = static_cast<double>(r.grid[i]);
        for (std::size_t s = 0; s < r.seeds.size(); ++s) {
            const std::string seed = std::to_string(r.seeds[s]);
            rows.push_back({n, seed, "capacity", r.capacity[i][s]});
            rows.push_back({n, seed, "capacity_stderr", r.capacity_stderr[i][s]});
            rows.push_back({n, seed, "ratio", r.capacity[i][s] / n});
        }
    }
    return rows;
}

std::vector<CsvRow> csv_rows(const CltReport& r)
{
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        rows.push_back({static_cast<double>(r.n), std::to_string(i), "capacity", r.samples[i]});
        rows.push_back({static_cast<double>(r.half_n), std::to_string(i), "capacity", r.half_samples[i]});
    }
    return rows;
}

std::vector<CsvRow> csv_rows(const KernelDecayReport& r)
{
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        rows.push_back({static_cast<double>(r.grid[i]), "", "return_probability", r.return_probability[i]});
    }
    return rows;
}

std::vector<CsvRow> csv_rows(const ExitTailReport& r)
{
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < r.radii.size(); ++i) {
        const std::string radius = "r=" + std::to_string(r.radii[i]);
        rows.push_back({static_cast<double>(r.n), std::to_string(r.seed), "exit_frequency_" + radius, r.frequency[i]});
    }
    return rows;
}

std::vector<CsvRow> csv_rows(const PairGreenReport& r)
{
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        for (std::size_t s = 0; s < r.seeds.size(); ++s) {
            rows.push_back({static_cast<double>(r.grid[i]), std::to_string(r.seeds[s]), "pair_green_sum", r.sums[i][s]});
        }
    }
    return rows;
}

std::vector<CsvRow> csv_rows(const DyadicReport& r)
{
    std::vector<CsvRow> rows;
    const auto n = static_cast<double>(r.n);
    for (const auto& s : r.samples) {
        const std::string seed = std::to_string(s.seed);
        for (const auto& l : s.levels) {
            const std::string tag = "_L" + std::to_string(l.levels);
            rows.push_back({n, seed, "segment_sum" + tag, l.segment_sum});
            rows.push_back({n, seed, "error_sum" + tag, l.error_sum});
            rows.push_back({n, seed, "upper_margin" + tag, l.upper_margin});
            rows.push_back({n, seed, "lower_margin" + tag, l.lower_margin});
        }
        if (!s.levels.empty()) {
            rows.push_back({n, seed, "capacity", s.levels.front().capacity});
        }
    }
    return rows;
}

std::vector<CsvRow> csv_rows(const GrowthProfile& p)
{
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
        rows.push_back({static_cast<double>(p.radii[i]), "", "ball_size", static_cast<double>(p.ball_sizes[i])});
    }
    return rows;
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::string out;
    out.reserve(2 * length);
    char hex[3];
    for (unsigned int i = 0; i < length; ++i) {
        std::snprintf(hex, sizeof hex, "%02x", digest[i]);
        out += hex;
    }
    return out;
}

}  // namespace rangecap
