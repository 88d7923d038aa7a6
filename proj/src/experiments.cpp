#include "rangecap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rangecap/errors.hpp"
#include "rangecap/kernel.hpp"
#include "rangecap/parallel.hpp"
#include "rangecap/rng.hpp"
#include "rangecap/stats.hpp"
#include "rangecap/word_metric.hpp"

namespace rangecap {

namespace {

FitSummary fit_window(std::span<const double> x, std::span<const double> y, std::size_t first)
{
    const LinearFit f = least_squares(x.subspan(first), y.subspan(first));
    FitSummary s;
    s.slope = f.slope;
    s.slope_stderr = f.slope_stderr;
    s.intercept = f.intercept;
    s.rss = f.rss;
    s.points = f.points;
    s.window_first = x[first];
    s.window_last = x.back();
    return s;
}

// FitSummary reports window ends on the original scale
FitSummary fit_loglog(std::span<const std::size_t> grid, std::span<const double> y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        lx.push_back(std::log(static_cast<double>(grid[i])));
        ly.push_back(std::log(y[i]));
    }
    const std::size_t first = upper_half_start(grid.size());
    FitSummary s = fit_window(lx, ly, first);
    s.window_first = static_cast<double>(grid[first]);
    s.window_last = static_cast<double>(grid.back());
    return s;
}

}  // namespace

SeriesRow summarize(std::size_t n, std::span<const double> values)
{
    RunningMoments m;
    for (double v : values) {
        m.add(v);
    }
    SeriesRow row;
    row.n = n;
    row.mean = m.mean();
    row.variance = m.variance();
    row.stderr = m.stderr_mean();
    std::vector<double> copy(values.begin(), values.end());
    if (!copy.empty()) {
        row.q10 = quantile(copy, 0.1);
        row.median = quantile(copy, 0.5);
        row.q90 = quantile(copy, 0.9);
    }
    return row;
}

WalkPath replicate_path(const Group& group, std::size_t n, std::uint64_t seed, std::uint64_t index)
{
    return simulate(group, n, seed, stream_id({streams::kPath, index}));
}

std::uint64_t replicate_escape_seed(std::uint64_t seed, std::uint64_t index)
{
    return stream_id({streams::kEscape, seed, index});
}

void check_series_inputs(std::span<const std::size_t> grid, std::span<const std::uint64_t> seeds,
                         std::size_t min_seeds)
{
    if (grid.size() < 2) {
        throw ValidationError("the n-grid needs at least two values");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == 0 || (i > 0 && grid[i] <= grid[i - 1])) {
            throw ValidationError("the n-grid must be positive and strictly increasing");
        }
    }
    if (seeds.size() < min_seeds) {
        throw ValidationError("need at least " + std::to_string(min_seeds) + " seeds");
    }
}

namespace {

CapacitySeriesReport capacity_series(std::string id, const Group& group, std::span<const std::size_t> grid,
                                     std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                     const GreenSource* green, unsigned threads)
{
    check_series_inputs(grid, seeds, 5);
    CapacitySeriesReport r{.experiment = std::move(id), .group = group};
    r.grid.assign(grid.begin(), grid.end());
    r.seeds.assign(seeds.begin(), seeds.end());
    r.config = config;
    const std::size_t g = grid.size();
    const std::size_t s = seeds.size();
    r.capacity.assign(g, std::vector<double>(s, 0.0));
    r.capacity_stderr.assign(g, std::vector<double>(s, 0.0));

    CapacityConfig inner = config;
    inner.threads = 1;
    parallel_for(s, threads, [&](std::size_t j) {
        const WalkPath path = replicate_path(group, grid.back(), seeds[j], 0);
        const std::uint64_t escape_seed = replicate_escape_seed(seeds[j], 0);
        for (std::size_t i = 0; i < g; ++i) {
            const RangeSet range = range_of(path, 0, grid[i]);
            const CapacityEstimate c = capacity_of_range(group, range, grid[i], inner, escape_seed, green);
            r.capacity[i][j] = c.point;
            r.capacity_stderr[i][j] = c.stderr;
        }
    });

    std::vector<double> means;
    for (std::size_t i = 0; i < g; ++i) {
        const auto n = static_cast<double>(grid[i]);
        std::vector<double> ratio(s);
        for (std::size_t j = 0; j < s; ++j) {
            ratio[j] = r.capacity[i][j] / n;
        }
        r.capacity_rows.push_back(summarize(grid[i], r.capacity[i]));
        r.ratio_rows.push_back(summarize(grid[i], ratio));
        means.push_back(r.capacity_rows.back().mean);
        r.log_corrected_ratio.push_back(means.back() * std::log(n) / n);
    }
    r.mu_hat = r.ratio_rows.back().mean;
    r.mu_hat_stderr = r.ratio_rows.back().stderr;
    const double prev = r.ratio_rows[g - 2].mean;
    r.top_octave_relative_change = prev != 0.0 ? (r.mu_hat - prev) / prev : 0.0;
    r.ratio_strictly_decreasing = true;
    for (std::size_t i = 1; i < g; ++i) {
        if (!(r.ratio_rows[i].mean < r.ratio_rows[i - 1].mean)) {
            r.ratio_strictly_decreasing = false;
        }
    }
    if (std::all_of(means.begin(), means.end(), [](double m) { return m > 0.0; })) {
        r.exponent = fit_loglog(grid, means);
    }
    return r;
}

}  // namespace

CapacitySeriesReport slln_experiment(const Group& group, std::span<const std::size_t> grid,
                                     std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                     const GreenSource* green, unsigned threads)
{
    return capacity_series("slln", group, grid, seeds, config, green, threads);
}

CapacitySeriesReport exponent_fit(const Group& group, std::span<const std::size_t> grid,
                                  std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                  const GreenSource* green, unsigned threads)
{
    return capacity_series("exponent-fit", group, grid, seeds, config, green, threads);
}

CltReport clt_experiment(const Group& group, std::size_t n, std::size_t replications, std::uint64_t seed,
                         const CapacityConfig& config, const GreenSource* green, unsigned threads)
{
    if (n < 2) {
        throw ValidationError("clt needs n >= 2");
    }
    if (replications < 3) {
        throw ValidationError("clt needs at least 3 replications");
    }
    CltReport r{.group = group, .n = n, .replications = replications, .seed = seed, .config = config};
    r.half_n = n / 2;
    r.samples.assign(replications, 0.0);
    r.half_samples.assign(replications, 0.0);
    CapacityConfig inner = config;
    inner.threads = 1;
    parallel_for(replications, threads, [&](std::size_t i) {
        const WalkPath path = replicate_path(group, n, seed, i);
        const std::uint64_t escape_seed = replicate_escape_seed(seed, i);
        r.samples[i] = capacity_of_range(group, range_of(path, 0, n), n, inner, escape_seed, green).point;
        r.half_samples[i] =
            capacity_of_range(group, range_of(path, 0, r.half_n), r.half_n, inner, escape_seed, green).point;
    });
    RunningMoments full, half;
    for (std::size_t i = 0; i < replications; ++i) {
        full.add(r.samples[i]);
        half.add(r.half_samples[i]);
    }
    r.mean = full.mean();
    r.variance = full.variance();
    r.skewness = full.skewness();
    r.excess_kurtosis = full.excess_kurtosis();
    r.ks_distance = ks_distance_standardized(r.samples);
    r.variance_over_n = full.variance() / static_cast<double>(n);
    r.half_variance_over_n = half.variance() / static_cast<double>(r.half_n);
    const double lo = std::min(r.variance_over_n, r.half_variance_over_n);
    r.variance_ratio_difference = lo > 0.0 ? std::abs(r.variance_over_n - r.half_variance_over_n) / lo : 0.0;
    return r;
}

KernelDecayReport kernel_decay_check(const Group& group, std::span<const std::size_t> grid, std::size_t cap)
{
    if (grid.size() < 2) {
        throw ValidationError("kernel decay needs at least two grid values");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == 0 || (i > 0 && grid[i] <= grid[i - 1])) {
            throw ValidationError("the n-grid must be positive and strictly increasing");
        }
    }
    KernelDecayReport r{.group = group};
    r.grid.assign(grid.begin(), grid.end());
    const std::size_t steps = 2 * grid.back();
    const GroupElement e = group.identity();
    if (group.is_standard_lattice()) {
        const std::vector<double> s = LatticeKernelSeries(group.dim(), steps).series(e);
        for (std::size_t n : grid) {
            r.return_probability.push_back(s[2 * n]);
        }
        r.expected_slope = -0.5 * group.dim();
    } else {
        const KernelTable k = exact_kernel(group, steps, 0.0, cap);
        for (std::size_t n : grid) {
            r.return_probability.push_back(k.probability(2 * n, e));
        }
        if (group.backend() == Backend::IntegerLattice) {
            r.expected_slope = -0.5 * group.dim();
        }
    }
    if (std::any_of(r.return_probability.begin(), r.return_probability.end(), [](double p) { return p <= 0.0; })) {
        throw ValidationError("return probability vanished on the grid (periodic or degenerate walk)");
    }
    r.loglog = fit_loglog(grid, r.return_probability);
    std::vector<double> x, ly;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        x.push_back(static_cast<double>(grid[i]));
        ly.push_back(std::log(r.return_probability[i]));
    }
    r.semilog = fit_window(x, ly, upper_half_start(grid.size()));
    // exponential decay fits a line in n better than a line in log n; a very
    // steep power fit counts as well
    r.superpolynomial = r.semilog.rss < r.loglog.rss || r.loglog.slope < -0.5 * kSuperpolynomialIndex;
    return r;
}

ExitTailReport exit_tail_check(const Group& group, std::span<const int> radii, std::size_t n, std::size_t trials,
                               std::uint64_t seed, unsigned threads)
{
    if (radii.empty() || trials == 0) {
        throw ValidationError("exit tail needs radii and at least one trial");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 0 || (i > 0 && radii[i] <= radii[i - 1])) {
            throw ValidationError("radii must be non-negative and strictly increasing");
        }
    }
    ExitTailReport r{.group = group, .n = n, .trials = trials, .seed = seed};
    r.radii.assign(radii.begin(), radii.end());
    // word metric tables are not thread-safe; the standard lattice needs none
    const unsigned workers = group.is_standard_lattice() ? threads : 1;
    std::vector<int> max_length(trials, 0);
    WordMetric shared(group);
    const int r_max = radii.back();
    parallel_for(trials, workers, [&](std::size_t t) {
        const WalkPath path = replicate_path(group, n == 0 ? 0 : n - 1, seed, t);
        WordMetric local(group);
        WordMetric& metric = group.is_standard_lattice() ? local : shared;
        // largest word length seen before time n, capped at r_max
        int best = 0;
        for (const auto& pos : path.positions) {
            const auto len = metric.length(pos, r_max);
            best = std::max(best, len ? *len : r_max);
            if (best >= r_max) {
                break;
            }
        }
        max_length[t] = best;
    });
    for (int radius : radii) {
        std::size_t hits = 0;
        for (int m : max_length) {
            if (n > 0 && m >= radius) {
                ++hits;
            }
        }
        const double p = static_cast<double>(hits) / static_cast<double>(trials);
        r.frequency.push_back(p);
        r.frequency_stderr.push_back(trials > 1 ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials - 1)) : 0.0);
        r.scaled.push_back(n > 0 ? static_cast<double>(radius) * radius / static_cast<double>(n) : 0.0);
    }
    r.decreasing = true;
    for (std::size_t i = 1; i < r.frequency.size(); ++i) {
        if (r.frequency[i] > r.frequency[i - 1]) {
            r.decreasing = false;
        }
    }
    std::vector<double> x, y, sd;
    for (std::size_t i = 0; i < r.frequency.size(); ++i) {
        if (r.frequency[i] > 0.0) {
            x.push_back(r.scaled[i]);
            y.push_back(std::log(r.frequency[i]));
            sd.push_back(r.frequency_stderr[i] / r.frequency[i]);
        }
    }
    if (x.size() >= 2) {
        r.fit = fit_window(x, y, 0);
    }
    r.convex_consistent = true;
    for (std::size_t i = 2; i < x.size(); ++i) {
        const double s1 = (y[i - 1] - y[i - 2]) / (x[i - 1] - x[i - 2]);
        const double s2 = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        const double e1 = std::hypot(sd[i - 1], sd[i - 2]) / (x[i - 1] - x[i - 2]);
        const double e2 = std::hypot(sd[i], sd[i - 1]) / (x[i] - x[i - 1]);
        if (s2 < s1 - 2.0 * std::hypot(e1, e2)) {
            r.convex_consistent = false;
        }
    }
    return r;
}

double pair_green_sum(const WalkPath& path, std::size_t n, const GreenSource& green)
{
    if (n > path.length()) {
        throw WindowOutOfBounds("pair Green sum beyond the path");
    }
    const Group& group = path.group;
    ElementMap<std::size_t> slot;
    std::vector<GroupElement> points;
    std::vector<double> visits;
    for (std::size_t k = 0; k <= n; ++k) {
        auto [it, inserted] = slot.try_emplace(path.positions[k], points.size());
        if (inserted) {
            points.push_back(path.positions[k]);
            visits.push_back(0.0);
        }
        visits[it->second] += 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const GroupElement inv = group.inverse(points[i]);
        total += visits[i] * visits[i] * green(group.identity());
        double off = 0.0;
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            off += visits[j] * green(group.multiply(inv, points[j]));
        }
        total += 2.0 * visits[i] * off;
    }
    return total;
}

PairGreenReport pair_green_sum_check(const Group& group, std::span<const std::size_t> grid,
                                     std::span<const std::uint64_t> seeds, const GreenSource& green,
                                     unsigned threads)
{
    check_series_inputs(grid, seeds, 1);
    PairGreenReport r{.group = group};
    r.grid.assign(grid.begin(), grid.end());
    r.seeds.assign(seeds.begin(), seeds.end());
    r.green_method = green.method();
    r.green_horizon = green.horizon();
    r.sums.assign(grid.size(), std::vector<double>(seeds.size(), 0.0));
    parallel_for(seeds.size(), threads, [&](std::size_t j) {
        const WalkPath path = replicate_path(group, grid.back(), seeds[j], 0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            r.sums[i][j] = pair_green_sum(path, grid[i], green);
        }
    });
    std::vector<double> means;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.rows.push_back(summarize(grid[i], r.sums[i]));
        means.push_back(r.rows.back().mean);
    }
    r.exponent = fit_loglog(grid, means);
    return r;
}

namespace {

DyadicLevel dyadic_level(const WalkPath& path, int levels, const CapacityConfig& config, std::uint64_t seed,
                         const GreenSource& green, const CapacityEstimate& whole)
{
    const Group& group = path.group;
    const std::size_t n = path.length();
    const DyadicSplit split = dyadic_segments(path, levels);
    const std::size_t count = split.segments.size();
    // blocks[i] = untranslated range of window i; left-invariance makes its
    // capacity equal to that of the translated segment
    std::vector<std::vector<GroupElement>> blocks(count);
    DyadicLevel out;
    out.levels = levels;
    out.capacity = whole.point;
    double var = whole.stderr * whole.stderr;
    for (std::size_t i = 0; i < count; ++i) {
        blocks[i] = range_of(path, split.boundaries[i], split.boundaries[i + 1]).members;
        const CapacityEstimate c = capacity_of_set(group, blocks[i], n, config, seed, &green);
        out.segment_sum += c.point;
        var += c.stderr * c.stderr;
    }
    // merge adjacent blocks bottom-up; each merge contributes G(left, right)
    while (blocks.size() > 1) {
        std::vector<std::vector<GroupElement>> merged;
        for (std::size_t i = 0; i + 1 < blocks.size(); i += 2) {
            out.error_sum += cross_green(group, blocks[i], blocks[i + 1], green);
            std::vector<GroupElement> u = blocks[i];
            const FiniteSet left(blocks[i]);
            for (const auto& g : blocks[i + 1]) {
                if (!left.contains(g)) {
                    u.push_back(g);
                }
            }
            merged.push_back(std::move(u));
        }
        blocks = std::move(merged);
    }
    out.upper_margin = out.segment_sum - out.capacity;
    out.lower_margin = out.capacity - (out.segment_sum - 2.0 * out.error_sum);
    out.combined_stderr = std::sqrt(var);
    const double slack = out.combined_stderr > 0.0 ? 3.0 * out.combined_stderr : 1e-9 * (1.0 + out.segment_sum);
    out.upper_violation = out.upper_margin < -slack;
    out.lower_violation = out.lower_margin < -slack;
    return out;
}

}  // namespace

DyadicReport dyadic_sandwich_experiment(const Group& group, std::size_t n, std::span<const int> level_grid,
                                        std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                        const GreenSource& green, unsigned threads)
{
    if (level_grid.empty() || seeds.empty()) {
        throw ValidationError("dyadic experiment needs levels and seeds");
    }
    for (int l : level_grid) {
        if (l < 0 || l >= 63 || (std::size_t{1} << l) > n) {
            throw TooManyLevels("2^L must not exceed n for every L in the level grid");
        }
    }
    DyadicReport r{.group = group, .n = n};
    r.level_grid.assign(level_grid.begin(), level_grid.end());
    r.seeds.assign(seeds.begin(), seeds.end());
    r.config = config;
    r.samples.resize(seeds.size());
    CapacityConfig inner = config;
    inner.threads = 1;
    parallel_for(seeds.size(), threads, [&](std::size_t j) {
        const WalkPath path = replicate_path(group, n, seeds[j], 0);
        const std::uint64_t escape_seed = replicate_escape_seed(seeds[j], 0);
        const CapacityEstimate whole =
            capacity_of_range(group, range_of(path, 0, n), n, inner, escape_seed, &green);
        DyadicSample& s = r.samples[j];
        s.seed = seeds[j];
        for (int l : level_grid) {
            s.levels.push_back(dyadic_level(path, l, inner, escape_seed, green, whole));
        }
        s.halves = capacity_sandwich_check(path, n / 2, inner, escape_seed, green);
        // finer splits can only add subadditivity slack
        std::vector<std::pair<int, double>> by_level;
        for (const auto& lv : s.levels) {
            by_level.emplace_back(lv.levels, lv.segment_sum);
        }
        std::sort(by_level.begin(), by_level.end());
        for (std::size_t i = 1; i < by_level.size(); ++i) {
            const double tol = 1e-9 * (1.0 + by_level[i].second);
            if (by_level[i].second < by_level[i - 1].second - tol) {
                s.segment_sum_monotone = false;
            }
        }
    });
    r.upper_violations.assign(level_grid.size(), 0);
    r.lower_violations.assign(level_grid.size(), 0);
    r.min_lower_margin.assign(level_grid.size(), std::numeric_limits<double>::infinity());
    for (const auto& s : r.samples) {
        for (std::size_t i = 0; i < level_grid.size(); ++i) {
            r.upper_violations[i] += s.levels[i].upper_violation ? 1 : 0;
            r.lower_violations[i] += s.levels[i].lower_violation ? 1 : 0;
            r.min_lower_margin[i] = std::min(r.min_lower_margin[i], s.levels[i].lower_margin);
        }
        r.halves_upper_violations += s.halves.upper_holds ? 0 : 1;
        r.halves_lower_violations += s.halves.lower_holds ? 0 : 1;
        r.monotone_failures += s.segment_sum_monotone ? 0 : 1;
    }
    return r;
}

}  // namespace rangecap
