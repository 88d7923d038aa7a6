#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rangecap/capacity.hpp"
#include "rangecap/green.hpp"
#include "rangecap/group.hpp"
#include "rangecap/sandwich.hpp"
#include "rangecap/walk.hpp"

namespace rangecap {

/// Least-squares fit over a declared window of the grid.
struct FitSummary {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    /// Grid values at both ends of the window (inclusive).
    double window_first = 0.0;
    double window_last = 0.0;
    std::size_t points = 0;
};

/// Summary of one statistic across replications at a fixed n.
struct SeriesRow {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double stderr = 0.0;
    double q10 = 0.0;
    double median = 0.0;
    double q90 = 0.0;
};

SeriesRow summarize(std::size_t n, std::span<const double> values);

/// Walk replicate `index` under `seed`; experiments draw every path this way.
WalkPath replicate_path(const Group& group, std::size_t n, std::uint64_t seed, std::uint64_t index);
/// Seed for the escape walks of that replicate.
std::uint64_t replicate_escape_seed(std::uint64_t seed, std::uint64_t index);

/// Cap(R_n) over a grid and a list of seeds. One path per seed, grown to the
/// largest n; smaller n use its prefixes.
struct CapacitySeriesReport {
    std::string experiment;
    Group group;
    std::vector<std::size_t> grid;
    std::vector<std::uint64_t> seeds;
    CapacityConfig config;
    /// capacity[i][s]: C_{grid[i]} for seeds[s]; stderr likewise (0 if exact).
    std::vector<std::vector<double>> capacity;
    std::vector<std::vector<double>> capacity_stderr;
    std::vector<SeriesRow> capacity_rows;
    /// C_n / n
    std::vector<SeriesRow> ratio_rows;
    /// Mean C_n / n at the largest n.
    double mu_hat = 0.0;
    double mu_hat_stderr = 0.0;
    /// (ratio(n_top) - ratio(n_prev)) / ratio(n_prev) for the last two grid points.
    double top_octave_relative_change = 0.0;
    /// Mean ratio strictly decreasing along the grid.
    bool ratio_strictly_decreasing = false;
    /// log mean C_n against log n over the upper half of the grid.
    FitSummary exponent;
    /// Mean C_n * log n / n; flat under the n / log n conjecture (diagnostic).
    std::vector<double> log_corrected_ratio;
};

/// Validates the grid and seeds shared by the series experiments.
void check_series_inputs(std::span<const std::size_t> grid, std::span<const std::uint64_t> seeds,
                         std::size_t min_seeds);

/// `green` is required for green-solve; pass nullptr for escape methods.
CapacitySeriesReport slln_experiment(const Group& group, std::span<const std::size_t> grid,
                                     std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                     const GreenSource* green, unsigned threads = 1);

CapacitySeriesReport exponent_fit(const Group& group, std::span<const std::size_t> grid,
                                  std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                  const GreenSource* green, unsigned threads = 1);

struct CltReport {
    Group group;
    std::size_t n = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    CapacityConfig config;
    /// C_n per replicate, in replicate order.
    std::vector<double> samples;
    /// C_{n/2} from the same paths.
    std::vector<double> half_samples;
    double mean = 0.0;
    double variance = 0.0;
    double ks_distance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::size_t half_n = 0;
    double variance_over_n = 0.0;
    double half_variance_over_n = 0.0;
    /// |a - b| / min(a, b) for the two Var / n values.
    double variance_ratio_difference = 0.0;
};

CltReport clt_experiment(const Group& group, std::size_t n, std::size_t replications, std::uint64_t seed,
                         const CapacityConfig& config, const GreenSource* green, unsigned threads = 1);

struct KernelDecayReport {
    Group group;
    /// n values; the statistic is p_{2n}(e).
    std::vector<std::size_t> grid;
    std::vector<double> return_probability;
    /// log p_{2n}(e) against log n, upper half of the grid.
    FitSummary loglog;
    /// log p_{2n}(e) against n on the same window.
    FitSummary semilog;
    /// -d/2 for lattices.
    std::optional<double> expected_slope;
    bool superpolynomial = false;
};

KernelDecayReport kernel_decay_check(const Group& group, std::span<const std::size_t> grid,
                                     std::size_t cap = kDefaultBallCap);

struct ExitTailReport {
    Group group;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<int> radii;
    /// Fraction of paths with tau_r < n, and its standard error.
    std::vector<double> frequency;
    std::vector<double> frequency_stderr;
    /// r^2 / n
    std::vector<double> scaled;
    /// log frequency against r^2 / n over radii with positive frequency.
    FitSummary fit;
    bool decreasing = false;
    /// Consecutive log-frequency slopes non-decreasing within 2 standard errors.
    bool convex_consistent = false;
};

ExitTailReport exit_tail_check(const Group& group, std::span<const int> radii, std::size_t n, std::size_t trials,
                               std::uint64_t seed, unsigned threads = 1);

struct PairGreenReport {
    Group group;
    std::vector<std::size_t> grid;
    std::vector<std::uint64_t> seeds;
    GreenMethod green_method = GreenMethod::LatticeIntegral;
    std::size_t green_horizon = 0;
    /// sums[i][s] = sum_{0 <= k, l <= grid[i]} G(S_k^{-1} S_l)
    std::vector<std::vector<double>> sums;
    std::vector<SeriesRow> rows;
    /// log mean sum against log n over the upper half of the grid.
    FitSummary exponent;
};

/// Exact double sum per path (grouped by visited element with visit counts).
double pair_green_sum(const WalkPath& path, std::size_t n, const GreenSource& green);

PairGreenReport pair_green_sum_check(const Group& group, std::span<const std::size_t> grid,
                                     std::span<const std::uint64_t> seeds, const GreenSource& green,
                                     unsigned threads = 1);

/// One sample of the dyadic decomposition at one depth L.
struct DyadicLevel {
    int levels = 0;
    double capacity = 0.0;
    double segment_sum = 0.0;
    /// Sum over all merges of G(left block, right block).
    double error_sum = 0.0;
    /// segment_sum - capacity
    double upper_margin = 0.0;
    /// capacity - (segment_sum - 2 error_sum)
    double lower_margin = 0.0;
    double combined_stderr = 0.0;
    bool upper_violation = false;
    bool lower_violation = false;
};

struct DyadicSample {
    std::uint64_t seed = 0;
    std::vector<DyadicLevel> levels;
    /// The two-set decomposition for the halves R[0, n/2], R[n/2, n].
    SandwichReport halves;
    bool segment_sum_monotone = true;
};

struct DyadicReport {
    Group group;
    std::size_t n = 0;
    std::vector<int> level_grid;
    std::vector<std::uint64_t> seeds;
    CapacityConfig config;
    std::vector<DyadicSample> samples;
    /// Violation counts per entry of level_grid (beyond 3 standard errors).
    std::vector<std::size_t> upper_violations;
    std::vector<std::size_t> lower_violations;
    /// Smallest lower margin per level, over samples.
    std::vector<double> min_lower_margin;
    std::size_t halves_upper_violations = 0;
    std::size_t halves_lower_violations = 0;
    std::size_t monotone_failures = 0;
};

DyadicReport dyadic_sandwich_experiment(const Group& group, std::size_t n, std::span<const int> level_grid,
                                        std::span<const std::uint64_t> seeds, const CapacityConfig& config,
                                        const GreenSource& green, unsigned threads = 1);

}  // namespace rangecap
