#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rangecap {

/// One-pass accumulator for the first four central moments (Pébay's update
/// formulas), so replicated statistics can be reduced in a fixed order.
class RunningMoments {
public:
    void add(double x) noexcept;

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance (n - 1 denominator); 0 for n < 2.
    double variance() const noexcept;
    double stddev() const noexcept;
    /// Standard error of the mean.
    double stderr_mean() const noexcept;
    /// Sample skewness g1 = m3 / m2^{3/2} (population moments).
    double skewness() const noexcept;
    /// Excess kurtosis g2 = m4 / m2^2 - 3 (population moments).
    double excess_kurtosis() const noexcept;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Standard error of the slope; 0 when fewer than three points.
    double slope_stderr = 0.0;
    /// Residual sum of squares.
    double rss = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Standard normal CDF.
double normal_cdf(double z) noexcept;

/// Kolmogorov-Smirnov distance between the empirical CDF of the sample,
/// standardized by its own mean and standard deviation, and N(0, 1).
double ks_distance_standardized(std::span<const double> sample);

/// Linear-interpolated quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> sample, double q);

/// Indices [first, size) forming the upper half of a grid of `size` points;
/// grids shorter than four points are used whole.
std::size_t upper_half_start(std::size_t size) noexcept;

}  // namespace rangecap
