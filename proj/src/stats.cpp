#include "rangecap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rangecap {

void RunningMoments::add(double x) noexcept
{
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_ - 4 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
    m2_ += term1;
}

double RunningMoments::variance() const noexcept
{
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningMoments::stddev() const noexcept
{
    return std::sqrt(variance());
}

double RunningMoments::stderr_mean() const noexcept
{
    return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

double RunningMoments::skewness() const noexcept
{
    if (n_ < 2 || m2_ <= 0.0) {
        return 0.0;
    }
    const double n = static_cast<double>(n_);
    return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
}

double RunningMoments::excess_kurtosis() const noexcept
{
    if (n_ < 2 || m2_ <= 0.0) {
        return 0.0;
    }
    const double n = static_cast<double>(n_);
    return n * m4_ / (m2_ * m2_) - 3.0;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares needs at least two paired points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("least_squares: degenerate abscissae");
    }
    LinearFit fit;
    fit.points = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.rss += r * r;
    }
    if (x.size() > 2) {
        fit.slope_stderr = std::sqrt(fit.rss / (n - 2) / sxx);
    }
    return fit;
}

double normal_cdf(double z) noexcept
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double ks_distance_standardized(std::span<const double> sample)
{
    if (sample.size() < 2) {
        throw std::invalid_argument("KS distance needs at least two observations");
    }
    RunningMoments m;
    for (double v : sample) {
        m.add(v);
    }
    const double sd = m.stddev();
    if (sd <= 0.0) {
        return 1.0;
    }
    std::vector<double> z(sample.begin(), sample.end());
    for (double& v : z) {
        v = (v - m.mean()) / sd;
    }
    std::sort(z.begin(), z.end());
    const auto n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double quantile(std::vector<double> sample, double q)
{
    if (sample.empty()) {
        throw std::invalid_argument("quantile of empty sample");
    }
    std::sort(sample.begin(), sample.end());
    const double h = (static_cast<double>(sample.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

std::size_t upper_half_start(std::size_t size) noexcept
{
    return size < 4 ? 0 : size / 2;
}

}  // namespace rangecap
