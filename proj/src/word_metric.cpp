#include "rangecap/word_metric.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "rangecap/errors.hpp"

namespace rangecap {

std::optional<int> Ball::length_of(const GroupElement& g) const
{
    auto it = index.find(g);
    if (it == index.end()) {
        return std::nullopt;
    }
    return lengths[it->second];
}

std::size_t Ball::count_within(int r) const
{
    // lengths are non-decreasing in BFS order
    std::size_t lo = 0, hi = lengths.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (lengths[mid] <= r) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

Ball ball(const Group& group, int radius, std::size_t cap)
{
    if (radius < 0) {
        throw ValidationError("ball radius must be >= 0");
    }
    Ball b;
    b.radius = radius;
    b.elements.push_back(group.identity());
    b.lengths.push_back(0);
    b.index.emplace(b.elements.front(), 0);
    std::size_t shell_begin = 0;
    for (int r = 1; r <= radius; ++r) {
        const std::size_t shell_end = b.elements.size();
        for (std::size_t i = shell_begin; i < shell_end; ++i) {
            for (std::size_t s = 0; s < group.generator_count(); ++s) {
                GroupElement next = b.elements[i];
                group.step(next, s);
                if (b.index.count(next) != 0) {
                    continue;
                }
                if (b.elements.size() >= cap) {
                    throw BallTooLarge("ball of radius " + std::to_string(radius) + " exceeds cap of " +
                                           std::to_string(cap) + " elements (complete up to radius " +
                                           std::to_string(r - 1) + ")",
                                       r - 1);
                }
                b.index.emplace(next, b.elements.size());
                b.elements.push_back(std::move(next));
                b.lengths.push_back(r);
            }
        }
        shell_begin = shell_end;
    }
    return b;
}

Ball open_ball(const Group& group, int radius, std::size_t cap)
{
    if (radius < 1) {
        throw ValidationError("open ball radius must be >= 1");
    }
    return ball(group, radius - 1, cap);
}

GrowthProfile growth_profile(const Group& group, int r_max, std::size_t cap, double superpolynomial_index)
{
    if (r_max < 2) {
        throw ValidationError("growth profile needs r_max >= 2");
    }
    const Ball b = ball(group, r_max, cap);
    GrowthProfile p;
    for (int r = 0; r <= r_max; ++r) {
        p.radii.push_back(r);
        p.ball_sizes.push_back(b.count_within(r));
    }
    p.fit_first_radius = std::max(1, (r_max + 1) / 2);
    p.fit_last_radius = r_max;
    std::vector<double> logr, r_lin, logv;
    for (int r = p.fit_first_radius; r <= r_max; ++r) {
        logr.push_back(std::log(static_cast<double>(r)));
        r_lin.push_back(static_cast<double>(r));
        logv.push_back(std::log(static_cast<double>(p.ball_sizes[static_cast<std::size_t>(r)])));
    }
    const LinearFit loglog = least_squares(logr, logv);
    const LinearFit semilog = least_squares(r_lin, logv);
    p.fitted_index = loglog.slope;
    p.fitted_index_stderr = loglog.slope_stderr;
    p.loglog_rss = loglog.rss;
    p.semilog_rss = semilog.rss;
    // finite groups saturate: log V flat, neither model describes growth
    const bool growing = p.ball_sizes.back() > p.ball_sizes[p.ball_sizes.size() - 2];
    p.superpolynomial = growing && (semilog.rss < loglog.rss || p.fitted_index > superpolynomial_index);
    return p;
}

WordMetric::WordMetric(const Group& group, std::size_t cap) : group_(group), cap_(cap) {}

void WordMetric::ensure_radius(int r)
{
    if (!table_ || table_->radius < r) {
        int target = table_ ? std::max(r, 2 * table_->radius) : r;
        try {
            table_ = ball(group_, target, cap_);
        } catch (const BallTooLarge&) {
            if (target == r) {
                throw;
            }
            table_ = ball(group_, r, cap_);
        }
    }
}

std::optional<int> WordMetric::length(const GroupElement& g, int max_radius)
{
    if (group_.is_standard_lattice()) {
        long total = 0;
        for (Coord c : g.values()) {
            total += std::labs(c);
        }
        if (total > max_radius) {
            return std::nullopt;
        }
        return static_cast<int>(total);
    }
    ensure_radius(max_radius);
    auto len = table_->length_of(g);
    if (len && *len > max_radius) {
        return std::nullopt;
    }
    return len;
}

bool WordMetric::outside(const GroupElement& g, int r)
{
    if (r <= 0) {
        return true;
    }
    return !length(g, r - 1).has_value();
}

}  // namespace rangecap
