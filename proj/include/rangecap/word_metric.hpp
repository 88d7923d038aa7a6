#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rangecap/group.hpp"
#include "rangecap/stats.hpp"

namespace rangecap {

inline constexpr std::size_t kDefaultBallCap = 10'000'000;

/// Closed ball {g : rho(g) <= radius} in breadth-first order.
struct Ball {
    int radius = 0;
    std::vector<GroupElement> elements;
    /// Word length of elements[i].
    std::vector<int> lengths;
    ElementMap<std::size_t> index;

    std::size_t size() const noexcept { return elements.size(); }
    bool contains(const GroupElement& g) const { return index.count(g) != 0; }
    /// Word length of g, or nothing if g lies outside the ball.
    std::optional<int> length_of(const GroupElement& g) const;
    /// Number of elements with rho <= r, for r <= radius.
    std::size_t count_within(int r) const;
};

/// Breadth-first enumeration of the closed ball of radius r around e.
/// Throws BallTooLarge (with the last complete radius) once more than `cap`
/// elements would be stored.
Ball ball(const Group& group, int radius, std::size_t cap = kDefaultBallCap);

/// Open ball {g : rho(g) < radius}.
Ball open_ball(const Group& group, int radius, std::size_t cap = kDefaultBallCap);

struct GrowthProfile {
    std::vector<int> radii;
    std::vector<std::size_t> ball_sizes;
    /// Slope of log V(n) against log n over the upper half of the radii.
    double fitted_index = 0.0;
    double fitted_index_stderr = 0.0;
    int fit_first_radius = 0;
    int fit_last_radius = 0;
    /// Residual sums of squares of the log-log and semi-log fits on the window.
    double loglog_rss = 0.0;
    double semilog_rss = 0.0;
    /// Growth looks faster than any polynomial on the sampled window.
    bool superpolynomial = false;
};

/// Default fitted-index level above which growth is flagged superpolynomial
/// regardless of the model comparison.
inline constexpr double kSuperpolynomialIndex = 8.0;

GrowthProfile growth_profile(const Group& group, int r_max, std::size_t cap = kDefaultBallCap,
                             double superpolynomial_index = kSuperpolynomialIndex);

/// Word length oracle. Uses the l1 closed form for standard lattices and a
/// breadth-first table otherwise (extended on demand up to the cap).
class WordMetric {
public:
    explicit WordMetric(const Group& group, std::size_t cap = kDefaultBallCap);

    /// rho(g) if rho(g) <= max_radius; nothing otherwise.
    std::optional<int> length(const GroupElement& g, int max_radius);
    /// True iff rho(g) >= r.
    bool outside(const GroupElement& g, int r);

private:
    void ensure_radius(int r);

    Group group_;
    std::size_t cap_;
    std::optional<Ball> table_;
};

}  // namespace rangecap
