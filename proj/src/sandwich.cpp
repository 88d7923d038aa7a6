#include "rangecap/sandwich.hpp"

#include <cmath>

#include "rangecap/errors.hpp"

namespace rangecap {

SandwichReport sandwich_for_sets(const Group& group, std::span<const GroupElement> a,
                                 std::span<const GroupElement> b, std::size_t time_scale,
                                 const CapacityConfig& config, std::uint64_t seed, const GreenSource& green)
{
    const FiniteSet set_a(a);
    const FiniteSet set_b(b);
    std::vector<GroupElement> uni = set_a.members();
    std::vector<GroupElement> inter;
    for (const auto& g : set_b.members()) {
        if (set_a.contains(g)) {
            inter.push_back(g);
        } else {
            uni.push_back(g);
        }
    }
    SandwichReport r;
    r.cap_a = capacity_of_set(group, set_a.members(), time_scale, config, seed, &green);
    r.cap_b = capacity_of_set(group, set_b.members(), time_scale, config, seed, &green);
    r.cap_union = capacity_of_set(group, uni, time_scale, config, seed, &green);
    r.cap_intersection = capacity_of_set(group, inter, time_scale, config, seed, &green);
    r.cross_green = cross_green(group, set_a.members(), set_b.members(), green);
    r.lower_margin = r.cap_union.point - (r.cap_a.point + r.cap_b.point - 2.0 * r.cross_green);
    r.upper_margin = r.cap_a.point + r.cap_b.point - r.cap_intersection.point - r.cap_union.point;
    r.combined_stderr = std::sqrt(r.cap_a.stderr * r.cap_a.stderr + r.cap_b.stderr * r.cap_b.stderr +
                                  r.cap_union.stderr * r.cap_union.stderr +
                                  r.cap_intersection.stderr * r.cap_intersection.stderr);
    const double slack = r.combined_stderr > 0.0 ? 3.0 * r.combined_stderr
                                                : 1e-9 * (1.0 + r.cap_a.point + r.cap_b.point);
    r.lower_holds = r.lower_margin >= -slack;
    r.upper_holds = r.upper_margin >= -slack;
    return r;
}

SandwichReport capacity_sandwich_check(const WalkPath& path, std::size_t m, const CapacityConfig& config,
                                       std::uint64_t seed, const GreenSource& green)
{
    if (m > path.length()) {
        throw WindowOutOfBounds("sandwich split point beyond the path");
    }
    const RangeSet a = range_of(path, 0, m);
    const RangeSet b = range_of(path, m, path.length());
    return sandwich_for_sets(path.group, a.members, b.members, path.length(), config, seed, green);
}

}  // namespace rangecap
