#include "rangecap/walk.hpp"

#include <string>

#include "rangecap/errors.hpp"
#include "rangecap/rng.hpp"

namespace rangecap {

bool WalkPath::valid() const
{
    if (positions.size() != steps.size() + 1) {
        return false;
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k] >= group.generator_count()) {
            return false;
        }
        GroupElement next = positions[k];
        group.step(next, steps[k]);
        if (next != positions[k + 1]) {
            return false;
        }
    }
    return true;
}

WalkPath path_from_steps(const Group& group, std::vector<std::uint32_t> steps, std::optional<GroupElement> start)
{
    WalkPath path{group, std::move(steps), {}, 0, 0};
    path.positions.reserve(path.steps.size() + 1);
    path.positions.push_back(start ? *start : group.identity());
    for (auto s : path.steps) {
        if (s >= group.generator_count()) {
            throw ValidationError("step index " + std::to_string(s) + " out of range");
        }
        GroupElement next = path.positions.back();
        group.step(next, s);
        path.positions.push_back(std::move(next));
    }
    return path;
}

WalkPath simulate(const Group& group, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                  std::optional<GroupElement> start)
{
    CounterRng rng(seed, stream);
    const auto k = static_cast<std::uint32_t>(group.generator_count());
    std::vector<std::uint32_t> steps(n);
    for (auto& s : steps) {
        s = rng.uniform_index(k);
    }
    WalkPath path = path_from_steps(group, std::move(steps), std::move(start));
    path.seed = seed;
    path.stream = stream;
    return path;
}

RangeSet range_of(const WalkPath& path, std::size_t m, std::size_t n)
{
    if (m > n || n > path.length()) {
        throw WindowOutOfBounds("window [" + std::to_string(m) + ", " + std::to_string(n) +
                                "] outside path of length " + std::to_string(path.length()));
    }
    RangeSet r;
    r.first = m;
    r.last = n;
    r.index.reserve(n - m + 1);
    for (std::size_t k = m; k <= n; ++k) {
        if (r.index.emplace(path.positions[k], r.members.size()).second) {
            r.members.push_back(path.positions[k]);
            r.first_visit.push_back(k);
        }
    }
    return r;
}

std::vector<std::size_t> range_sizes(const WalkPath& path)
{
    ElementSet seen;
    seen.reserve(path.positions.size());
    std::vector<std::size_t> sizes;
    sizes.reserve(path.positions.size());
    for (const auto& g : path.positions) {
        seen.insert(g);
        sizes.push_back(seen.size());
    }
    return sizes;
}

std::optional<std::size_t> exit_time(const WalkPath& path, int r, WordMetric& metric)
{
    for (std::size_t k = 0; k < path.positions.size(); ++k) {
        if (metric.outside(path.positions[k], r)) {
            return k;
        }
    }
    return std::nullopt;
}

DyadicSplit dyadic_segments(const WalkPath& path, int levels)
{
    if (levels < 0 || levels > 62 || (std::size_t{1} << levels) > path.length()) {
        throw TooManyLevels("2^" + std::to_string(levels) + " segments exceed path length " +
                            std::to_string(path.length()));
    }
    const std::size_t count = std::size_t{1} << levels;
    const std::size_t base = path.length() / count;
    const std::size_t extra = path.length() % count;
    DyadicSplit split;
    split.levels = levels;
    split.boundaries.push_back(0);
    for (std::size_t i = 0; i < count; ++i) {
        split.boundaries.push_back(split.boundaries.back() + base + (i < extra ? 1 : 0));
    }
    const Group& g = path.group;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t b = split.boundaries[i];
        const std::size_t e = split.boundaries[i + 1];
        const GroupElement shift = g.inverse(path.positions[b]);
        WalkPath seg{g, {path.steps.begin() + static_cast<std::ptrdiff_t>(b),
                         path.steps.begin() + static_cast<std::ptrdiff_t>(e)},
                     {}, path.seed, path.stream};
        seg.positions.reserve(e - b + 1);
        for (std::size_t k = b; k <= e; ++k) {
            seg.positions.push_back(g.multiply(shift, path.positions[k]));
        }
        split.segments.push_back(std::move(seg));
    }
    return split;
}

void write_path_csv(std::ostream& out, const WalkPath& path)
{
    out << "index,step,element\n";
    for (std::size_t k = 0; k < path.positions.size(); ++k) {
        out << k << ',';
        if (k > 0) {
            out << path.steps[k - 1];
        }
        out << ",\"" << path.group.encode(path.positions[k]) << "\"\n";
    }
}

}  // namespace rangecap
