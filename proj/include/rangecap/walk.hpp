#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "rangecap/group.hpp"
#include "rangecap/word_metric.hpp"

namespace rangecap {

/// A realized trajectory S_0..S_n together with the increments X_1..X_n
/// (as generator indices) and the stream it was drawn from.
struct WalkPath {
    Group group;
    /// steps[k] is the generator index of X_{k+1}.
    std::vector<std::uint32_t> steps;
    /// positions[k] is S_k; positions.size() == steps.size() + 1.
    std::vector<GroupElement> positions;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::size_t length() const noexcept { return steps.size(); }
    /// Checks positions[k+1] == positions[k] * generators[steps[k]] for all k.
    bool valid() const;
};

/// Build a path from an explicit step sequence.
WalkPath path_from_steps(const Group& group, std::vector<std::uint32_t> steps,
                         std::optional<GroupElement> start = std::nullopt);

/// n i.i.d. uniform steps drawn from CounterRng(seed, stream).
WalkPath simulate(const Group& group, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                  std::optional<GroupElement> start = std::nullopt);

/// Visited set of a window R[m, n] with first-visit indices.
struct RangeSet {
    std::size_t first = 0;
    std::size_t last = 0;
    /// Members in order of first visit.
    std::vector<GroupElement> members;
    std::vector<std::size_t> first_visit;
    ElementMap<std::size_t> index;

    std::size_t size() const noexcept { return members.size(); }
    bool contains(const GroupElement& g) const { return index.count(g) != 0; }
};

RangeSet range_of(const WalkPath& path, std::size_t m, std::size_t n);

/// |R_k| for k = 0..path.length(), computed incrementally.
std::vector<std::size_t> range_sizes(const WalkPath& path);

/// First index k with rho(S_k) >= r, or nothing if the path stays inside.
std::optional<std::size_t> exit_time(const WalkPath& path, int r, WordMetric& metric);

/// 2^levels consecutive windows, each translated to start at the identity.
struct DyadicSplit {
    int levels = 0;
    /// Window i covers path indices [boundaries[i], boundaries[i+1]].
    std::vector<std::size_t> boundaries;
    std::vector<WalkPath> segments;
};

/// Window lengths are floor(n / 2^L) or one more; earlier windows take the
/// longer length.
DyadicSplit dyadic_segments(const WalkPath& path, int levels);

/// Debug export: header "index,step,element"; step is empty for index 0.
void write_path_csv(std::ostream& out, const WalkPath& path);

}  // namespace rangecap
