#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rangecap/walk.hpp"

namespace rangecap {

// A walk makes a double backtrack at even time n when S_{n-1} = S_{n-3} and
// S_n = S_{n-2}. A plain walk splits into a backbone with no double backtracks
// at even times and i.i.d. geometric counts of inserted double backtracks.

/// Backbone walk: the first two steps are plain; afterwards each pair
/// (S_{2k+1}, S_{2k+2}) is uniform over the |Gamma|^2 - 1 pairs that do not
/// repeat (S_{2k-1}, S_{2k}). Throws DegenerateGenerators when |Gamma| = 1.
WalkPath simulate_no_backtrack(const Group& group, std::size_t n, std::uint64_t seed, std::uint64_t stream);

/// Success parameter of the backtrack counts, p = 1 - 1/|Gamma|^2.
double backtrack_success_probability(const Group& group);

/// `count` i.i.d. variates with P(xi = j) = p (1 - p)^j, p as above.
std::vector<std::uint32_t> geometric_counts(const Group& group, std::size_t count, std::uint64_t seed,
                                            std::uint64_t stream);

struct BacktrackDecomposition {
    WalkPath backbone;
    /// counts[k-1] = xi_{2k}, k = 1..floor(n/2).
    std::vector<std::uint32_t> counts;
    /// partial_sums[k] = N_{2k} (partial_sums[0] = 0).
    std::vector<std::uint64_t> partial_sums;
    WalkPath reconstructed;
    /// intervals[k-1] = I_k as a closed index range (empty when first > last).
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
};

/// Rebuild a plain walk by inserting xi_{2k} double backtracks after S_{2k}.
/// Throws InsufficientCounts if fewer than floor(n/2) counts are supplied.
BacktrackDecomposition insert_backtracks(const WalkPath& backbone, std::vector<std::uint32_t> counts);

/// Checks range(backbone[0..2k]) == range(reconstructed[0..2k + 2 N_{2k}])
/// for every k.
bool range_identity_holds(const BacktrackDecomposition& d);

/// True if the path has no double backtrack at any even time.
bool has_no_even_double_backtrack(const WalkPath& path);

}  // namespace rangecap
