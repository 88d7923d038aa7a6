#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "rangecap/capacity.hpp"
#include "rangecap/green.hpp"
#include "rangecap/walk.hpp"

namespace rangecap {

/// Both sides of
///   Cap(A) + Cap(B) - 2 G(A, B) <= Cap(A u B) <= Cap(A) + Cap(B) - Cap(A n B)
/// with margins (positive means the inequality holds).
struct SandwichReport {
    CapacityEstimate cap_a;
    CapacityEstimate cap_b;
    CapacityEstimate cap_union;
    CapacityEstimate cap_intersection;
    double cross_green = 0.0;
    /// Cap(A u B) - (Cap(A) + Cap(B) - 2 G(A, B))
    double lower_margin = 0.0;
    /// Cap(A) + Cap(B) - Cap(A n B) - Cap(A u B)
    double upper_margin = 0.0;
    /// Square root of the summed variances of the four capacity estimates.
    double combined_stderr = 0.0;
    /// Margins >= -3 combined standard errors (or a 1e-9 relative rounding
    /// allowance for deterministic estimates).
    bool lower_holds = true;
    bool upper_holds = true;
};

/// Evaluates the sandwich for two finite sets with one capacity method and
/// one escape seed for all four sets, so Monte Carlo trials from a common
/// element share their walks. `time_scale` sets escape horizons.
SandwichReport sandwich_for_sets(const Group& group, std::span<const GroupElement> a,
                                 std::span<const GroupElement> b, std::size_t time_scale,
                                 const CapacityConfig& config, std::uint64_t seed, const GreenSource& green);

/// A = R[0, m], B = R[m, length] of one path.
SandwichReport capacity_sandwich_check(const WalkPath& path, std::size_t m, const CapacityConfig& config,
                                       std::uint64_t seed, const GreenSource& green);

}  // namespace rangecap
