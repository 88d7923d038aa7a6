#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rangecap/green.hpp"
#include "rangecap/group.hpp"
#include "rangecap/walk.hpp"
#include "rangecap/word_metric.hpp"

namespace rangecap {

enum class CapacityMethod { EscapeMc, HarmonicBracket, VariationalLower, JainOreyRange, GreenSolve };

std::string_view capacity_method_name(CapacityMethod m) noexcept;
CapacityMethod parse_capacity_method(std::string_view name);

/// Cap(A) = sum_{g in A} P_g(no return to A), estimated or bracketed.
struct CapacityEstimate {
    std::size_t set_size = 0;
    double point = 0.0;
    CapacityMethod method = CapacityMethod::EscapeMc;
    /// Monte Carlo standard error (0 for deterministic methods).
    double stderr = 0.0;
    /// Deterministic [lower, upper] certificate, when the method yields one.
    std::optional<std::pair<double, double>> bracket;
    /// Escape-walk horizon; the value at half the horizon gauges truncation.
    std::size_t horizon = 0;
    std::optional<double> half_horizon_point;
    std::size_t trials = 0;
    int radius = 0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    bool converged = true;
};

/// Finite set with insertion order and fast membership. A bit filter keyed
/// by the element digest rejects most non-members without touching the hash
/// table, which matters in the escape-walk inner loop.
class FiniteSet {
public:
    FiniteSet() = default;
    explicit FiniteSet(std::span<const GroupElement> elements);

    bool contains(const GroupElement& g) const;
    const std::vector<GroupElement>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

private:
    std::vector<GroupElement> members_;
    ElementSet lookup_;
    std::vector<std::uint64_t> filter_;
    std::uint64_t filter_mask_ = 0;
};

struct EscapeEstimate {
    /// Fraction of trials that did not visit A at times 1..horizon.
    double probability = 0.0;
    double stderr = 0.0;
    /// Same trials, cut at horizon / 2 (>= probability samplewise).
    double half_horizon_probability = 0.0;
    std::size_t horizon = 0;
    std::size_t trials = 0;
};

/// Estimate of P_g(tau_A^+ > horizon). Trial j from g uses the stream keyed
/// by (g, j) under `seed`, so the same element sees the same walks whatever
/// set it is tested against, and longer horizons extend the same paths.
EscapeEstimate escape_mc(const Group& group, const FiniteSet& a, const GroupElement& g, std::size_t horizon,
                         std::size_t trials, std::uint64_t seed);

/// Sum of escape_mc over the members of A; errors add in quadrature.
CapacityEstimate capacity_mc(const Group& group, std::span<const GroupElement> a, std::size_t horizon,
                             std::size_t trials, std::uint64_t seed, unsigned threads = 1);

struct BracketOptions {
    double tolerance = 1e-12;
    std::size_t max_sweeps = 1'000'000;
    std::size_t cap = kDefaultBallCap;
    /// Exact Green function used to certify the lower bound; when absent the
    /// lower bound counts every exit as a return and is 0.
    const GreenSource* green = nullptr;
};

/// Deterministic bracket from the harmonic problem on the open ball
/// B(radius) = {rho < radius}: h(v) = P_v(hit A before leaving the ball),
/// solved by Jacobi sweeps. Upper bound: leaving the ball counts as escape.
/// Lower bound: escape probabilities scaled by a Green-function bound on
/// the chance of coming back from the ball's exterior boundary.
/// Requires A inside {rho <= radius - 1}.
CapacityEstimate capacity_bracket(const Group& group, std::span<const GroupElement> a, int radius,
                                  const BracketOptions& options = {});

/// Exact capacity from the Green matrix: solve G_A x = 1 on A, Cap = sum x.
/// `x` is the equilibrium measure (escape probabilities).
CapacityEstimate capacity_green_solve(const Group& group, std::span<const GroupElement> a,
                                      const GreenSource& green, std::vector<double>* equilibrium = nullptr);

/// How an experiment realizes Cap(R_n).
struct CapacityConfig {
    CapacityMethod method = CapacityMethod::EscapeMc;
    /// Escape horizon = ceil(horizon_factor * path length).
    double horizon_factor = 16.0;
    std::size_t trials = 64;
    unsigned threads = 1;
};

/// Cap of a finite set under `config`. `time_scale` sets the escape horizon
/// (horizon_factor * time_scale); it is the path length for ranges.
CapacityEstimate capacity_of_set(const Group& group, std::span<const GroupElement> a, std::size_t time_scale,
                                 const CapacityConfig& config, std::uint64_t seed,
                                 const GreenSource* green = nullptr);

/// Cap of a range window. Escape-based methods walk from the members in
/// first-visit order (the Jain-Orey sum over new points).
CapacityEstimate capacity_of_range(const Group& group, const RangeSet& range, std::size_t path_length,
                                   const CapacityConfig& config, std::uint64_t seed,
                                   const GreenSource* green = nullptr);

}  // namespace rangecap
