#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rangecap/capacity.hpp"
#include "rangecap/green.hpp"
#include "rangecap/group.hpp"
#include "rangecap/walk.hpp"

namespace rangecap {

/// Probability measure on a finite support.
struct SimplexMeasure {
    std::vector<GroupElement> support;
    std::vector<double> weights;

    /// Weights non-negative and summing to 1 within `tolerance`.
    bool valid(double tolerance = 1e-10) const;
};

/// Symmetric matrix G(a_i^{-1} a_j) over an ordered set, row-major.
struct GreenMatrix {
    std::size_t size = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * size + j]; }
};

GreenMatrix green_matrix(const Group& group, std::span<const GroupElement> a, const GreenSource& green);

/// E(nu) = sum_{g1, g2} G(g1, g2) nu(g1) nu(g2).
double energy(const Group& group, const SimplexMeasure& nu, const GreenSource& green);
double energy(const GreenMatrix& g, std::span<const double> weights);

struct EquilibriumResult {
    SimplexMeasure measure;
    /// method variational-lower; point = 1 / E(nu). With the duality gap the
    /// minimum energy lies in [E - gap, E], which gives the bracket.
    CapacityEstimate estimate;
    double energy = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Minimizes E over the probability simplex on A by conditional gradient
/// steps of size 2 / (t + 2) towards the vertex with the smallest gradient
/// 2 (G nu)_g, stopping once the duality gap is below `tolerance`. If the
/// iteration cap is hit the last iterate is returned with converged = false.
EquilibriumResult equilibrium_measure(const Group& group, std::span<const GroupElement> a,
                                      const GreenSource& green, std::size_t max_iterations = 10'000'000,
                                      double tolerance = 1e-8);

/// nu_n(g) = (1/n) #{1 <= k <= n : S_k = g}, supported on R[1, n].
SimplexMeasure empirical_measure(const WalkPath& path, std::size_t n);

}  // namespace rangecap
