#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rangecap/group.hpp"
#include "rangecap/word_metric.hpp"

namespace rangecap {

/// Exact n-step distributions p_k(.) started from the identity.
struct KernelTable {
    using Distribution = std::vector<std::pair<GroupElement, double>>;

    std::size_t horizon = 0;
    /// distributions[k] lists (g, p_k(g)) in a deterministic order.
    std::vector<Distribution> distributions;
    /// Probability mass discarded by pruning up to and including step k.
    std::vector<double> pruned_mass;

    /// p_k(g); 0 outside the stored support.
    double probability(std::size_t k, const GroupElement& g) const;
    /// p_k(g) sorted by element, for stable output.
    Distribution sorted(std::size_t k) const;
};

/// Dynamic programming p_{k+1}(g) = |Gamma|^{-1} sum_s p_k(g s^{-1}).
/// Entries below prune_eps are dropped after each step and their mass is
/// recorded. Throws BallTooLarge if a support exceeds `cap` elements.
KernelTable exact_kernel(const Group& group, std::size_t n_max, double prune_eps = 0.0,
                         std::size_t cap = kDefaultBallCap);

/// p_k(x) for k = 0..n_max on Z^d with standard generators, evaluated for a
/// single target by splitting the steps among coordinates:
///   p_k(x) = sum over step allocations (multinomial) of prod_j q_{k_j}(x_j),
/// with q the one-dimensional kernel. Cost O(d n_max^2) per target after a
/// one-off O(d n_max^2) weight table.
class LatticeKernelSeries {
public:
    LatticeKernelSeries(int dim, std::size_t n_max);

    int dim() const noexcept { return dim_; }
    std::size_t horizon() const noexcept { return n_max_; }

    /// Series p_0(x), ..., p_{n_max}(x).
    std::vector<double> series(const GroupElement& x) const;

private:
    std::vector<double> one_dim(Coord y) const;

    int dim_;
    std::size_t n_max_;
    std::vector<double> log_factorial_;
    /// weights_[c - 2][k * (k + 1) / 2 + m] = Binomial(k, m; 1/c) pmf.
    std::vector<std::vector<double>> weights_;
};

}  // namespace rangecap
